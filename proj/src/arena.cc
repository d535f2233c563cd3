// Copyright 2026 The Jury Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "jury/arena.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "jury/errors.h"
#include "jury/judge.h"

namespace jury {

double ExpectedScore(double r_i, double r_j) {
  return 1.0 / (1.0 + std::pow(10.0, (r_j - r_i) / 400.0));
}

double UpdateRating(double r_i, double s_i, double e_i, double k) {
  return r_i + k * (s_i - e_i);
}

nlohmann::json MatchResultToJson(const MatchResult& m) {
  return {{"question_id", m.question_id}, {"judge_a", m.judge_a},
          {"judge_b", m.judge_b},         {"s_a", m.s_a},
          {"e_a", m.e_a},                 {"delta_a", m.delta_a}};
}

MatchResult MatchResultFromJson(const nlohmann::json& j) {
  try {
    return {j.at("question_id").get<std::string>(),
            j.at("judge_a").get<std::string>(),
            j.at("judge_b").get<std::string>(), j.at("s_a").get<double>(),
            j.at("e_a").get<double>(), j.at("delta_a").get<double>()};
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("match result: ") + e.what());
  }
}

double MatchOutcome(const Verdict& a, const Verdict& b,
                    const QuestionRecord& record) {
  if (a.question_id != record.id || b.question_id != record.id) {
    throw QuestionMismatch("verdicts for '" + a.question_id + "' and '" +
                           b.question_id + "' compared on question '" +
                           record.id + "'");
  }
  const bool a_hit = JudgmentMatchesGold(a, record);
  const bool b_hit = JudgmentMatchesGold(b, record);
  if (a_hit && !b_hit) return 1.0;
  if (b_hit && !a_hit) return 0.0;
  return 0.5;
}

RatingTable::RatingTable(const std::vector<std::string>& judges,
                         EloSettings settings)
    : settings_(settings) {
  for (const auto& j : judges) {
    if (!ratings_.emplace(j, settings_.initial_rating).second) {
      throw DuplicateJudge(j);
    }
    match_count_.emplace(j, 0);
  }
}

double RatingTable::rating(const std::string& judge) const {
  auto it = ratings_.find(judge);
  if (it == ratings_.end()) {
    throw ValidationError("unknown judge in rating table: " + judge);
  }
  return it->second;
}

std::size_t RatingTable::match_count(const std::string& judge) const {
  auto it = match_count_.find(judge);
  return it == match_count_.end() ? 0 : it->second;
}

double RatingTable::Total() const {
  return std::accumulate(
      ratings_.begin(), ratings_.end(), 0.0,
      [](double acc, const auto& kv) { return acc + kv.second; });
}

MatchResult RatingTable::Play(const std::string& question_id,
                              const std::string& judge_a,
                              const std::string& judge_b, double s_a) {
  if (s_a != 0.0 && s_a != 0.5 && s_a != 1.0) {
    throw ValidationError("match score must be 0, 0.5 or 1");
  }
  if (judge_a == judge_b) throw ValidationError("a judge cannot play itself");
  double& r_a = ratings_.at(judge_a);
  double& r_b = ratings_.at(judge_b);
  MatchResult m;
  m.question_id = question_id;
  m.judge_a = judge_a;
  m.judge_b = judge_b;
  m.s_a = s_a;
  m.e_a = ExpectedScore(r_a, r_b);
  m.delta_a = settings_.k_factor * (s_a - m.e_a);
  r_a = UpdateRating(r_a, s_a, m.e_a, settings_.k_factor);
  r_b -= m.delta_a;
  ++match_count_[judge_a];
  ++match_count_[judge_b];
  return m;
}

nlohmann::json RatingTable::ToJson() const {
  return {{"k_factor", settings_.k_factor},
          {"initial_rating", settings_.initial_rating},
          {"ratings", ratings_},
          {"match_count", match_count_}};
}

RatingTable RatingTable::FromJson(const nlohmann::json& j) {
  try {
    EloSettings settings{j.at("k_factor").get<double>(),
                         j.at("initial_rating").get<double>()};
    RatingTable table({}, settings);
    table.ratings_ = j.at("ratings").get<std::map<std::string, double>>();
    table.match_count_ =
        j.at("match_count").get<std::map<std::string, std::size_t>>();
    return table;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("rating table: ") + e.what());
  }
}

Tournament RunTournament(const BalancedSplit& split,
                         const VerdictTable& verdicts,
                         std::vector<std::string> judges,
                         EloSettings settings) {
  if (judges.empty()) throw ValidationError("tournament needs judges");
  std::sort(judges.begin(), judges.end());
  if (auto dup = std::adjacent_find(judges.begin(), judges.end());
      dup != judges.end()) {
    throw DuplicateJudge(*dup);
  }

  // Coverage is checked up front so a failure leaves no partial log.
  for (const auto& record : split.records) {
    for (const auto& judge : judges) {
      if (!verdicts.count({judge, record.id})) {
        throw MissingVerdict(judge, record.id);
      }
    }
  }

  Tournament t{RatingTable(judges, settings), {}};
  const std::size_t n = judges.size();
  t.matches.reserve(split.records.size() * n * (n - 1) / 2);
  for (const auto& record : split.records) {
    for (std::size_t a = 0; a < n; ++a) {
      const Verdict& va = verdicts.at({judges[a], record.id});
      for (std::size_t b = a + 1; b < n; ++b) {
        const Verdict& vb = verdicts.at({judges[b], record.id});
        t.matches.push_back(t.table.Play(record.id, judges[a], judges[b],
                                         MatchOutcome(va, vb, record)));
      }
    }
  }
  return t;
}

}  // namespace jury
