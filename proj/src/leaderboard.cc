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

#include "jury/leaderboard.h"

#include <fmt/format.h>

#include <algorithm>
#include <set>

#include "jury/errors.h"
#include "jury/judge.h"

namespace jury {
namespace {

constexpr std::string_view kUndefined = "—";

std::optional<double> Ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

std::string Fixed(const std::optional<double>& v, int decimals,
                  std::string_view undefined) {
  if (!v) return std::string(undefined);
  return fmt::format("{:.{}f}", *v, decimals);
}

std::string JsonString(const std::string& s) { return nlohmann::json(s).dump(); }

std::optional<double> OptionalNumber(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<double>();
}

// Descending with undefined last; returns <0, 0, >0 like strcmp.
int CompareDesc(const std::optional<double>& a,
                const std::optional<double>& b) {
  if (a && b) {
    if (*a > *b) return -1;
    if (*a < *b) return 1;
    return 0;
  }
  if (a) return -1;
  if (b) return 1;
  return 0;
}

std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

double JudgeScore::overall() const {
  if (!overall_acc) throw EmptySubset("overall");
  return *overall_acc;
}

double JudgeScore::sw() const {
  if (!sw_acc) throw EmptySubset("sw");
  return *sw_acc;
}

double JudgeScore::sr() const {
  if (!sr_acc) throw EmptySubset("sr");
  return *sr_acc;
}

JudgeScore ScoreFromCounts(std::string judge_id, std::size_t n_sw,
                           std::size_t n_sr, std::size_t correct_sw,
                           std::size_t correct_sr, std::size_t correct_total,
                           std::optional<double> elo) {
  JudgeScore s;
  s.judge_id = std::move(judge_id);
  s.n_sw = n_sw;
  s.n_sr = n_sr;
  s.correct_sw = correct_sw;
  s.correct_sr = correct_sr;
  s.correct_total = correct_total;
  s.overall_acc = Ratio(correct_total, n_sw + n_sr);
  s.sw_acc = Ratio(correct_sw, n_sw);
  s.sr_acc = Ratio(correct_sr, n_sr);
  s.elo = elo;
  return s;
}

std::vector<JudgeScore> ComputeScores(const VerdictTable& verdicts,
                                      const BalancedSplit& split,
                                      const RatingTable* ratings) {
  std::set<std::string> judges;
  for (const auto& [key, v] : verdicts) judges.insert(key.first);

  std::vector<JudgeScore> out;
  for (const auto& judge : judges) {
    auto verdict_for = [&](const QuestionRecord& r) -> const Verdict& {
      auto it = verdicts.find({judge, r.id});
      if (it == verdicts.end()) throw MissingVerdict(judge, r.id);
      return it->second;
    };
    std::size_t n_sw = 0, n_sr = 0, hit_sw = 0, hit_sr = 0, hit_total = 0;
    for (const auto& r : split.records) {
      if (!r.student_correct) throw UngradedRecord(r.id);
      const bool hit = JudgmentMatchesGold(verdict_for(r), r);
      if (*r.student_correct) {
        ++n_sr;
        hit_sr += hit;
      } else {
        ++n_sw;
        hit_sw += hit;
      }
    }
    // Overall numerator tallied separately from the per-subset ones.
    for (const auto& r : split.records) {
      hit_total += JudgmentMatchesGold(verdict_for(r), r);
    }
    std::optional<double> elo;
    if (ratings && ratings->ratings().count(judge)) {
      elo = ratings->rating(judge);
    }
    out.push_back(
        ScoreFromCounts(judge, n_sw, n_sr, hit_sw, hit_sr, hit_total, elo));
  }
  return out;
}

std::string_view RankingKeyName(RankingKey key) {
  return key == RankingKey::kElo ? "elo" : "overall_acc";
}

RankingKey ParseRankingKey(std::string_view name) {
  if (name == "elo") return RankingKey::kElo;
  if (name == "overall_acc") return RankingKey::kOverallAcc;
  throw ValidationError("unknown ranking key: " + std::string(name));
}

Leaderboard BuildLeaderboard(std::vector<JudgeScore> scores,
                             RankingKey ranking_key, std::string category) {
  if (scores.empty()) throw ValidationError("leaderboard needs scores");
  std::set<std::string> seen;
  for (const auto& s : scores) {
    if (!seen.insert(s.judge_id).second) throw DuplicateJudge(s.judge_id);
  }
  auto primary = [&](const JudgeScore& s) {
    return ranking_key == RankingKey::kElo ? s.elo : s.overall_acc;
  };
  std::sort(scores.begin(), scores.end(),
            [&](const JudgeScore& a, const JudgeScore& b) {
              if (int c = CompareDesc(primary(a), primary(b))) return c < 0;
              if (int c = CompareDesc(a.elo, b.elo)) return c < 0;
              if (int c = CompareDesc(a.overall_acc, b.overall_acc)) {
                return c < 0;
              }
              return a.judge_id < b.judge_id;
            });
  return {std::move(category), ranking_key, std::move(scores)};
}

std::string_view EmitFormatExtension(EmitFormat format) {
  switch (format) {
    case EmitFormat::kJson:
      return "json";
    case EmitFormat::kCsv:
      return "csv";
    case EmitFormat::kMarkdown:
      return "md";
  }
  return "txt";
}

std::string MarkdownRow(const JudgeScore& s, bool with_elo) {
  std::string row = "| " + s.judge_id + " | " +
                    Fixed(s.overall_acc, 4, kUndefined) + " | " +
                    Fixed(s.sw_acc, 3, kUndefined) + " |";
  if (with_elo) row += " " + Fixed(s.elo, 1, kUndefined) + " |";
  return row;
}

std::string Emit(const Leaderboard& board, EmitFormat format) {
  std::string out;
  switch (format) {
    case EmitFormat::kJson: {
      out = "{\"category\":" + JsonString(board.category) +
            ",\"ranking_key\":\"" + std::string(RankingKeyName(board.ranking_key)) +
            "\",\"rows\":[";
      for (std::size_t i = 0; i < board.rows.size(); ++i) {
        const auto& s = board.rows[i];
        out += i == 0 ? "\n  " : ",\n  ";
        out += fmt::format(
            "{{\"correct_sr\":{},\"correct_sw\":{},\"correct_total\":{},"
            "\"elo\":{},\"judge\":{},\"n_sr\":{},\"n_sw\":{},"
            "\"overall_acc\":{},\"sr_acc\":{},\"sw_acc\":{}}}",
            s.correct_sr, s.correct_sw, s.correct_total,
            Fixed(s.elo, 1, "null"), JsonString(s.judge_id), s.n_sr, s.n_sw,
            Fixed(s.overall_acc, 4, "null"), Fixed(s.sr_acc, 4, "null"),
            Fixed(s.sw_acc, 4, "null"));
      }
      out += board.rows.empty() ? "]}\n" : "\n]}\n";
      break;
    }
    case EmitFormat::kCsv: {
      out = "judge,overall_acc,sw_acc,sr_acc,elo,n_sw,n_sr\n";
      for (const auto& s : board.rows) {
        out += fmt::format("{},{},{},{},{},{},{}\n", CsvField(s.judge_id),
                           Fixed(s.overall_acc, 4, ""), Fixed(s.sw_acc, 4, ""),
                           Fixed(s.sr_acc, 4, ""), Fixed(s.elo, 1, ""), s.n_sw,
                           s.n_sr);
      }
      break;
    }
    case EmitFormat::kMarkdown: {
      const bool with_elo =
          std::any_of(board.rows.begin(), board.rows.end(),
                      [](const JudgeScore& s) { return s.elo.has_value(); });
      out = "| Judge | Overall | SW |";
      out += with_elo ? " Elo |\n|---|---|---|---|\n" : "\n|---|---|---|\n";
      for (const auto& s : board.rows) out += MarkdownRow(s, with_elo) + "\n";
      break;
    }
  }
  return out;
}

Leaderboard ParseLeaderboardJson(std::string_view text) {
  Leaderboard board;
  try {
    auto j = nlohmann::json::parse(text);
    board.category = j.at("category").get<std::string>();
    board.ranking_key = ParseRankingKey(j.at("ranking_key").get<std::string>());
    for (const auto& r : j.at("rows")) {
      JudgeScore s;
      s.judge_id = r.at("judge").get<std::string>();
      s.overall_acc = OptionalNumber(r, "overall_acc");
      s.sw_acc = OptionalNumber(r, "sw_acc");
      s.sr_acc = OptionalNumber(r, "sr_acc");
      s.elo = OptionalNumber(r, "elo");
      s.n_sw = r.at("n_sw").get<std::size_t>();
      s.n_sr = r.at("n_sr").get<std::size_t>();
      s.correct_total = r.value("correct_total", std::size_t{0});
      s.correct_sw = r.value("correct_sw", std::size_t{0});
      s.correct_sr = r.value("correct_sr", std::size_t{0});
      board.rows.push_back(std::move(s));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("leaderboard json: ") + e.what());
  }
  return board;
}

}  // namespace jury
