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

// Pairwise judge competitions and Elo ratings.
//
// A judge wins a match on a question when its verdict agrees with the gold
// label and its opponent's does not; everything else is a draw. Ratings move
// by K * (S - E) with the logistic expected score on a 400-point scale.

#ifndef JURY_ARENA_H_
#define JURY_ARENA_H_

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "jury/corpus.h"
#include "jury/verdict.h"

namespace jury {

inline constexpr double kDefaultKFactor = 10.0;
inline constexpr double kDefaultInitialRating = 1000.0;

// 1 / (1 + 10^((r_j - r_i) / 400)).
double ExpectedScore(double r_i, double r_j);

// r_i + k * (s_i - e_i).
double UpdateRating(double r_i, double s_i, double e_i, double k);

struct MatchResult {
  std::string question_id;
  std::string judge_a;
  std::string judge_b;
  double s_a = 0.5;
  double e_a = 0.5;
  double delta_a = 0.0;

  double s_b() const { return 1.0 - s_a; }
  double e_b() const { return 1.0 - e_a; }
  double delta_b() const { return -delta_a; }
  bool operator==(const MatchResult&) const = default;
};

nlohmann::json MatchResultToJson(const MatchResult& m);
MatchResult MatchResultFromJson(const nlohmann::json& j);

// 1 if only a matches gold, 0 if only b does, 0.5 otherwise. Throws
// QuestionMismatch when either verdict concerns another question.
double MatchOutcome(const Verdict& a, const Verdict& b,
                    const QuestionRecord& record);

struct EloSettings {
  double k_factor = kDefaultKFactor;
  double initial_rating = kDefaultInitialRating;
};

class RatingTable {
 public:
  RatingTable(const std::vector<std::string>& judges, EloSettings settings = {});

  double rating(const std::string& judge) const;
  std::size_t match_count(const std::string& judge) const;
  const std::map<std::string, double>& ratings() const { return ratings_; }
  double k_factor() const { return settings_.k_factor; }
  double initial_rating() const { return settings_.initial_rating; }
  double Total() const;

  // Applies one match; the loser gives up exactly what the winner gains.
  MatchResult Play(const std::string& question_id, const std::string& judge_a,
                   const std::string& judge_b, double s_a);

  nlohmann::json ToJson() const;
  static RatingTable FromJson(const nlohmann::json& j);

 private:
  EloSettings settings_;
  std::map<std::string, double> ratings_;
  std::map<std::string, std::size_t> match_count_;
};

struct Tournament {
  RatingTable table;
  std::vector<MatchResult> matches;
};

// Single pass: questions in split order; per question every unordered pair
// (a, b) with a < b in lexicographic order; sequential updates. Must run on
// one thread. Throws MissingVerdict, DuplicateJudge.
Tournament RunTournament(const BalancedSplit& split,
                         const VerdictTable& verdicts,
                         std::vector<std::string> judges,
                         EloSettings settings = {});

}  // namespace jury

#endif  // JURY_ARENA_H_
