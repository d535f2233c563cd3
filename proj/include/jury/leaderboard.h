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

// Accuracy metrics per judge and dual-ranked leaderboards.

#ifndef JURY_LEADERBOARD_H_
#define JURY_LEADERBOARD_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jury/arena.h"
#include "jury/corpus.h"
#include "jury/verdict.h"

namespace jury {

// Ratios are nullopt when their subset is empty (undefined, not zero).
struct JudgeScore {
  std::string judge_id;
  std::optional<double> overall_acc;
  std::optional<double> sw_acc;  // questions the student answered wrongly
  std::optional<double> sr_acc;  // questions the student answered rightly
  std::optional<double> elo;
  std::size_t n_sw = 0;
  std::size_t n_sr = 0;
  std::size_t correct_total = 0;
  std::size_t correct_sw = 0;
  std::size_t correct_sr = 0;

  // Throw EmptySubset("overall" / "sw" / "sr") when undefined.
  double overall() const;
  double sw() const;
  double sr() const;

  bool operator==(const JudgeScore&) const = default;
};

// Derives the ratios from counts.
JudgeScore ScoreFromCounts(std::string judge_id, std::size_t n_sw,
                           std::size_t n_sr, std::size_t correct_sw,
                           std::size_t correct_sr, std::size_t correct_total,
                           std::optional<double> elo = std::nullopt);

// One score per judge present in `verdicts`, sorted by judge id. Invalid
// verdicts are non-matches and stay in the denominators. Elo is filled from
// `ratings` when given and the judge is rated. Throws MissingVerdict.
std::vector<JudgeScore> ComputeScores(const VerdictTable& verdicts,
                                      const BalancedSplit& split,
                                      const RatingTable* ratings = nullptr);

enum class RankingKey { kOverallAcc, kElo };

std::string_view RankingKeyName(RankingKey key);
RankingKey ParseRankingKey(std::string_view name);

struct Leaderboard {
  std::string category;
  RankingKey ranking_key = RankingKey::kOverallAcc;
  std::vector<JudgeScore> rows;

  bool operator==(const Leaderboard&) const = default;
};

// Descending by the ranking key, ties broken by elo, then overall accuracy
// (both descending, undefined last), then judge id ascending.
// Throws DuplicateJudge; empty input is a ValidationError.
Leaderboard BuildLeaderboard(std::vector<JudgeScore> scores,
                             RankingKey ranking_key, std::string category);

enum class EmitFormat { kJson, kCsv, kMarkdown };

std::string_view EmitFormatExtension(EmitFormat format);

//  json:     sorted keys, accuracies with 4 decimals, Elo with 1, null when
//            undefined.
//  csv:      header "judge,overall_acc,sw_acc,sr_acc,elo,n_sw,n_sr".
//  markdown: Overall (4 dp), SW (3 dp), Elo (1 dp) columns; the Elo column is
//            dropped when no row is rated; undefined cells render as "—".
std::string Emit(const Leaderboard& board, EmitFormat format);

// Inverse of Emit(..., kJson).
Leaderboard ParseLeaderboardJson(std::string_view text);

// "| judge | 0.7789 | 0.570 | 1070.8 |"
std::string MarkdownRow(const JudgeScore& score, bool with_elo);

}  // namespace jury

#endif  // JURY_LEADERBOARD_H_
