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

#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "jury/errors.h"
#include "oracles.h"
#include "test_util.h"

namespace jury {
namespace {

using testing::DataPath;
using testing::MakeScenario;
using testing::RawDecision;
using testing::ReadFile;

JudgeScore Score(std::string id, double overall, std::optional<double> sw,
                 std::optional<double> elo) {
  JudgeScore s;
  s.judge_id = std::move(id);
  s.overall_acc = overall;
  s.sw_acc = sw;
  s.sr_acc = overall;
  s.elo = elo;
  return s;
}

TEST(ComputeScoresTest, ThreeOfFourWrongSideFourOfFourRightSide) {
  // Student wrong on q00..q03, right on q04..q07; the judge misses q03 only.
  std::vector<bool> right = {false, false, false, false, true, true, true, true};
  auto s = MakeScenario({{1, 1, 1, 0, 0, 0, 0, 0}}, right);
  auto scores = ComputeScores(s.verdicts, s.split);
  ASSERT_EQ(scores.size(), 1u);
  EXPECT_EQ(scores[0].sw(), 0.75);
  EXPECT_EQ(scores[0].sr(), 1.0);
  EXPECT_EQ(scores[0].overall(), 0.875);
  EXPECT_EQ(scores[0].n_sw, 4u);
  EXPECT_EQ(scores[0].n_sr, 4u);
  EXPECT_FALSE(scores[0].elo);
}

TEST(ComputeScoresTest, AllInvalidScoresZero) {
  auto s = MakeScenario({{2, 2, 2, 2}}, {true, false, true, false});
  auto score = ComputeScores(s.verdicts, s.split).at(0);
  EXPECT_EQ(score.overall(), 0.0);
  EXPECT_EQ(score.sw(), 0.0);
  EXPECT_EQ(score.sr(), 0.0);
}

TEST(ComputeScoresTest, PerfectJudge) {
  auto s = MakeScenario({{0, 1, 0, 1}}, {true, false, true, false});
  auto score = ComputeScores(s.verdicts, s.split).at(0);
  EXPECT_EQ(score.overall(), 1.0);
  EXPECT_EQ(score.sw(), 1.0);
  EXPECT_EQ(score.sr(), 1.0);
}

TEST(ComputeScoresTest, EmptySubsetIsUndefined) {
  auto s = MakeScenario({{0, 0}}, {true, true});
  auto score = ComputeScores(s.verdicts, s.split).at(0);
  EXPECT_FALSE(score.sw_acc);
  EXPECT_EQ(score.n_sw, 0u);
  try {
    score.sw();
    FAIL();
  } catch (const EmptySubset& e) {
    EXPECT_EQ(e.which(), "sw");
  }
  EXPECT_EQ(score.sr(), 1.0);
}

TEST(ComputeScoresTest, EloFilledFromRatings) {
  auto s = MakeScenario({{0, 1}, {1, 1}}, {true, false});
  auto t = RunTournament(s.split, s.verdicts, s.judges);
  auto scores = ComputeScores(s.verdicts, s.split, &t.table);
  EXPECT_EQ(*scores[0].elo, t.table.rating("j0"));
  EXPECT_EQ(*scores[1].elo, t.table.rating("j1"));
}

TEST(ComputeScoresTest, WeightedMeanIdentityOnRandomTables) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 1 + rng() % 30;
    std::vector<bool> right(m);
    for (std::size_t q = 0; q < m; ++q) right[q] = rng() % 2;
    std::vector<std::vector<RawDecision>> d(3, std::vector<RawDecision>(m));
    for (auto& row : d) {
      for (auto& x : row) x = static_cast<RawDecision>(rng() % 3);
    }
    auto s = MakeScenario(d, right);
    for (const auto& score : ComputeScores(s.verdicts, s.split)) {
      EXPECT_EQ(score.correct_total * 1, score.correct_sw + score.correct_sr);
      double weighted = 0;
      if (score.sw_acc) weighted += *score.sw_acc * score.n_sw;
      if (score.sr_acc) weighted += *score.sr_acc * score.n_sr;
      EXPECT_NEAR(score.overall() * (score.n_sw + score.n_sr), weighted, 1e-12);
    }
  }
}

TEST(BuildLeaderboardTest, SortsByOverall) {
  auto b = BuildLeaderboard({Score("b", 0.8, 0.5, 990), Score("a", 0.9, 0.5, 980)},
                            RankingKey::kOverallAcc, "algebra");
  EXPECT_EQ(b.rows[0].judge_id, "a");
  EXPECT_EQ(b.category, "algebra");
}

TEST(BuildLeaderboardTest, TieBrokenByEloThenOverallThenId) {
  auto b = BuildLeaderboard({Score("x", 0.8, 0.5, 990), Score("y", 0.8, 0.5, 1010)},
                            RankingKey::kOverallAcc, "c");
  EXPECT_EQ(b.rows[0].judge_id, "y");
  auto e = BuildLeaderboard({Score("x", 0.7, 0.5, 1000), Score("y", 0.8, 0.5, 1000)},
                            RankingKey::kElo, "c");
  EXPECT_EQ(e.rows[0].judge_id, "y");
  auto i = BuildLeaderboard({Score("n", 0.8, 0.5, 1000), Score("m", 0.8, 0.5, 1000)},
                            RankingKey::kElo, "c");
  EXPECT_EQ(i.rows[0].judge_id, "m");
}

TEST(BuildLeaderboardTest, UndefinedSortsLast) {
  auto b = BuildLeaderboard({Score("rated", 0.5, 0.5, std::nullopt),
                             Score("unrated", 0.5, 0.5, 900)},
                            RankingKey::kElo, "c");
  EXPECT_EQ(b.rows[0].judge_id, "unrated");
}

TEST(BuildLeaderboardTest, PermutationInvariant) {
  std::vector<JudgeScore> scores = {
      Score("a", 0.5, 0.1, 1000), Score("b", 0.5, 0.2, 1000),
      Score("c", 0.9, std::nullopt, std::nullopt), Score("d", 0.5, 0.1, 1001),
      Score("e", 0.1, 0.1, 1200)};
  for (RankingKey key : {RankingKey::kOverallAcc, RankingKey::kElo}) {
    auto reference = BuildLeaderboard(scores, key, "c");
    auto perm = scores;
    std::sort(perm.begin(), perm.end(),
              [](const auto& x, const auto& y) { return x.judge_id < y.judge_id; });
    do {
      EXPECT_EQ(BuildLeaderboard(perm, key, "c"), reference);
    } while (std::next_permutation(
        perm.begin(), perm.end(),
        [](const auto& x, const auto& y) { return x.judge_id < y.judge_id; }));
  }
}

TEST(BuildLeaderboardTest, Errors) {
  EXPECT_THROW(BuildLeaderboard({Score("a", 1, 1, 1), Score("a", 1, 1, 1)},
                                RankingKey::kElo, "c"),
               DuplicateJudge);
  EXPECT_THROW(BuildLeaderboard({}, RankingKey::kElo, "c"), ValidationError);
}

TEST(EmitTest, MarkdownRowFromTableOne) {
  EXPECT_EQ(MarkdownRow(Score("Qwen3_30B_A3B", 0.7789, 0.570, 1070.8), true),
            "| Qwen3_30B_A3B | 0.7789 | 0.570 | 1070.8 |");
}

TEST(EmitTest, MarkdownRowWithoutElo) {
  EXPECT_EQ(MarkdownRow(Score("Qwen3_14B", 0.7789, 0.591, std::nullopt), false),
            "| Qwen3_14B | 0.7789 | 0.591 |");
}

TEST(EmitTest, MarkdownMatchesGoldenFile) {
  auto b = BuildLeaderboard({ScoreFromCounts("beta", 4, 4, 0, 4, 4, 987.6544),
                             ScoreFromCounts("alpha", 4, 4, 3, 4, 7, 1012.3456)},
                            RankingKey::kOverallAcc, "algebra");
  EXPECT_EQ(Emit(b, EmitFormat::kMarkdown), ReadFile(DataPath("leaderboard_2row.md")));
}

TEST(EmitTest, MarkdownUndefinedCellsAndNoEloColumn) {
  auto b = BuildLeaderboard({ScoreFromCounts("solo", 0, 3, 0, 2, 2)},
                            RankingKey::kOverallAcc, "c");
  EXPECT_EQ(Emit(b, EmitFormat::kMarkdown),
            "| Judge | Overall | SW |\n|---|---|---|\n| solo | 0.6667 | \xe2\x80\x94 |\n");
}

TEST(EmitTest, CsvHeaderAndRows) {
  auto b = BuildLeaderboard({ScoreFromCounts("j", 0, 2, 0, 1, 1, 1001.24)},
                            RankingKey::kOverallAcc, "c");
  EXPECT_EQ(Emit(b, EmitFormat::kCsv),
            "judge,overall_acc,sw_acc,sr_acc,elo,n_sw,n_sr\n"
            "j,0.5000,,0.5000,1001.2,0,2\n");
}

TEST(EmitTest, JsonIsCanonicalAndRoundTrips) {
  auto b = BuildLeaderboard({ScoreFromCounts("a", 2, 2, 1, 2, 3, 1012.5),
                             ScoreFromCounts("b", 0, 4, 0, 2, 2)},
                            RankingKey::kElo, "algebra");
  const std::string json = Emit(b, EmitFormat::kJson);
  EXPECT_EQ(json,
            "{\"category\":\"algebra\",\"ranking_key\":\"elo\",\"rows\":[\n"
            "  {\"correct_sr\":2,\"correct_sw\":1,\"correct_total\":3,\"elo\":1012.5,"
            "\"judge\":\"a\",\"n_sr\":2,\"n_sw\":2,\"overall_acc\":0.7500,"
            "\"sr_acc\":1.0000,\"sw_acc\":0.5000},\n"
            "  {\"correct_sr\":2,\"correct_sw\":0,\"correct_total\":2,\"elo\":null,"
            "\"judge\":\"b\",\"n_sr\":4,\"n_sw\":0,\"overall_acc\":0.5000,"
            "\"sr_acc\":0.5000,\"sw_acc\":null}\n"
            "]}\n");
  EXPECT_EQ(ParseLeaderboardJson(json), b);
  EXPECT_EQ(Emit(ParseLeaderboardJson(json), EmitFormat::kJson), json);
}

TEST(EmitTest, ExtensionsAndKeys) {
  EXPECT_EQ(EmitFormatExtension(EmitFormat::kJson), "json");
  EXPECT_EQ(EmitFormatExtension(EmitFormat::kCsv), "csv");
  EXPECT_EQ(EmitFormatExtension(EmitFormat::kMarkdown), "md");
  EXPECT_EQ(ParseRankingKey("elo"), RankingKey::kElo);
  EXPECT_EQ(ParseRankingKey(RankingKeyName(RankingKey::kOverallAcc)),
            RankingKey::kOverallAcc);
  EXPECT_THROW(ParseRankingKey("vibes"), ValidationError);
}

}  // namespace
}  // namespace jury
