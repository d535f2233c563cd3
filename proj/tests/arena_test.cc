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

#include <random>

#include <gtest/gtest.h>

#include "jury/errors.h"
#include "oracles.h"
#include "test_util.h"

namespace jury {
namespace {

using testing::Graded;
using testing::MakeScenario;
using testing::MakeVerdict;
using testing::RawDecision;
using testing::ReferenceElo;

TEST(EloMathTest, ExpectedScore) {
  EXPECT_EQ(ExpectedScore(1000, 1000), 0.5);
  EXPECT_NEAR(ExpectedScore(1000, 1400), 1.0 / 11.0, 1e-12);
  EXPECT_NEAR(ExpectedScore(1400, 1000), 10.0 / 11.0, 1e-12);
}

TEST(EloMathTest, ExpectedScoreComplements) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> r(200, 2200);
  for (int i = 0; i < 1000; ++i) {
    const double a = r(rng);
    const double b = r(rng);
    const double e = ExpectedScore(a, b);
    EXPECT_GT(e, 0.0);
    EXPECT_LT(e, 1.0);
    EXPECT_NEAR(e + ExpectedScore(b, a), 1.0, 1e-15);
  }
}

TEST(EloMathTest, UpdateRating) {
  EXPECT_EQ(UpdateRating(1000, 0.5, 0.5, 10), 1000);
  // 1000 + 10 * (10/11) and 1000 - 10 * (10/11).
  EXPECT_NEAR(UpdateRating(1000, 1, 1.0 / 11.0, 10), 1009.0909090909091, 1e-9);
  EXPECT_NEAR(UpdateRating(1000, 0, 10.0 / 11.0, 10), 990.9090909090909, 1e-9);
}

TEST(MatchOutcomeTest, Rules) {
  auto right = Graded("q", true);
  auto c = MakeVerdict("a", "q", Decision::kCorrect);
  auto w = MakeVerdict("b", "q", Decision::kWrong);
  auto inv = MakeVerdict("b", "q", Decision::kInvalid);
  EXPECT_EQ(MatchOutcome(c, w, right), 1.0);
  EXPECT_EQ(MatchOutcome(w, c, right), 0.0);
  EXPECT_EQ(MatchOutcome(c, c, right), 0.5);
  EXPECT_EQ(MatchOutcome(w, w, right), 0.5);
  EXPECT_EQ(MatchOutcome(inv, c, right), 0.0);
  EXPECT_EQ(MatchOutcome(inv, inv, right), 0.5);
  EXPECT_EQ(MatchOutcome(inv, w, right), 0.5);
  EXPECT_THROW(MatchOutcome(c, MakeVerdict("b", "other", Decision::kWrong), right),
               QuestionMismatch);
}

TEST(RatingTableTest, PlayIsZeroSum) {
  RatingTable t({"a", "b"});
  auto m = t.Play("q", "a", "b", 1.0);
  EXPECT_EQ(m.e_a, 0.5);
  EXPECT_EQ(m.delta_a, 5.0);
  EXPECT_EQ(t.rating("a"), 1005.0);
  EXPECT_EQ(t.rating("b"), 995.0);
  EXPECT_EQ(m.s_b(), 0.0);
  EXPECT_EQ(m.delta_b(), -5.0);
  EXPECT_EQ(t.match_count("a"), 1u);
  EXPECT_THROW(t.Play("q", "a", "b", 0.7), ValidationError);
  EXPECT_THROW(t.Play("q", "a", "a", 1.0), ValidationError);
  EXPECT_THROW(RatingTable({"a", "a"}), DuplicateJudge);
}

TEST(RatingTableTest, ConservationOverRandomMatches) {
  std::vector<std::string> judges;
  for (int i = 0; i < 8; ++i) judges.push_back("j" + std::to_string(i));
  RatingTable t(judges);
  std::mt19937_64 rng(3);
  const double scores[] = {0.0, 0.5, 1.0};
  for (int i = 0; i < 100000; ++i) {
    std::size_t a = rng() % 8;
    std::size_t b = rng() % 7;
    if (b >= a) ++b;
    t.Play("q", judges[a], judges[b], scores[rng() % 3]);
  }
  EXPECT_NEAR(t.Total(), 8000.0, 1e-9);
}

TEST(RatingTableTest, JsonRoundTrip) {
  RatingTable t({"x", "y"}, {16, 1500});
  t.Play("q", "x", "y", 0.0);
  RatingTable back = RatingTable::FromJson(t.ToJson());
  EXPECT_EQ(back.ratings(), t.ratings());
  EXPECT_EQ(back.k_factor(), 16);
  EXPECT_EQ(back.initial_rating(), 1500);
  EXPECT_EQ(back.match_count("x"), 1u);
}

TEST(TournamentTest, AlwaysRightVersusNeverRight) {
  // j0 always matches gold, j1 never does, ten student-right questions.
  std::vector<std::vector<RawDecision>> d = {std::vector<RawDecision>(10, 0),
                                             std::vector<RawDecision>(10, 1)};
  std::vector<bool> right(10, true);
  auto s = MakeScenario(d, right);
  auto t = RunTournament(s.split, s.verdicts, s.judges);
  double gain = 0;
  double r0 = 1000;
  double r1 = 1000;
  for (int i = 0; i < 10; ++i) {
    const double e = 1.0 / (1.0 + std::pow(10.0, (r1 - r0) / 400.0));
    gain += 10 * (1 - e);
    r0 += 10 * (1 - e);
    r1 -= 10 * (1 - e);
  }
  EXPECT_NEAR(t.table.rating("j0"), 1000 + gain, 1e-9);
  EXPECT_NEAR(t.table.Total(), 2000.0, 1e-9);
  EXPECT_EQ(t.matches.size(), 10u);
}

TEST(TournamentTest, IdenticalJudgesStayPut) {
  std::vector<std::vector<RawDecision>> d = {{0, 1, 0, 2}, {0, 1, 0, 2}};
  auto s = MakeScenario(d, {true, false, false, true});
  auto t = RunTournament(s.split, s.verdicts, s.judges);
  EXPECT_EQ(t.table.rating("j0"), 1000.0);
  EXPECT_EQ(t.table.rating("j1"), 1000.0);
  for (const auto& m : t.matches) EXPECT_EQ(m.s_a, 0.5);
}

TEST(TournamentTest, ScheduleOrderAndDeterminism) {
  std::vector<std::vector<RawDecision>> d = {{0, 1}, {1, 1}, {0, 0}};
  auto s = MakeScenario(d, {true, false});
  // Judge order given to the tournament does not matter.
  auto t1 = RunTournament(s.split, s.verdicts, {"j2", "j0", "j1"});
  auto t2 = RunTournament(s.split, s.verdicts, {"j0", "j1", "j2"});
  EXPECT_EQ(t1.matches, t2.matches);
  EXPECT_EQ(t1.table.ratings(), t2.table.ratings());
  std::vector<std::tuple<std::string, std::string, std::string>> order;
  for (const auto& m : t1.matches) order.emplace_back(m.question_id, m.judge_a, m.judge_b);
  const std::vector<std::tuple<std::string, std::string, std::string>> expected = {
      {"q00", "j0", "j1"}, {"q00", "j0", "j2"}, {"q00", "j1", "j2"},
      {"q01", "j0", "j1"}, {"q01", "j0", "j2"}, {"q01", "j1", "j2"}};
  EXPECT_EQ(order, expected);
}

TEST(TournamentTest, MatchesReferenceOnRandomTables) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng() % 4;
    const std::size_t m = 1 + rng() % 12;
    std::vector<std::vector<RawDecision>> d(n, std::vector<RawDecision>(m));
    for (auto& row : d) {
      for (auto& x : row) x = static_cast<RawDecision>(rng() % 3);
    }
    std::vector<bool> right(m);
    for (std::size_t q = 0; q < m; ++q) right[q] = rng() % 2;
    auto s = MakeScenario(d, right);
    auto t = RunTournament(s.split, s.verdicts, s.judges);
    auto ref = ReferenceElo(d, right, 10, 1000);
    ASSERT_EQ(t.matches.size(), ref.matches.size());
    for (std::size_t j = 0; j < n; ++j) {
      EXPECT_EQ(t.table.rating(s.judges[j]), ref.ratings[j]);
    }
    for (std::size_t i = 0; i < ref.matches.size(); ++i) {
      EXPECT_EQ(t.matches[i].s_a, ref.matches[i].s_a);
      EXPECT_EQ(t.matches[i].e_a, ref.matches[i].e_a);
      EXPECT_EQ(t.matches[i].delta_a, ref.matches[i].delta_a);
    }
  }
}

TEST(TournamentTest, AntisymmetryOfEveryMatch) {
  std::vector<std::vector<RawDecision>> d = {{0, 1, 2, 0}, {1, 1, 0, 2}, {2, 0, 0, 1}};
  auto s = MakeScenario(d, {true, false, true, false});
  for (const auto& m : RunTournament(s.split, s.verdicts, s.judges).matches) {
    EXPECT_EQ(m.s_a + m.s_b(), 1.0);
    EXPECT_NEAR(m.e_a + m.e_b(), 1.0, 1e-15);
    EXPECT_EQ(m.delta_a, -m.delta_b());
  }
}

// Flipping any single non-matching verdict of a judge to a matching one
// never lowers that judge's final rating.
void CheckMonotone(std::size_t n, std::size_t m, std::uint64_t cases,
                   std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::uint64_t total = 1ULL << (n * m);
  const bool exhaustive = cases >= total;
  const std::uint64_t count = exhaustive ? total : cases;
  std::vector<bool> right(m);
  for (std::size_t q = 0; q < m; ++q) right[q] = q % 2 == 0;
  for (std::uint64_t c = 0; c < count; ++c) {
    const std::uint64_t bits = exhaustive ? c : rng() % total;
    std::vector<std::vector<RawDecision>> d(n, std::vector<RawDecision>(m));
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t q = 0; q < m; ++q) {
        d[j][q] = static_cast<RawDecision>((bits >> (j * m + q)) & 1);
      }
    }
    const auto base = ReferenceElo(d, right, 10, 1000);
    auto s = MakeScenario(d, right);
    const auto lib = RunTournament(s.split, s.verdicts, s.judges);
    for (std::size_t j = 0; j < n; ++j) {
      ASSERT_EQ(lib.table.rating(s.judges[j]), base.ratings[j]);
      for (std::size_t q = 0; q < m; ++q) {
        const bool hits = (d[j][q] == 0) == right[q];
        if (hits) continue;
        auto flipped = d;
        flipped[j][q] = right[q] ? 0 : 1;
        auto fs = MakeScenario(flipped, right);
        const double after =
            RunTournament(fs.split, fs.verdicts, fs.judges).table.rating(fs.judges[j]);
        ASSERT_GE(after, base.ratings[j]) << "judge " << j << " question " << q;
      }
    }
  }
}

TEST(TournamentTest, MonotoneExhaustiveThreeByFour) { CheckMonotone(3, 4, 1 << 12, 0); }
TEST(TournamentTest, MonotoneExhaustiveTwoBySix) { CheckMonotone(2, 6, 1 << 12, 0); }
TEST(TournamentTest, MonotoneSampledFourBySix) { CheckMonotone(4, 6, 300, 42); }

TEST(TournamentTest, BernoulliJudgesRankedByAccuracy) {
  std::mt19937_64 rng(2026);
  std::bernoulli_distribution coin(0.5);
  const double acc[] = {0.9, 0.7, 0.5};
  const std::size_t m = 200;
  std::vector<bool> right(m);
  for (std::size_t q = 0; q < m; ++q) right[q] = coin(rng);
  std::vector<std::vector<RawDecision>> d(3, std::vector<RawDecision>(m));
  for (std::size_t j = 0; j < 3; ++j) {
    std::bernoulli_distribution hit(acc[j]);
    for (std::size_t q = 0; q < m; ++q) {
      const bool h = hit(rng);
      d[j][q] = (h == right[q]) ? 0 : 1;
    }
  }
  auto s = MakeScenario(d, right);
  auto t = RunTournament(s.split, s.verdicts, s.judges);
  EXPECT_GT(t.table.rating("j0"), t.table.rating("j1"));
  EXPECT_GT(t.table.rating("j1"), t.table.rating("j2"));
}

TEST(TournamentTest, MissingVerdict) {
  auto s = MakeScenario({{0, 1}, {1, 0}}, {true, false});
  s.verdicts.erase({"j1", "q01"});
  try {
    RunTournament(s.split, s.verdicts, s.judges);
    FAIL();
  } catch (const MissingVerdict& e) {
    EXPECT_EQ(e.judge(), "j1");
    EXPECT_EQ(e.question(), "q01");
  }
  EXPECT_THROW(RunTournament(s.split, s.verdicts, {}), ValidationError);
  EXPECT_THROW(RunTournament(s.split, s.verdicts, {"j0", "j0"}), DuplicateJudge);
}

TEST(TournamentTest, MatchLogJsonRoundTrip) {
  auto s = MakeScenario({{0, 1}, {1, 2}}, {true, false});
  for (const auto& m : RunTournament(s.split, s.verdicts, s.judges).matches) {
    EXPECT_EQ(MatchResultFromJson(nlohmann::json::parse(MatchResultToJson(m).dump())), m);
  }
}

}  // namespace
}  // namespace jury
