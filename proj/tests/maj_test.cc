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

#include "jury/maj.h"

#include <gtest/gtest.h>

#include "jury/errors.h"
#include "jury/judge.h"
#include "oracles.h"
#include "test_util.h"

namespace jury {
namespace {

using testing::Graded;
using testing::MakeVerdict;
using testing::RawDecision;
using testing::ReferenceMajority;

constexpr std::string_view kDebateMarker = "Given some potential evaluations";
constexpr std::string_view kRevisionMarker = "Taking the discussion above";

std::string Says(std::string_view token) {
  return "Reasoning.\n" + FormatClause(token);
}

QuestionRecord Record() {
  QuestionRecord r = Graded("q1", true);
  r.question = "Is 2+2 equal to 4?";
  r.student_answer = "Yes, \\boxed{4}.";
  return r;
}

AgentConfig Agent(std::string id, BackendSpec backend,
                  std::string_view profile = "default") {
  ProfileRegistry reg;
  return AgentConfig{std::move(id), std::move(backend), reg.Get(profile), {}};
}

// An agent that answers `initial` first, `debate` during rounds and
// `revised` when asked to revise.
AgentConfig Scripted(std::string id, std::string initial, std::string debate,
                     std::string revised) {
  MockScript s;
  s.rules = {{{std::string(kRevisionMarker)}, std::move(revised)},
             {{std::string(kDebateMarker)}, std::move(debate)}};
  s.default_reply = std::move(initial);
  return Agent(id, MockFromScript(s, id));
}

AgentConfig Constant(std::string id, std::string reply) {
  return Agent(id, ScriptedMock({}, std::move(reply), id));
}

DebateSettings Settings(int rounds, TiePolicy policy = TiePolicy::kFlag) {
  DebateSettings s;
  s.rounds = rounds;
  s.tie_policy = policy;
  return s;
}

TEST(RunDebateTest, UnanimousCorrect) {
  ChatClient client;
  std::vector<AgentConfig> panel = {Constant("a", Says("correct")),
                                    Constant("b", Says("correct")),
                                    Constant("c", Says("correct"))};
  auto t = RunDebate(client, panel, Record(), Settings(1));
  EXPECT_EQ(t.collective, Decision::kCorrect);
  EXPECT_EQ(t.resolution, Resolution::kMajority);
  EXPECT_EQ(t.rounds.size(), 1u);
  EXPECT_EQ(t.initial.size(), 3u);
  EXPECT_EQ(t.revised.size(), 3u);
}

TEST(RunDebateTest, ScriptedFlipAfterSeeingPeers) {
  ChatClient client;
  std::vector<AgentConfig> panel = {
      Constant("a", Says("correct")), Constant("b", Says("correct")),
      Scripted("c", Says("wrong"), "The others convinced me. " + FormatClause("correct"),
               Says("correct"))};
  auto t = RunDebate(client, panel, Record(), Settings(1));
  EXPECT_EQ(t.initial.at("c").decision, Decision::kWrong);
  EXPECT_NE(t.rounds[0].replies.at("c").find("convinced"), std::string::npos);
  for (const auto& [id, v] : t.revised) EXPECT_EQ(v.decision, Decision::kCorrect) << id;
  EXPECT_EQ(t.collective, Decision::kCorrect);
  EXPECT_EQ(t.resolution, Resolution::kMajority);
}

TEST(RunDebateTest, AgentsKeepHistoryAndSeePeers) {
  ChatClient client;
  std::vector<std::vector<ChatMessage>> seen;
  std::mutex mu;
  client.set_call_hook([&](const BackendSpec& b, std::span<const ChatMessage> m) {
    std::lock_guard lock(mu);
    if (b.model_name == "c") seen.emplace_back(m.begin(), m.end());
  });
  std::vector<AgentConfig> panel = {Constant("a", "A-explains " + FormatClause("correct")),
                                    Constant("b", "B-explains " + FormatClause("wrong")),
                                    Constant("c", "C-explains " + FormatClause("correct"))};
  RunDebate(client, panel, Record(), Settings(1));
  ASSERT_EQ(seen.size(), 3u);  // initial, round 1, revision
  const auto& debate = seen[1];
  ASSERT_EQ(debate.size(), 4u);
  const std::string& prompt = debate.back().content;
  EXPECT_NE(prompt.find("A-explains"), std::string::npos);
  EXPECT_NE(prompt.find("B-explains"), std::string::npos);
  EXPECT_LT(prompt.find("A-explains"), prompt.find("B-explains"));
  EXPECT_EQ(seen[2].size(), 6u);
  EXPECT_EQ(seen[2][0].role, Role::kSystem);
}

TEST(RunDebateTest, ZeroRoundsVotesOnInitialVerdicts) {
  ChatClient client;
  std::vector<AgentConfig> panel = {Constant("a", Says("wrong")),
                                    Constant("b", Says("wrong")),
                                    Constant("c", Says("correct"))};
  auto t = RunDebate(client, panel, Record(), Settings(0));
  EXPECT_TRUE(t.rounds.empty());
  EXPECT_EQ(t.revised, t.initial);
  EXPECT_EQ(t.collective, Decision::kWrong);
  EXPECT_EQ(client.stats().backend_calls, 3u);
}

TEST(RunDebateTest, UnanimityStableForAnyRoundCount) {
  for (int rounds = 0; rounds <= 3; ++rounds) {
    ChatClient client;
    std::vector<AgentConfig> panel = {Constant("a", Says("wrong")),
                                      Constant("b", Says("wrong")),
                                      Constant("c", Says("wrong"))};
    auto t = RunDebate(client, panel, Record(), Settings(rounds));
    EXPECT_EQ(t.collective, Decision::kWrong);
    EXPECT_EQ(t.rounds.size(), static_cast<std::size_t>(rounds));
  }
}

TEST(RunDebateTest, TranscriptRecordsEveryBackendCall) {
  ChatClient client;
  std::vector<AgentConfig> panel = {Constant("a", Says("wrong")),
                                    Constant("b", Says("correct")),
                                    Constant("c", "no marker at all"),
                                    Constant("d", "still no marker")};
  DebateSettings s = Settings(2, TiePolicy::kMetaAgent);
  s.tie_breaker = Constant("meta", Says("wrong"));
  s.tie_breaker->profile = ProfileRegistry().Get("meta_evaluator");
  s.phase_workers = 4;
  auto t = RunDebate(client, panel, Record(), s);
  EXPECT_EQ(t.calls.size(), client.stats().backend_calls);
  EXPECT_EQ(t.calls.front().phase, "initial");
  EXPECT_EQ(t.calls.back().phase, "tie_break");
  // One correct, one wrong, two invalid: the meta agent decides.
  EXPECT_EQ(t.resolution, Resolution::kTieBreaker);
  EXPECT_EQ(t.collective, Decision::kWrong);
}

TEST(RunDebateTest, DeterministicTranscripts) {
  auto run = [] {
    ChatClient client;
    std::vector<AgentConfig> panel = {
        Constant("a", Says("correct")), Constant("b", Says("wrong")),
        Scripted("c", Says("wrong"), Says("correct"), Says("correct"))};
    DebateSettings s = Settings(1);
    s.phase_workers = 3;
    return TranscriptToJson(RunDebate(client, panel, Record(), s)).dump();
  };
  EXPECT_EQ(run(), run());
}

TEST(RunDebateTest, PanelValidation) {
  ChatClient client;
  EXPECT_THROW(RunDebate(client, {Constant("a", "x")}, Record(), Settings(1)),
               PanelTooSmall);
  EXPECT_THROW(ValidatePanel({Constant("a", "x"), Constant("a", "y")}),
               ValidationError);
  EXPECT_FALSE(ValidatePanel({Constant("a", "x"), Constant("b", "y")}).empty());
  EXPECT_TRUE(ValidatePanel({Constant("a", "x"), Constant("b", "y"),
                             Constant("c", "z")})
                  .empty());
}

std::map<std::string, Verdict> Revised(const std::vector<RawDecision>& ds) {
  std::map<std::string, Verdict> out;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const Decision d = ds[i] == 0   ? Decision::kCorrect
                       : ds[i] == 1 ? Decision::kWrong
                                    : Decision::kInvalid;
    std::string id = "agent" + std::to_string(i);
    out.emplace(id, MakeVerdict(id, "q1", d));
  }
  return out;
}

TEST(ResolveVoteTest, TwoOfThree) {
  ChatClient client;
  auto v = ResolveVote(client, Revised({0, 0, 1}), TiePolicy::kFlag, nullptr,
                       Record(), "math");
  EXPECT_EQ(v.collective, Decision::kCorrect);
  EXPECT_EQ(v.resolution, Resolution::kMajority);
}

TEST(ResolveVoteTest, TieFlagged) {
  ChatClient client;
  auto v = ResolveVote(client, Revised({0, 1}), TiePolicy::kFlag, nullptr,
                       Record(), "math");
  EXPECT_FALSE(v.collective);
  EXPECT_EQ(v.resolution, Resolution::kFlagged);
  EXPECT_EQ(client.stats().backend_calls, 0u);
}

TEST(ResolveVoteTest, TieGoesToMetaAgent) {
  ChatClient client;
  AgentConfig meta = Agent("meta", ScriptedMock({}, Says("wrong")), "meta_evaluator");
  auto v = ResolveVote(client, Revised({0, 1}), TiePolicy::kMetaAgent, &meta,
                       Record(), "math");
  EXPECT_EQ(v.collective, Decision::kWrong);
  EXPECT_EQ(v.resolution, Resolution::kTieBreaker);
  ASSERT_TRUE(v.tie_breaker_verdict);
  EXPECT_EQ(v.tie_breaker_verdict->judge_id, "meta");
  ASSERT_FALSE(v.calls.empty());
  EXPECT_NE(v.calls[0].prompt.find("Is 2+2 equal to 4?"), std::string::npos);
}

TEST(ResolveVoteTest, InvalidTieBreakerIsFlagged) {
  ChatClient client;
  AgentConfig meta = Agent("meta", ScriptedMock({}, "no idea"), "meta_evaluator");
  auto v = ResolveVote(client, Revised({0, 1}), TiePolicy::kMetaAgent, &meta,
                       Record(), "math");
  EXPECT_EQ(v.resolution, Resolution::kFlagged);
  EXPECT_FALSE(v.collective);
}

TEST(ResolveVoteTest, MissingTieBreaker) {
  ChatClient client;
  EXPECT_THROW(ResolveVote(client, Revised({0, 0, 1}), TiePolicy::kMetaAgent,
                           nullptr, Record(), "math"),
               MissingTieBreaker);
}

TEST(ResolveVoteTest, AllInvalidFlagged) {
  ChatClient client;
  AgentConfig meta = Agent("meta", ScriptedMock({}, Says("wrong")), "meta_evaluator");
  auto v = ResolveVote(client, Revised({2, 2, 2}), TiePolicy::kMetaAgent, &meta,
                       Record(), "math");
  EXPECT_EQ(v.resolution, Resolution::kFlagged);
  EXPECT_EQ(client.stats().backend_calls, 0u);
}

TEST(ResolveVoteTest, AgreesWithReferenceCounterUpToFive) {
  AgentConfig meta = Agent("meta", ScriptedMock({}, Says("correct")), "meta_evaluator");
  for (int size = 1; size <= 5; ++size) {
    // Every multiset of size `size` over {correct, wrong, invalid}.
    for (int c = 0; c <= size; ++c) {
      for (int w = 0; c + w <= size; ++w) {
        std::vector<RawDecision> ds(c, 0);
        ds.insert(ds.end(), w, 1);
        ds.insert(ds.end(), size - c - w, 2);
        const int expected = ReferenceMajority(ds);
        for (TiePolicy policy : {TiePolicy::kFlag, TiePolicy::kMetaAgent}) {
          ChatClient client;
          auto v = ResolveVote(client, Revised(ds), policy, &meta, Record(), "math");
          SCOPED_TRACE(::testing::Message() << "c=" << c << " w=" << w << " n=" << size);
          if (expected >= 0) {
            EXPECT_EQ(v.resolution, Resolution::kMajority);
            EXPECT_EQ(v.collective, expected == 0 ? Decision::kCorrect : Decision::kWrong);
          } else if (expected == -2 || policy == TiePolicy::kFlag) {
            EXPECT_EQ(v.resolution, Resolution::kFlagged);
            EXPECT_FALSE(v.collective);
          } else {
            EXPECT_EQ(v.resolution, Resolution::kTieBreaker);
            EXPECT_EQ(v.collective, Decision::kCorrect);
          }
        }
      }
    }
  }
}

DebateTranscript Transcript(const std::string& qid, std::optional<Decision> d) {
  DebateTranscript t;
  t.question_id = qid;
  t.collective = d;
  t.resolution = d ? Resolution::kMajority : Resolution::kFlagged;
  return t;
}

TEST(ScoreMajTest, RatioOverFixtureCounts) {
  // 93 + 93 questions; the panel misses 21 of them.
  std::vector<QuestionRecord> records;
  std::vector<DebateTranscript> ts;
  for (int i = 0; i < 186; ++i) {
    const bool right = i % 2 == 0;
    auto r = Graded((i < 10 ? "q00" : i < 100 ? "q0" : "q") + std::to_string(i), right);
    const bool hit = i >= 21;
    ts.push_back(Transcript(r.id, (hit == right) ? Decision::kCorrect : Decision::kWrong));
    records.push_back(r);
  }
  auto split = SplitFromRecords(records);
  auto s = ScoreMaj(ts, split);
  EXPECT_EQ(s.correct_total, 165u);
  EXPECT_NEAR(s.overall(), 0.8871, 5e-5);
  EXPECT_EQ(s.judge_id, "maj");
}

TEST(ScoreMajTest, FlaggedCountAsMisses) {
  auto split = SplitFromRecords({Graded("a", true), Graded("b", false)});
  auto s = ScoreMaj({Transcript("a", std::nullopt), Transcript("b", std::nullopt)}, split);
  EXPECT_EQ(s.overall(), 0.0);
}

TEST(ScoreMajTest, CoverageGapAndDuplicates) {
  auto split = SplitFromRecords({Graded("a", true), Graded("b", false)});
  try {
    ScoreMaj({Transcript("a", Decision::kCorrect)}, split);
    FAIL();
  } catch (const CoverageGap& e) {
    EXPECT_EQ(e.question_id(), "b");
  }
  EXPECT_THROW(ScoreMaj({Transcript("a", Decision::kCorrect),
                         Transcript("a", Decision::kCorrect),
                         Transcript("b", Decision::kCorrect)},
                        split),
               ValidationError);
}

TEST(TranscriptJsonTest, RoundTrip) {
  ChatClient client;
  std::vector<AgentConfig> panel = {Constant("a", Says("correct")),
                                    Constant("b", Says("wrong"))};
  DebateSettings s = Settings(1, TiePolicy::kMetaAgent);
  s.tie_breaker = Agent("meta", ScriptedMock({}, Says("wrong")), "meta_evaluator");
  auto t = RunDebate(client, panel, Record(), s);
  EXPECT_EQ(t.resolution, Resolution::kTieBreaker);
  EXPECT_EQ(TranscriptFromJson(TranscriptToJson(t)), t);
}

}  // namespace
}  // namespace jury
