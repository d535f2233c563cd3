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

// Multi-agent judging: profiled agents give independent verdicts, debate for
// a configurable number of rounds, revise, and the panel resolves by
// majority vote with a tie policy.

#ifndef JURY_MAJ_H_
#define JURY_MAJ_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "jury/corpus.h"
#include "jury/gateway.h"
#include "jury/judge.h"
#include "jury/leaderboard.h"
#include "jury/prompting.h"
#include "jury/verdict.h"

namespace jury {

struct AgentConfig {
  std::string agent_id;
  BackendSpec backend;
  JudgeProfile profile;
  SamplingParams params;
};

enum class TiePolicy { kMetaAgent, kFlag };
enum class Resolution { kMajority, kTieBreaker, kFlagged };

std::string_view TiePolicyName(TiePolicy p);
TiePolicy ParseTiePolicy(std::string_view name);
std::string_view ResolutionName(Resolution r);
Resolution ParseResolution(std::string_view name);

struct DebateRound {
  int round_index = 0;  // 1-based
  std::map<std::string, std::string> replies;  // agent_id -> reply text
  bool operator==(const DebateRound&) const = default;
};

// Every backend call made for one question, in phase order; within a phase
// in panel order.
struct TranscriptCall {
  std::string agent_id;
  std::string phase;  // "initial", "round 1", ..., "revision", "tie_break"
  std::string prompt;
  std::string reply;
  bool cache_hit = false;
  bool operator==(const TranscriptCall&) const = default;
};

struct DebateTranscript {
  std::string question_id;
  std::map<std::string, Verdict> initial;
  std::vector<DebateRound> rounds;
  std::map<std::string, Verdict> revised;
  std::optional<Decision> collective;  // absent iff flagged
  Resolution resolution = Resolution::kFlagged;
  std::optional<Verdict> tie_breaker_verdict;
  std::vector<TranscriptCall> calls;

  bool operator==(const DebateTranscript&) const = default;
};

nlohmann::json TranscriptToJson(const DebateTranscript& t);
DebateTranscript TranscriptFromJson(const nlohmann::json& j);

struct DebateSettings {
  int rounds = 1;
  TiePolicy tie_policy = TiePolicy::kMetaAgent;
  std::optional<AgentConfig> tie_breaker;
  std::string task = "math";
  int max_reprompts = 1;
  DebatePromptOptions prompt;
  // Agent calls within a phase run concurrently up to this many threads.
  int phase_workers = 1;
};

// Throws PanelTooSmall or ValidationError (duplicate ids). Returns warnings,
// e.g. for even-sized panels where ties are likely.
std::vector<std::string> ValidatePanel(const std::vector<AgentConfig>& panel);

// Agents keep their own conversation history across phases. With rounds = 0
// the revised verdicts are the initial ones. Backend errors propagate.
DebateTranscript RunDebate(ChatClient& client,
                           const std::vector<AgentConfig>& panel,
                           const QuestionRecord& record,
                           const DebateSettings& settings);

struct VoteResult {
  std::optional<Decision> collective;
  Resolution resolution = Resolution::kFlagged;
  std::optional<Verdict> tie_breaker_verdict;
  std::vector<TranscriptCall> calls;
};

// Strict majority over non-invalid decisions wins. A tie goes to the
// tie-breaker (meta_agent) or is flagged. No valid decision, or an
// unparseable tie-breaker reply, is flagged. Throws MissingTieBreaker when
// the policy is meta_agent and no tie-breaker is given.
VoteResult ResolveVote(ChatClient& client,
                       const std::map<std::string, Verdict>& revised,
                       TiePolicy tie_policy, const AgentConfig* tie_breaker,
                       const QuestionRecord& record, std::string_view task,
                       int max_reprompts = 1);

// The panel scored as one composite judge; flagged questions are
// non-matches. Throws CoverageGap.
JudgeScore ScoreMaj(const std::vector<DebateTranscript>& transcripts,
                    const BalancedSplit& split, std::string panel_id = "maj",
                    std::optional<double> elo = std::nullopt);

}  // namespace jury

#endif  // JURY_MAJ_H_
