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

// Prompt templates and rendering. Template texts are frozen constants; a
// checksum test pins them.

#ifndef JURY_PROMPTING_H_
#define JURY_PROMPTING_H_

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "jury/gateway.h"
#include "jury/verdict.h"

namespace jury {

namespace profiles {
inline constexpr std::string_view kDefault = "default";
inline constexpr std::string_view kLogicalThinker = "logical_thinker";
inline constexpr std::string_view kRobustReasoner = "robust_reasoner";
inline constexpr std::string_view kDeductiveReasoner = "deductive_reasoner";
// Tie-breaking only.
inline constexpr std::string_view kMetaEvaluator = "meta_evaluator";
}  // namespace profiles

// A persona system prompt; `system_text` may contain {task} placeholders.
struct JudgeProfile {
  std::string name;
  std::string system_text;
  bool operator==(const JudgeProfile&) const = default;
};

// Shared instruction text.
extern const std::string_view kJudgeInstructions;
extern const std::string_view kDebateInstructions;
extern const std::string_view kFormatReminder;
extern const std::string_view kRevisionInstructions;

// "My Judgement: ###<token>###"
std::string FormatClause(std::string_view token);

// The five built-in profiles in a fixed order.
const std::vector<JudgeProfile>& BuiltinProfiles();

// Name -> profile lookup seeded with the built-ins. Extra profiles come from
// a JSON object file mapping names to template strings; they may override
// built-ins.
class ProfileRegistry {
 public:
  ProfileRegistry();
  void LoadFile(const std::filesystem::path& path);
  void LoadJson(const nlohmann::json& j);
  void Add(JudgeProfile profile);
  const JudgeProfile& Get(std::string_view name) const;  // UnknownProfile
  bool Contains(std::string_view name) const;

 private:
  std::map<std::string, JudgeProfile, std::less<>> by_name_;
};

struct PromptBundle {
  ChatMessage system;
  ChatMessage user;

  std::vector<ChatMessage> Messages() const { return {system, user}; }
};

std::string SubstituteTask(std::string_view text, std::string_view task);

// Throws EmptyField("question") / EmptyField("candidate_answer").
PromptBundle RenderJudgePrompt(const JudgeProfile& profile,
                               std::string_view task,
                               std::string_view question,
                               std::string_view candidate_answer);

struct DebatePromptOptions {
  // Also state each peer's parsed decision next to its explanation.
  bool include_peer_decisions = false;
};

// Peers are listed sorted by agent name. Throws NoPeers.
ChatMessage RenderDebatePrompt(
    const Verdict& own_verdict,
    const std::vector<std::pair<std::string, Verdict>>& peer_verdicts,
    const DebatePromptOptions& options = {});

// Tie-break request: the question, the candidate answer and every panel
// member's final evaluation, under the meta-evaluator persona.
PromptBundle RenderTieBreakPrompt(
    const JudgeProfile& meta_profile, std::string_view task,
    std::string_view question, std::string_view candidate_answer,
    const std::vector<std::pair<std::string, Verdict>>& panel_verdicts);

}  // namespace jury

#endif  // JURY_PROMPTING_H_
