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

#include "jury/prompting.h"

#include <algorithm>
#include <fstream>

#include "jury/errors.h"

namespace jury {

const std::string_view kJudgeInstructions =
    "You will be provided with the original question, and an answer with "
    "explanations. Your job is to tell whether the provided answer is correct "
    "or not. Give out your final judgement at the end of your evaluation. "
    "Your final judgement should strictly follow the following format: My "
    "Judgement: ###judgement###. Replace the content inside the hashtags with "
    "your judgement, which should be either correct or wrong.";

const std::string_view kDebateInstructions =
    "Given some potential evaluations given by other agents: compare those "
    "with your own evaluations. After reading through their evaluations, "
    "adjust your evaluation if you have found a mistake in it. Whether you "
    "adjust or keep your evaluation, provide a short explanation. Your final "
    "judgement and evaluation of correct or wrong should be based on the "
    "student answer to the original question, not the other agents' "
    "evaluations. The other agents' evaluations are only for reference and "
    "potential adjustments.";

const std::string_view kFormatReminder =
    "Your reply did not end with a judgement in the required format. State "
    "your final judgement exactly as My Judgement: ###judgement###, with "
    "judgement replaced by either correct or wrong.";

const std::string_view kRevisionInstructions =
    "Taking the discussion above into account, give your final evaluation of "
    "the provided answer. You may keep or revise your earlier judgement; "
    "explain briefly why. End with your final judgement in the format My "
    "Judgement: ###judgement###, with judgement replaced by either correct or "
    "wrong.";

namespace {

constexpr std::string_view kDefaultText =
    "You are a judge who assesses whether the question has been answered "
    "correctly. You excel at solving {task} related questions.";

constexpr std::string_view kLogicalThinkerText =
    "You are a logical thinker who excels at breaking down complex problems "
    "into logical steps. Your role is to approach {task} methodically, "
    "ensuring each step follows logically from the previous one. Focus on "
    "clear, logical reasoning and consistency.";

constexpr std::string_view kRobustReasonerText =
    "You are a robust reasoner who excels at tackling complex {task} with "
    "thorough and resilient reasoning. Your role is to ensure that every step "
    "of the problem-solving process is meticulously verified and logically "
    "sound. Focus on providing precise justifications for each step. Your "
    "goal is to develop solutions that are not only correct but also robust "
    "and reliable.";

constexpr std::string_view kDeductiveReasonerText =
    "You are a deductive reasoner who uses deductive logic to derive "
    "conclusions from given premises. Your task is to apply logical rules and "
    "principles to reach sound conclusions, ensuring each step is justified "
    "by the previous one.";

// Project-authored; there is no upstream template for this role.
constexpr std::string_view kMetaEvaluatorText =
    "You are a meta-evaluator who weighs competing judgments and issues a "
    "final ruling. Your role is to compare the evaluations other judges gave "
    "on {task} questions, check their reasoning against the original question "
    "and answer, and decide which evaluation is right.";

std::string PeerBlock(
    std::vector<std::pair<std::string, Verdict>> peers, bool with_decision) {
  std::sort(peers.begin(), peers.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::string out;
  for (const auto& [name, v] : peers) {
    if (!out.empty()) out += "\n\n";
    out += "Agent " + name + ":\n" + v.explanation;
    if (with_decision) {
      out += "\n(Judgement: " + std::string(DecisionName(v.decision)) + ")";
    }
  }
  return out;
}

void RequireNonEmpty(std::string_view question,
                     std::string_view candidate_answer) {
  if (question.empty()) throw EmptyField("question");
  if (candidate_answer.empty()) throw EmptyField("candidate_answer");
}

std::string QuestionAndAnswer(std::string_view question,
                              std::string_view candidate_answer) {
  std::string out(kJudgeInstructions);
  out += "\n\nQuestion:\n";
  out += question;
  out += "\n\nAnswer:\n";
  out += candidate_answer;
  return out;
}

}  // namespace

std::string FormatClause(std::string_view token) {
  return "My Judgement: ###" + std::string(token) + "###";
}

const std::vector<JudgeProfile>& BuiltinProfiles() {
  static const std::vector<JudgeProfile> kProfiles = {
      {std::string(profiles::kDefault), std::string(kDefaultText)},
      {std::string(profiles::kLogicalThinker),
       std::string(kLogicalThinkerText)},
      {std::string(profiles::kRobustReasoner),
       std::string(kRobustReasonerText)},
      {std::string(profiles::kDeductiveReasoner),
       std::string(kDeductiveReasonerText)},
      {std::string(profiles::kMetaEvaluator), std::string(kMetaEvaluatorText)},
  };
  return kProfiles;
}

ProfileRegistry::ProfileRegistry() {
  for (const auto& p : BuiltinProfiles()) by_name_.emplace(p.name, p);
}

void ProfileRegistry::LoadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read profiles file " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("profiles file " + path.string() + ": " + e.what());
  }
  LoadJson(j);
}

void ProfileRegistry::LoadJson(const nlohmann::json& j) {
  if (!j.is_object()) {
    throw ValidationError("profiles must be a JSON object of name -> text");
  }
  for (const auto& [name, text] : j.items()) {
    if (!text.is_string() || text.get<std::string>().empty()) {
      throw ValidationError("profile '" + name + "' must be a non-empty string");
    }
    Add({name, text.get<std::string>()});
  }
}

void ProfileRegistry::Add(JudgeProfile profile) {
  if (profile.name.empty()) throw ValidationError("profile name is empty");
  std::string name = profile.name;
  by_name_.insert_or_assign(std::move(name), std::move(profile));
}

const JudgeProfile& ProfileRegistry::Get(std::string_view name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) throw UnknownProfile(std::string(name));
  return it->second;
}

bool ProfileRegistry::Contains(std::string_view name) const {
  return by_name_.find(name) != by_name_.end();
}

std::string SubstituteTask(std::string_view text, std::string_view task) {
  static constexpr std::string_view kPlaceholder = "{task}";
  std::string out;
  out.reserve(text.size() + task.size());
  std::size_t pos = 0;
  while (true) {
    auto hit = text.find(kPlaceholder, pos);
    if (hit == std::string_view::npos) break;
    out.append(text.substr(pos, hit - pos));
    out.append(task);
    pos = hit + kPlaceholder.size();
  }
  out.append(text.substr(pos));
  return out;
}

PromptBundle RenderJudgePrompt(const JudgeProfile& profile,
                               std::string_view task,
                               std::string_view question,
                               std::string_view candidate_answer) {
  RequireNonEmpty(question, candidate_answer);
  return {ChatMessage::System(SubstituteTask(profile.system_text, task)),
          ChatMessage::User(QuestionAndAnswer(question, candidate_answer))};
}

ChatMessage RenderDebatePrompt(
    const Verdict& own_verdict,
    const std::vector<std::pair<std::string, Verdict>>& peer_verdicts,
    const DebatePromptOptions& options) {
  if (peer_verdicts.empty()) throw NoPeers();
  std::string text(kDebateInstructions);
  text += "\n\nYour previous evaluation:\n";
  text += own_verdict.explanation;
  text += "\n\nEvaluations from other agents:\n\n";
  text += PeerBlock(peer_verdicts, options.include_peer_decisions);
  return ChatMessage::User(std::move(text));
}

PromptBundle RenderTieBreakPrompt(
    const JudgeProfile& meta_profile, std::string_view task,
    std::string_view question, std::string_view candidate_answer,
    const std::vector<std::pair<std::string, Verdict>>& panel_verdicts) {
  RequireNonEmpty(question, candidate_answer);
  std::string text = QuestionAndAnswer(question, candidate_answer);
  text += "\n\nThe panel of judges is split evenly. Their final evaluations:\n\n";
  text += PeerBlock(panel_verdicts, /*with_decision=*/true);
  return {ChatMessage::System(SubstituteTask(meta_profile.system_text, task)),
          ChatMessage::User(std::move(text))};
}

}  // namespace jury
