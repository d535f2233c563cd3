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

// The model-as-judge protocol for a single (judge, question) pair.

#ifndef JURY_JUDGE_H_
#define JURY_JUDGE_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jury/corpus.h"
#include "jury/gateway.h"
#include "jury/prompting.h"
#include "jury/verdict.h"

namespace jury {

// Finds the last "My Judgement: ###token###" (case-insensitive, "Judgment"
// accepted, optional markdown emphasis around the colon) and maps the
// trimmed, lowercased token to correct/wrong. Throws NoMarker or
// UnrecognizedToken.
Decision ParseVerdict(std::string_view reply);

// Non-throwing variant; nullopt where ParseVerdict would throw.
std::optional<Decision> TryParseVerdict(std::string_view reply);

// One request/reply pair within a conversation.
struct Exchange {
  std::string prompt;  // content of the last user message sent
  std::string reply;
  bool cache_hit = false;
};

struct ConversationOutcome {
  Decision decision = Decision::kInvalid;
  std::string reply;  // last reply
  int attempts = 0;
  bool all_cache_hits = true;
  std::vector<Exchange> exchanges;
};

// Sends `history` (ending in a user turn), appends the reply, and on a parse
// failure appends a format reminder and retries up to `max_reprompts` times.
// Backend errors propagate.
ConversationOutcome ConverseForVerdict(ChatClient& client,
                                       const BackendSpec& backend,
                                       std::vector<ChatMessage>& history,
                                       const SamplingParams& params,
                                       int max_reprompts);

struct JudgeOptions {
  std::string judge_id;
  std::string task = "math";
  int max_reprompts = 1;
};

// Parse failures are not errors: they yield Decision::kInvalid.
// Throws MissingStudentAnswer.
Verdict CollectJudgment(ChatClient& client, const BackendSpec& backend,
                        const JudgeProfile& profile,
                        const QuestionRecord& record,
                        const SamplingParams& params,
                        const JudgeOptions& options);

// Same, also returning the conversation for callers that continue it.
Verdict CollectJudgment(ChatClient& client, const BackendSpec& backend,
                        const JudgeProfile& profile,
                        const QuestionRecord& record,
                        const SamplingParams& params,
                        const JudgeOptions& options,
                        std::vector<ChatMessage>& history,
                        std::vector<Exchange>* exchanges);

// Invalid verdicts never match. Throws UngradedRecord.
bool JudgmentMatchesGold(const Verdict& v, const QuestionRecord& record);

}  // namespace jury

#endif  // JURY_JUDGE_H_
