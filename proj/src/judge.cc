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

#include "jury/judge.h"

#include <cctype>

#include "jury/errors.h"

namespace jury {

std::string_view DecisionName(Decision d) {
  switch (d) {
    case Decision::kCorrect:
      return "correct";
    case Decision::kWrong:
      return "wrong";
    case Decision::kInvalid:
      return "invalid";
  }
  return "invalid";
}

Decision ParseDecisionName(std::string_view name) {
  if (name == "correct") return Decision::kCorrect;
  if (name == "wrong") return Decision::kWrong;
  if (name == "invalid") return Decision::kInvalid;
  throw ValidationError("unknown decision: " + std::string(name));
}

nlohmann::json VerdictToJson(const Verdict& v) {
  return {{"decision", DecisionName(v.decision)},
          {"explanation", v.explanation},
          {"judge_id", v.judge_id},
          {"profile_name", v.profile_name},
          {"question_id", v.question_id},
          {"attempt_count", v.attempt_count},
          {"cache_hit", v.cache_hit},
          {"collected_at", v.collected_at}};
}

Verdict VerdictFromJson(const nlohmann::json& j) {
  Verdict v;
  try {
    v.decision = ParseDecisionName(j.at("decision").get<std::string>());
    v.explanation = j.at("explanation").get<std::string>();
    v.judge_id = j.at("judge_id").get<std::string>();
    v.profile_name = j.value("profile_name", std::string());
    v.question_id = j.at("question_id").get<std::string>();
    v.attempt_count = j.value("attempt_count", 1);
    v.cache_hit = j.value("cache_hit", false);
    v.collected_at = j.value("collected_at", std::string());
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("verdict: ") + e.what());
  }
  return v;
}

namespace {

struct Marker {
  std::string token;  // trimmed, original case
};

bool IsBlank(char c) { return std::isspace(static_cast<unsigned char>(c)); }

// Tries to match the full judgement pattern at `p`, where lower[p..] starts
// with "my". Returns the token on success.
std::optional<Marker> MatchAt(std::string_view reply, std::string_view lower,
                              std::size_t p) {
  std::size_t i = p + 2;
  const std::size_t n = lower.size();
  std::size_t ws = i;
  while (i < n && IsBlank(lower[i])) ++i;
  if (i == ws) return std::nullopt;
  if (lower.compare(i, 9, "judgement") == 0) {
    i += 9;
  } else if (lower.compare(i, 8, "judgment") == 0) {
    i += 8;
  } else {
    return std::nullopt;
  }
  while (i < n && (lower[i] == ' ' || lower[i] == '*')) ++i;
  if (i >= n || lower[i] != ':') return std::nullopt;
  ++i;
  while (i < n && (IsBlank(lower[i]) || lower[i] == '*')) ++i;
  if (lower.compare(i, 3, "###") != 0) return std::nullopt;
  i += 3;
  const std::size_t tok_start = i;
  while (i < n && lower[i] != '#' && lower[i] != '\n') ++i;
  if (lower.compare(i, 3, "###") != 0) return std::nullopt;
  std::string_view tok = reply.substr(tok_start, i - tok_start);
  while (!tok.empty() && IsBlank(tok.front())) tok.remove_prefix(1);
  while (!tok.empty() && IsBlank(tok.back())) tok.remove_suffix(1);
  return Marker{std::string(tok)};
}

std::optional<Marker> LastMarker(std::string_view reply) {
  std::string lower(reply);
  for (char& c : lower) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  std::optional<Marker> last;
  for (std::size_t p = lower.find("my"); p != std::string::npos;
       p = lower.find("my", p + 1)) {
    if (p > 0 && std::isalnum(static_cast<unsigned char>(lower[p - 1]))) {
      continue;
    }
    if (auto m = MatchAt(reply, lower, p)) last = std::move(m);
  }
  return last;
}

std::optional<Decision> TokenDecision(std::string_view token) {
  std::string t(token);
  for (char& c : t) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  if (t == "correct") return Decision::kCorrect;
  if (t == "wrong") return Decision::kWrong;
  return std::nullopt;
}

}  // namespace

Decision ParseVerdict(std::string_view reply) {
  auto marker = LastMarker(reply);
  if (!marker) throw NoMarker();
  auto d = TokenDecision(marker->token);
  if (!d) throw UnrecognizedToken(marker->token);
  return *d;
}

std::optional<Decision> TryParseVerdict(std::string_view reply) {
  auto marker = LastMarker(reply);
  if (!marker) return std::nullopt;
  return TokenDecision(marker->token);
}

ConversationOutcome ConverseForVerdict(ChatClient& client,
                                       const BackendSpec& backend,
                                       std::vector<ChatMessage>& history,
                                       const SamplingParams& params,
                                       int max_reprompts) {
  ConversationOutcome out;
  for (int attempt = 0; attempt <= max_reprompts; ++attempt) {
    if (attempt > 0) {
      history.push_back(ChatMessage::User(std::string(kFormatReminder)));
    }
    Completion c = client.Complete(backend, history, params);
    out.exchanges.push_back({history.back().content, c.text, c.cache_hit});
    history.push_back(ChatMessage::Assistant(c.text));
    out.attempts = attempt + 1;
    out.all_cache_hits = out.all_cache_hits && c.cache_hit;
    out.reply = std::move(c.text);
    if (auto d = TryParseVerdict(out.reply)) {
      out.decision = *d;
      return out;
    }
  }
  out.decision = Decision::kInvalid;
  return out;
}

Verdict CollectJudgment(ChatClient& client, const BackendSpec& backend,
                        const JudgeProfile& profile,
                        const QuestionRecord& record,
                        const SamplingParams& params,
                        const JudgeOptions& options) {
  std::vector<ChatMessage> history;
  return CollectJudgment(client, backend, profile, record, params, options,
                         history, nullptr);
}

Verdict CollectJudgment(ChatClient& client, const BackendSpec& backend,
                        const JudgeProfile& profile,
                        const QuestionRecord& record,
                        const SamplingParams& params,
                        const JudgeOptions& options,
                        std::vector<ChatMessage>& history,
                        std::vector<Exchange>* exchanges) {
  if (!record.student_answer) throw MissingStudentAnswer(record.id);
  history = RenderJudgePrompt(profile, options.task, record.question,
                              *record.student_answer)
                .Messages();
  ConversationOutcome outcome = ConverseForVerdict(
      client, backend, history, params, options.max_reprompts);
  if (exchanges) {
    exchanges->insert(exchanges->end(), outcome.exchanges.begin(),
                      outcome.exchanges.end());
  }
  Verdict v;
  v.decision = outcome.decision;
  v.explanation = std::move(outcome.reply);
  v.judge_id = options.judge_id;
  v.profile_name = profile.name;
  v.question_id = record.id;
  v.attempt_count = outcome.attempts;
  v.cache_hit = outcome.all_cache_hits;
  return v;
}

bool JudgmentMatchesGold(const Verdict& v, const QuestionRecord& record) {
  if (!record.student_correct) throw UngradedRecord(record.id);
  switch (v.decision) {
    case Decision::kCorrect:
      return *record.student_correct;
    case Decision::kWrong:
      return !*record.student_correct;
    case Decision::kInvalid:
      return false;
  }
  return false;
}

}  // namespace jury
