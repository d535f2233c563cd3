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

#include <set>

#include "jury/errors.h"
#include "jury/parallel.h"

namespace jury {

std::string_view TiePolicyName(TiePolicy p) {
  return p == TiePolicy::kFlag ? "flag" : "meta_agent";
}

TiePolicy ParseTiePolicy(std::string_view name) {
  if (name == "flag") return TiePolicy::kFlag;
  if (name == "meta_agent") return TiePolicy::kMetaAgent;
  throw ValidationError("unknown tie policy: " + std::string(name));
}

std::string_view ResolutionName(Resolution r) {
  switch (r) {
    case Resolution::kMajority:
      return "majority";
    case Resolution::kTieBreaker:
      return "tie_breaker";
    case Resolution::kFlagged:
      return "flagged";
  }
  return "flagged";
}

Resolution ParseResolution(std::string_view name) {
  if (name == "majority") return Resolution::kMajority;
  if (name == "tie_breaker") return Resolution::kTieBreaker;
  if (name == "flagged") return Resolution::kFlagged;
  throw ValidationError("unknown resolution: " + std::string(name));
}

namespace {

nlohmann::json VerdictMapToJson(const std::map<std::string, Verdict>& m) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [id, v] : m) out[id] = VerdictToJson(v);
  return out;
}

std::map<std::string, Verdict> VerdictMapFromJson(const nlohmann::json& j) {
  std::map<std::string, Verdict> out;
  for (const auto& [id, v] : j.items()) out.emplace(id, VerdictFromJson(v));
  return out;
}

// Parsed view of a free-form debate reply, used as the agent's latest
// position for the next round.
Verdict VerdictFromReply(const AgentConfig& agent, const QuestionRecord& record,
                         std::string reply, bool cache_hit) {
  Verdict v;
  v.decision = TryParseVerdict(reply).value_or(Decision::kInvalid);
  v.explanation = std::move(reply);
  v.judge_id = agent.agent_id;
  v.profile_name = agent.profile.name;
  v.question_id = record.id;
  v.attempt_count = 1;
  v.cache_hit = cache_hit;
  return v;
}

std::vector<std::pair<std::string, Verdict>> PeersOf(
    const std::string& self, const std::map<std::string, Verdict>& latest) {
  std::vector<std::pair<std::string, Verdict>> peers;
  for (const auto& [id, v] : latest) {
    if (id != self) peers.emplace_back(id, v);
  }
  return peers;
}

void AppendCalls(std::vector<TranscriptCall>& calls, const std::string& agent,
                 const std::string& phase,
                 const std::vector<Exchange>& exchanges) {
  for (const auto& e : exchanges) {
    calls.push_back({agent, phase, e.prompt, e.reply, e.cache_hit});
  }
}

}  // namespace

nlohmann::json TranscriptToJson(const DebateTranscript& t) {
  nlohmann::json rounds = nlohmann::json::array();
  for (const auto& r : t.rounds) {
    rounds.push_back({{"round", r.round_index}, {"replies", r.replies}});
  }
  nlohmann::json calls = nlohmann::json::array();
  for (const auto& c : t.calls) {
    calls.push_back({{"agent_id", c.agent_id},
                     {"phase", c.phase},
                     {"prompt", c.prompt},
                     {"reply", c.reply},
                     {"cache_hit", c.cache_hit}});
  }
  return {{"question_id", t.question_id},
          {"initial", VerdictMapToJson(t.initial)},
          {"rounds", rounds},
          {"revised", VerdictMapToJson(t.revised)},
          {"collective", t.collective ? nlohmann::json(DecisionName(*t.collective))
                                      : nlohmann::json(nullptr)},
          {"resolution", ResolutionName(t.resolution)},
          {"tie_breaker", t.tie_breaker_verdict
                              ? VerdictToJson(*t.tie_breaker_verdict)
                              : nlohmann::json(nullptr)},
          {"calls", calls}};
}

DebateTranscript TranscriptFromJson(const nlohmann::json& j) {
  DebateTranscript t;
  try {
    t.question_id = j.at("question_id").get<std::string>();
    t.initial = VerdictMapFromJson(j.at("initial"));
    for (const auto& r : j.at("rounds")) {
      t.rounds.push_back(
          {r.at("round").get<int>(),
           r.at("replies").get<std::map<std::string, std::string>>()});
    }
    t.revised = VerdictMapFromJson(j.at("revised"));
    if (!j.at("collective").is_null()) {
      t.collective = ParseDecisionName(j["collective"].get<std::string>());
    }
    t.resolution = ParseResolution(j.at("resolution").get<std::string>());
    if (j.contains("tie_breaker") && !j["tie_breaker"].is_null()) {
      t.tie_breaker_verdict = VerdictFromJson(j["tie_breaker"]);
    }
    for (const auto& c : j.value("calls", nlohmann::json::array())) {
      t.calls.push_back({c.at("agent_id").get<std::string>(),
                         c.at("phase").get<std::string>(),
                         c.at("prompt").get<std::string>(),
                         c.at("reply").get<std::string>(),
                         c.value("cache_hit", false)});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("transcript: ") + e.what());
  }
  return t;
}

std::vector<std::string> ValidatePanel(const std::vector<AgentConfig>& panel) {
  if (panel.size() < 2) throw PanelTooSmall(panel.size());
  std::set<std::string> ids;
  for (const auto& a : panel) {
    if (a.agent_id.empty()) throw ValidationError("agent id is empty");
    if (!ids.insert(a.agent_id).second) {
      throw ValidationError("duplicate agent id: " + a.agent_id);
    }
    a.backend.Validate();
    a.params.Validate();
  }
  std::vector<std::string> warnings;
  if (panel.size() % 2 == 0) {
    warnings.push_back("panel has an even number of agents (" +
                       std::to_string(panel.size()) +
                       "); tied votes are likely");
  }
  return warnings;
}

VoteResult ResolveVote(ChatClient& client,
                       const std::map<std::string, Verdict>& revised,
                       TiePolicy tie_policy, const AgentConfig* tie_breaker,
                       const QuestionRecord& record, std::string_view task,
                       int max_reprompts) {
  if (tie_policy == TiePolicy::kMetaAgent && tie_breaker == nullptr) {
    throw MissingTieBreaker();
  }
  std::size_t n_correct = 0;
  std::size_t n_wrong = 0;
  for (const auto& [id, v] : revised) {
    if (v.decision == Decision::kCorrect) ++n_correct;
    if (v.decision == Decision::kWrong) ++n_wrong;
  }
  VoteResult out;
  if (n_correct + n_wrong == 0) return out;  // flagged
  if (n_correct != n_wrong) {
    out.collective = n_correct > n_wrong ? Decision::kCorrect : Decision::kWrong;
    out.resolution = Resolution::kMajority;
    return out;
  }
  if (tie_policy == TiePolicy::kFlag) return out;

  if (!record.student_answer) throw MissingStudentAnswer(record.id);
  std::vector<std::pair<std::string, Verdict>> panel(revised.begin(),
                                                     revised.end());
  std::vector<ChatMessage> history =
      RenderTieBreakPrompt(tie_breaker->profile, task, record.question,
                           *record.student_answer, panel)
          .Messages();
  ConversationOutcome outcome = ConverseForVerdict(
      client, tie_breaker->backend, history, tie_breaker->params,
      max_reprompts);
  AppendCalls(out.calls, tie_breaker->agent_id, "tie_break",
              outcome.exchanges);
  Verdict v;
  v.decision = outcome.decision;
  v.explanation = outcome.reply;
  v.judge_id = tie_breaker->agent_id;
  v.profile_name = tie_breaker->profile.name;
  v.question_id = record.id;
  v.attempt_count = outcome.attempts;
  v.cache_hit = outcome.all_cache_hits;
  out.tie_breaker_verdict = v;
  if (v.decision != Decision::kInvalid) {
    out.collective = v.decision;
    out.resolution = Resolution::kTieBreaker;
  }
  return out;
}

DebateTranscript RunDebate(ChatClient& client,
                           const std::vector<AgentConfig>& panel,
                           const QuestionRecord& record,
                           const DebateSettings& settings) {
  ValidatePanel(panel);
  if (!record.student_answer) throw MissingStudentAnswer(record.id);
  if (settings.rounds < 0) throw ValidationError("rounds must be >= 0");

  const std::size_t n = panel.size();
  std::vector<std::vector<ChatMessage>> history(n);
  std::vector<std::vector<Exchange>> exchanges(n);
  DebateTranscript t;
  t.question_id = record.id;

  auto flush_phase = [&](const std::string& phase) {
    for (std::size_t i = 0; i < n; ++i) {
      AppendCalls(t.calls, panel[i].agent_id, phase, exchanges[i]);
      exchanges[i].clear();
    }
  };

  // Phase 1: independent verdicts.
  std::vector<Verdict> initial(n);
  ParallelFor(n, settings.phase_workers, [&](std::size_t i) {
    JudgeOptions opts{panel[i].agent_id, settings.task, settings.max_reprompts};
    initial[i] = CollectJudgment(client, panel[i].backend, panel[i].profile,
                                 record, panel[i].params, opts, history[i],
                                 &exchanges[i]);
  });
  flush_phase("initial");
  std::map<std::string, Verdict> latest;
  for (std::size_t i = 0; i < n; ++i) {
    t.initial.emplace(panel[i].agent_id, initial[i]);
    latest.emplace(panel[i].agent_id, initial[i]);
  }

  // Phase 2: debate rounds; each agent sees the previous phase only.
  for (int round = 1; round <= settings.rounds; ++round) {
    std::vector<Verdict> next(n);
    ParallelFor(n, settings.phase_workers, [&](std::size_t i) {
      const auto& id = panel[i].agent_id;
      history[i].push_back(RenderDebatePrompt(latest.at(id), PeersOf(id, latest),
                                              settings.prompt));
      Completion c =
          client.Complete(panel[i].backend, history[i], panel[i].params);
      exchanges[i].push_back({history[i].back().content, c.text, c.cache_hit});
      history[i].push_back(ChatMessage::Assistant(c.text));
      next[i] = VerdictFromReply(panel[i], record, c.text, c.cache_hit);
    });
    const std::string phase = "round " + std::to_string(round);
    flush_phase(phase);
    DebateRound r{round, {}};
    for (std::size_t i = 0; i < n; ++i) {
      r.replies.emplace(panel[i].agent_id, next[i].explanation);
      latest[panel[i].agent_id] = std::move(next[i]);
    }
    t.rounds.push_back(std::move(r));
  }

  // Phase 3: final revision.
  if (settings.rounds == 0) {
    t.revised = t.initial;
  } else {
    std::vector<Verdict> revised(n);
    ParallelFor(n, settings.phase_workers, [&](std::size_t i) {
      history[i].push_back(
          ChatMessage::User(std::string(kRevisionInstructions)));
      ConversationOutcome o =
          ConverseForVerdict(client, panel[i].backend, history[i],
                             panel[i].params, settings.max_reprompts);
      exchanges[i] = o.exchanges;
      Verdict v;
      v.decision = o.decision;
      v.explanation = std::move(o.reply);
      v.judge_id = panel[i].agent_id;
      v.profile_name = panel[i].profile.name;
      v.question_id = record.id;
      v.attempt_count = o.attempts;
      v.cache_hit = o.all_cache_hits;
      revised[i] = std::move(v);
    });
    flush_phase("revision");
    for (std::size_t i = 0; i < n; ++i) {
      t.revised.emplace(panel[i].agent_id, std::move(revised[i]));
    }
  }

  // Phase 4: vote.
  const AgentConfig* tie_breaker =
      settings.tie_breaker ? &*settings.tie_breaker : nullptr;
  VoteResult vote =
      ResolveVote(client, t.revised, settings.tie_policy, tie_breaker, record,
                  settings.task, settings.max_reprompts);
  t.collective = vote.collective;
  t.resolution = vote.resolution;
  t.tie_breaker_verdict = std::move(vote.tie_breaker_verdict);
  t.calls.insert(t.calls.end(), vote.calls.begin(), vote.calls.end());
  return t;
}

JudgeScore ScoreMaj(const std::vector<DebateTranscript>& transcripts,
                    const BalancedSplit& split, std::string panel_id,
                    std::optional<double> elo) {
  std::map<std::string, const DebateTranscript*> by_question;
  for (const auto& t : transcripts) {
    if (!by_question.emplace(t.question_id, &t).second) {
      throw ValidationError("two transcripts for question " + t.question_id);
    }
  }
  std::size_t n_sw = 0, n_sr = 0, hit_sw = 0, hit_sr = 0, hit_total = 0;
  for (const auto& r : split.records) {
    if (!r.student_correct) throw UngradedRecord(r.id);
    auto it = by_question.find(r.id);
    if (it == by_question.end()) throw CoverageGap(r.id);
    const auto& collective = it->second->collective;
    const bool hit =
        collective.has_value() &&
        ((*collective == Decision::kCorrect) == *r.student_correct);
    hit_total += hit;
    if (*r.student_correct) {
      ++n_sr;
      hit_sr += hit;
    } else {
      ++n_sw;
      hit_sw += hit;
    }
  }
  return ScoreFromCounts(std::move(panel_id), n_sw, n_sr, hit_sw, hit_sr,
                         hit_total, elo);
}

}  // namespace jury
