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

#include "jury/run_config.h"

#include <fstream>
#include <set>
#include <sstream>

#include "jury/digest.h"
#include "jury/errors.h"

namespace jury {
namespace {

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

JudgeEntry ParseJudgeEntry(const nlohmann::json& j, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + " must be an object");
  JudgeEntry e;
  e.id = j.value("id", std::string());
  if (e.id.empty()) throw ValidationError(where + ": missing id");
  e.profile = j.value("profile", std::string(profiles::kDefault));
  if (!j.contains("backend")) {
    throw ValidationError(where + " '" + e.id + "': missing backend");
  }
  e.backend = BackendSpec::FromJson(j["backend"]);
  if (j.contains("sampling")) e.sampling = SamplingParams::FromJson(j["sampling"]);
  return e;
}

nlohmann::json JudgeEntryToJson(const JudgeEntry& e) {
  nlohmann::json j = {{"id", e.id},
                      {"profile", e.profile},
                      {"backend", e.backend.ToJson()}};
  if (e.sampling) j["sampling"] = e.sampling->ToJson();
  return j;
}

std::string_view GradingName(GradingMode m) {
  switch (m) {
    case GradingMode::kAuto:
      return "auto";
    case GradingMode::kExact:
      return "exact";
    case GradingMode::kMathNormalized:
      return "math_normalized";
  }
  return "auto";
}

}  // namespace

std::vector<JudgeEntry> DefaultPanel(const BackendSpec& backend) {
  std::vector<JudgeEntry> panel;
  for (auto name : {profiles::kLogicalThinker, profiles::kRobustReasoner,
                    profiles::kDeductiveReasoner}) {
    panel.push_back({std::string(name), std::string(name), backend, {}});
  }
  return panel;
}

ProfileRegistry RunConfig::Profiles() const {
  ProfileRegistry registry;
  registry.LoadJson(extra_profiles);
  return registry;
}

SamplingParams RunConfig::SamplingFor(const JudgeEntry& entry) const {
  return entry.sampling.value_or(sampling);
}

Normalizer RunConfig::NormalizerFor(const std::string& category) const {
  switch (grading) {
    case GradingMode::kExact:
      return Normalizer::kExact;
    case GradingMode::kMathNormalized:
      return Normalizer::kMathNormalized;
    case GradingMode::kAuto:
      break;
  }
  return DefaultNormalizer(category);
}

void RunConfig::Validate() const {
  if (dataset.empty()) throw ValidationError("config: dataset is required");
  if (task.empty()) throw ValidationError("config: task is empty");
  if (judges.empty()) throw ValidationError("config: at least one judge");
  sampling.Validate();
  if (max_reprompts < 0) throw ValidationError("config: max_reprompts < 0");
  if (limit && *limit == 0) throw ValidationError("config: limit must be > 0");
  if (split.per_side && *split.per_side == 0) {
    throw ValidationError("config: split.per_side must be > 0 or \"all\"");
  }
  if (!(elo.k_factor > 0)) throw ValidationError("config: elo.k must be > 0");
  if (workers < 1) throw ValidationError("config: workers must be >= 1");
  if (gateway.max_in_flight < 1 || gateway.max_retries < 0) {
    throw ValidationError("config: invalid gateway limits");
  }

  const ProfileRegistry registry = Profiles();
  std::set<std::string> ids;
  for (const auto& j : judges) {
    if (j.id == "maj") throw ValidationError("config: judge id 'maj' is reserved");
    if (!ids.insert(j.id).second) {
      throw ValidationError("config: duplicate judge id " + j.id);
    }
    registry.Get(j.profile);
    j.backend.Validate();
    SamplingFor(j).Validate();
  }
  if (student) student->Validate();
  if (maj) {
    std::vector<AgentConfig> agents;
    for (const auto& e : maj->panel) {
      agents.push_back({e.id, e.backend, registry.Get(e.profile), SamplingFor(e)});
    }
    ValidatePanel(agents);
    if (maj->rounds < 0) throw ValidationError("config: maj.rounds < 0");
    if (maj->tie_policy == TiePolicy::kMetaAgent && !maj->tie_breaker) {
      throw MissingTieBreaker();
    }
    if (maj->tie_breaker) {
      registry.Get(maj->tie_breaker->profile);
      maj->tie_breaker->backend.Validate();
    }
  }
}

nlohmann::json RunConfig::ToJson() const {
  nlohmann::json judges_json = nlohmann::json::array();
  for (const auto& j : judges) judges_json.push_back(JudgeEntryToJson(j));
  nlohmann::json j = {
      {"dataset", dataset},
      {"task", task},
      {"grading", GradingName(grading)},
      {"judges", judges_json},
      {"split",
       {{"per_side", split.per_side ? nlohmann::json(*split.per_side)
                                    : nlohmann::json("all")},
        {"seed", split.seed}}},
      {"elo", {{"k", elo.k_factor}, {"initial", elo.initial_rating}}},
      {"sampling", sampling.ToJson()},
      {"max_reprompts", max_reprompts},
      {"limit", limit ? nlohmann::json(*limit) : nlohmann::json(nullptr)},
      {"profiles", extra_profiles},
      {"gateway",
       {{"max_in_flight", gateway.max_in_flight},
        {"max_retries", gateway.max_retries},
        {"base_delay_ms", gateway.base_delay.count()},
        {"timeout_ms", gateway.timeout.count()}}},
  };
  if (student) {
    j["student"] = {{"backend", student->ToJson()}};
    if (student_sampling) j["student"]["sampling"] = student_sampling->ToJson();
  } else {
    j["student"] = nullptr;
  }
  if (maj) {
    nlohmann::json panel = nlohmann::json::array();
    for (const auto& e : maj->panel) panel.push_back(JudgeEntryToJson(e));
    j["maj"] = {{"panel", panel},
                {"rounds", maj->rounds},
                {"tie_policy", TiePolicyName(maj->tie_policy)},
                {"tie_breaker", maj->tie_breaker
                                    ? JudgeEntryToJson(*maj->tie_breaker)
                                    : nlohmann::json(nullptr)},
                {"include_peer_decisions", maj->include_peer_decisions}};
  } else {
    j["maj"] = nullptr;
  }
  return j;
}

std::string RunConfig::Hash() const {
  std::string dataset_digest;
  std::ifstream probe(dataset_path, std::ios::binary);
  if (probe) dataset_digest = Sha256Hex(ReadFile(dataset_path));
  return Sha256Hex(ToJson().dump() + "\n" + dataset_digest);
}

RunConfig ParseRunConfig(const nlohmann::json& j,
                         const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  RunConfig c;
  try {
    c.dataset = j.value("dataset", std::string());
    c.dataset_path = base_dir / c.dataset;
    c.task = j.value("task", c.task);
    const std::string grading = j.value("grading", std::string("auto"));
    if (grading == "auto") {
      c.grading = GradingMode::kAuto;
    } else if (grading == "exact") {
      c.grading = GradingMode::kExact;
    } else if (grading == "math_normalized") {
      c.grading = GradingMode::kMathNormalized;
    } else {
      throw ValidationError("config: unknown grading mode " + grading);
    }
    if (j.contains("sampling")) c.sampling = SamplingParams::FromJson(j["sampling"]);

    if (j.contains("profiles")) c.extra_profiles = j["profiles"];
    if (j.contains("profiles_file") && !j["profiles_file"].is_null()) {
      c.profiles_file = j["profiles_file"].get<std::string>();
      auto loaded = nlohmann::json::parse(ReadFile(base_dir / *c.profiles_file));
      if (!loaded.is_object()) {
        throw ValidationError("profiles file must hold a JSON object");
      }
      for (auto& [name, text] : loaded.items()) c.extra_profiles[name] = text;
    }

    if (j.contains("student") && !j["student"].is_null()) {
      const auto& s = j["student"];
      c.student = BackendSpec::FromJson(s.contains("backend") ? s["backend"] : s);
      if (s.contains("sampling")) {
        c.student_sampling = SamplingParams::FromJson(s["sampling"]);
      }
    }

    if (!j.contains("judges") || !j["judges"].is_array()) {
      throw ValidationError("config: judges must be an array");
    }
    for (const auto& e : j["judges"]) {
      c.judges.push_back(ParseJudgeEntry(e, "judge"));
    }

    if (j.contains("split")) {
      const auto& s = j["split"];
      const auto& per_side = s.contains("per_side") ? s["per_side"]
                                                    : nlohmann::json("all");
      if (per_side.is_string()) {
        if (per_side.get<std::string>() != "all") {
          throw ValidationError("config: split.per_side must be a count or \"all\"");
        }
      } else {
        c.split.per_side = per_side.get<std::size_t>();
      }
      c.split.seed = s.value("seed", std::uint64_t{0});
    }

    if (j.contains("elo")) {
      c.elo.k_factor = j["elo"].value("k", kDefaultKFactor);
      c.elo.initial_rating = j["elo"].value("initial", kDefaultInitialRating);
    }

    if (j.contains("maj") && !j["maj"].is_null()) {
      const auto& m = j["maj"];
      MajConfig maj;
      if (m.contains("panel")) {
        for (const auto& e : m["panel"]) {
          maj.panel.push_back(ParseJudgeEntry(e, "maj panel agent"));
        }
      } else if (m.contains("backend")) {
        maj.panel = DefaultPanel(BackendSpec::FromJson(m["backend"]));
      } else {
        throw ValidationError("config: maj needs a panel or a backend");
      }
      maj.rounds = m.value("rounds", 1);
      maj.tie_policy =
          ParseTiePolicy(m.value("tie_policy", std::string("meta_agent")));
      if (m.contains("tie_breaker") && !m["tie_breaker"].is_null()) {
        auto tb = m["tie_breaker"];
        if (!tb.contains("id")) tb["id"] = std::string(profiles::kMetaEvaluator);
        if (!tb.contains("profile")) {
          tb["profile"] = std::string(profiles::kMetaEvaluator);
        }
        maj.tie_breaker = ParseJudgeEntry(tb, "maj tie_breaker");
      } else if (maj.tie_policy == TiePolicy::kMetaAgent && !maj.panel.empty()) {
        maj.tie_breaker = JudgeEntry{std::string(profiles::kMetaEvaluator),
                                     std::string(profiles::kMetaEvaluator),
                                     maj.panel.front().backend,
                                     maj.panel.front().sampling};
      }
      maj.include_peer_decisions = m.value("include_peer_decisions", false);
      c.maj = std::move(maj);
    }

    c.max_reprompts = j.value("max_reprompts", 1);
    if (j.contains("limit") && !j["limit"].is_null()) {
      c.limit = j["limit"].get<std::size_t>();
    }
    c.workers = j.value("workers", 4);
    if (j.contains("gateway")) {
      const auto& g = j["gateway"];
      c.gateway.max_in_flight = g.value("max_in_flight", 4);
      c.gateway.max_retries = g.value("max_retries", 5);
      c.gateway.base_delay =
          std::chrono::milliseconds(g.value("base_delay_ms", 500));
      c.gateway.timeout = std::chrono::milliseconds(g.value("timeout_ms", 120000));
    }
    if (j.contains("run_dir")) {
      c.run_dir = base_dir / j["run_dir"].get<std::string>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  c.Validate();
  return c;
}

RunConfig LoadRunConfig(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(ReadFile(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("config " + path.string() + ": " + e.what());
  }
  return ParseRunConfig(j, path.parent_path());
}

}  // namespace jury
