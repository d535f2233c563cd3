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

// Declarative run configuration: one knob group per pipeline stage.

#ifndef JURY_RUN_CONFIG_H_
#define JURY_RUN_CONFIG_H_

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "jury/arena.h"
#include "jury/corpus.h"
#include "jury/gateway.h"
#include "jury/maj.h"
#include "jury/prompting.h"

namespace jury {

struct JudgeEntry {
  std::string id;
  std::string profile = std::string(profiles::kDefault);
  BackendSpec backend;
  std::optional<SamplingParams> sampling;  // falls back to RunConfig::sampling
};

struct SplitConfig {
  PerSide per_side;  // nullopt = all available
  std::uint64_t seed = 0;
};

struct MajConfig {
  std::vector<JudgeEntry> panel;
  int rounds = 1;
  TiePolicy tie_policy = TiePolicy::kMetaAgent;
  std::optional<JudgeEntry> tie_breaker;
  bool include_peer_decisions = false;
};

struct GatewayConfig {
  int max_in_flight = 4;
  int max_retries = 5;
  std::chrono::milliseconds base_delay{500};
  std::chrono::milliseconds timeout{120000};
};

// How student answers are graded: per category (math_normalized for math
// categories, exact otherwise) or one normalizer for everything.
enum class GradingMode { kAuto, kExact, kMathNormalized };

struct RunConfig {
  std::string dataset;                  // as written in the config
  std::filesystem::path dataset_path;   // resolved against the config dir
  std::string task = "math";
  GradingMode grading = GradingMode::kAuto;
  std::optional<BackendSpec> student;
  std::optional<SamplingParams> student_sampling;
  std::vector<JudgeEntry> judges;
  SplitConfig split;
  EloSettings elo;
  std::optional<MajConfig> maj;
  SamplingParams sampling;
  int max_reprompts = 1;
  std::optional<std::size_t> limit;
  std::optional<std::string> profiles_file;
  nlohmann::json extra_profiles = nlohmann::json::object();
  GatewayConfig gateway;

  // Execution knobs; they do not change results and are not hashed.
  std::filesystem::path run_dir;
  int workers = 4;

  ProfileRegistry Profiles() const;
  SamplingParams SamplingFor(const JudgeEntry& entry) const;
  Normalizer NormalizerFor(const std::string& category) const;

  // Throws ValidationError on any inconsistency. Called by the loaders;
  // call again after changing fields programmatically.
  void Validate() const;

  // Everything that influences artifacts, with defaults filled in. This is
  // what run_dir/config.json holds.
  nlohmann::json ToJson() const;
  // SHA-256 over ToJson() plus the dataset contents.
  std::string Hash() const;
};

// `base_dir` resolves relative dataset/profile paths.
RunConfig ParseRunConfig(const nlohmann::json& j,
                         const std::filesystem::path& base_dir);
RunConfig LoadRunConfig(const std::filesystem::path& path);

// The three-agent default panel on one backbone.
std::vector<JudgeEntry> DefaultPanel(const BackendSpec& backend);

}  // namespace jury

#endif  // JURY_RUN_CONFIG_H_
