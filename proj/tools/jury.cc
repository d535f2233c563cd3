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

// jury: command-line driver for the evaluation pipeline.
//
//   jury all --config run.json --run-dir runs/demo
//   jury arena --config run.json --run-dir runs/demo
//
// Exit codes: 0 success, 2 validation failure (including missing or stale
// artifacts), 3 backend failure, 1 anything else.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <fmt/core.h>

#include "CLI11.hpp"
#include "jury/errors.h"
#include "jury/pipeline.h"
#include "jury/run_config.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitValidation = 2;
constexpr int kExitBackend = 3;

struct Flags {
  std::string config;
  std::string run_dir;
  std::optional<std::size_t> limit;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  bool no_cache = false;
};

void PrintReport(const jury::StageReport& r) {
  fmt::print(stderr,
             "[{}] backend_calls={} http_requests={} retries={} "
             "cache_hits={} files={}\n",
             r.stage, r.stats.backend_calls, r.stats.http_requests,
             r.stats.retries, r.stats.cache_hits, r.outputs.size());
  for (const auto& w : r.warnings) fmt::print(stderr, "[{}] warning: {}\n", r.stage, w);
}

int Run(const std::string& command, const Flags& flags) {
  jury::RunConfig config = jury::LoadRunConfig(flags.config);
  if (!flags.run_dir.empty()) config.run_dir = flags.run_dir;
  if (flags.limit) config.limit = *flags.limit;
  if (flags.seed) config.split.seed = *flags.seed;
  if (flags.workers) config.workers = *flags.workers;
  config.Validate();

  jury::PipelineOptions options;
  options.use_cache = !flags.no_cache;
  jury::Pipeline pipeline(std::move(config), options);
  fmt::print(stderr, "config hash {}\n", pipeline.config_hash());

  if (command == "all") {
    for (const auto& r : pipeline.All()) PrintReport(r);
  } else if (command == "collect") {
    PrintReport(pipeline.Collect());
  } else if (command == "judge") {
    PrintReport(pipeline.Judge());
  } else if (command == "arena") {
    PrintReport(pipeline.Arena());
  } else if (command == "board") {
    PrintReport(pipeline.Board());
  } else if (command == "maj") {
    PrintReport(pipeline.Maj());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LLM-as-judge evaluation: judging, Elo arena, leaderboards, "
               "multi-agent judging"};
  app.require_subcommand(1);
  Flags flags;

  const char* kCommands[][2] = {
      {"collect", "Collect and grade student answers"},
      {"judge", "Build the balanced split and collect judge verdicts"},
      {"arena", "Run the pairwise Elo tournament"},
      {"board", "Write leaderboards"},
      {"maj", "Run multi-agent judging"},
      {"all", "Run every configured stage in order"},
  };
  for (const auto& [name, help] : kCommands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", flags.config, "Run config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--run-dir", flags.run_dir,
                    "Run directory (overrides run_dir in the config)");
    sub->add_option("--limit", flags.limit,
                    "Keep only the first N questions of the split");
    sub->add_option("--seed", flags.seed, "Split seed (overrides the config)");
    sub->add_option("--workers", flags.workers, "Worker threads");
    sub->add_flag("--no-cache", flags.no_cache, "Bypass the response cache");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    return Run(command, flags);
  } catch (const jury::ValidationError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitValidation;
  } catch (const jury::BackendError& e) {
    fmt::print(stderr, "backend error: {}\n", e.what());
    return kExitBackend;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitOther;
  }
}
