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

// The staged evaluation pipeline: collect -> judge -> arena -> board, plus
// the multi-agent stage. Each stage writes plain JSON/JSONL artifacts under
// the run directory and a manifest recording the config hash and the digest
// of every file it produced; later stages refuse inputs whose manifest does
// not match the current config.
//
// Layout of a run directory:
//   config.json
//   answers.jsonl                      collect
//   split.jsonl, verdicts.jsonl        judge
//   arena/<category>/ratings.json      arena (plus matches.jsonl)
//   board/<category>/leaderboard{,_elo}.{json,csv,md}
//   maj/<question>.json, maj/flagged.jsonl, maj/score.json,
//   maj/board/<category>/leaderboard.{json,csv,md}
//   manifests/<stage>.json
//   cache/                             response cache (unless disabled)

#ifndef JURY_PIPELINE_H_
#define JURY_PIPELINE_H_

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "jury/gateway.h"
#include "jury/run_config.h"

namespace jury {

inline constexpr std::string_view kPooledCategory = "all";

struct PipelineOptions {
  bool use_cache = true;
  // Timestamp source for verdicts. Defaults to SOURCE_DATE_EPOCH when set,
  // else the wall clock, formatted as ISO-8601 UTC.
  std::function<std::string()> clock;
  ChatClient::CallHook call_hook;
  // Overrides the gateway retry delays (tests).
  std::optional<RetryPolicy> retry;
};

struct StageReport {
  std::string stage;
  ClientStats stats;  // for this stage only
  std::vector<std::string> outputs;
  std::vector<std::string> warnings;
};

class Pipeline {
 public:
  explicit Pipeline(RunConfig config, PipelineOptions options = {});
  ~Pipeline();

  StageReport Collect();
  StageReport Judge();
  StageReport Arena();
  StageReport Board();
  StageReport Maj();
  // collect (when a student is configured), judge, arena, board, and maj
  // (when configured).
  std::vector<StageReport> All();

  const RunConfig& config() const { return config_; }
  const std::string& config_hash() const { return hash_; }

 private:
  struct Stage;
  void Prepare();
  StageReport Finish(Stage& stage);
  void RequireStage(const std::string& name) const;

  RunConfig config_;
  PipelineOptions options_;
  std::string hash_;
  std::unique_ptr<ChatClient> client_;
};

std::string IsoTimestamp(std::int64_t unix_seconds);

}  // namespace jury

#endif  // JURY_PIPELINE_H_
