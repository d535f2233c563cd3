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

#ifndef JURY_VERDICT_H_
#define JURY_VERDICT_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include <nlohmann/json.hpp>

namespace jury {

enum class Decision { kCorrect, kWrong, kInvalid };

std::string_view DecisionName(Decision d);
Decision ParseDecisionName(std::string_view name);

struct Verdict {
  Decision decision = Decision::kInvalid;
  std::string explanation;  // raw reply text, byte-exact
  std::string judge_id;
  std::string profile_name;
  std::string question_id;
  int attempt_count = 1;
  // Run metadata; not part of the judgement itself.
  bool cache_hit = false;
  std::string collected_at;

  bool operator==(const Verdict&) const = default;
};

nlohmann::json VerdictToJson(const Verdict& v);
Verdict VerdictFromJson(const nlohmann::json& j);

// (judge_id, question_id) -> Verdict.
using VerdictKey = std::pair<std::string, std::string>;
using VerdictTable = std::map<VerdictKey, Verdict>;

}  // namespace jury

#endif  // JURY_VERDICT_H_
