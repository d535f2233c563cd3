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

// Benchmark records: ingestion, student-answer grading and the balanced
// student-wrong / student-right split that leaderboards are computed over.

#ifndef JURY_CORPUS_H_
#define JURY_CORPUS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace jury {

struct QuestionRecord {
  std::string id;
  std::string question;
  std::string gold_answer;
  std::string category;
  std::optional<std::string> student_answer;
  // Only meaningful together with student_answer; set by grading.
  std::optional<bool> student_correct;

  bool graded() const { return student_correct.has_value(); }
  bool operator==(const QuestionRecord&) const = default;
};

enum class DatasetFormat { kJsonl };

enum class Normalizer { kExact, kMathNormalized };

// Throws FormatError on missing/ill-typed keys or a student_correct flag
// without a student answer.
QuestionRecord RecordFromJson(const nlohmann::json& j, std::size_t line_no = 0);
nlohmann::json RecordToJson(const QuestionRecord& r);

// Records in file order. Blank lines are skipped; line numbers in errors are
// 1-based physical lines.
std::vector<QuestionRecord> IngestDataset(
    const std::filesystem::path& path,
    DatasetFormat format = DatasetFormat::kJsonl);
std::vector<QuestionRecord> ParseDataset(std::istream& in);

// One compact JSON object per line, keys sorted, trailing newline.
std::string SerializeDataset(const std::vector<QuestionRecord>& records);
void WriteDataset(const std::filesystem::path& path,
                  const std::vector<QuestionRecord>& records);

// Canonical comparison form of an answer under `normalizer`.
//   exact:           ASCII-lowercased, all whitespace removed.
//   math_normalized: the content of the last \boxed{...} (if any), with "$"
//                    sigils, trailing periods and thousands separators
//                    removed, then as exact.
std::string NormalizeAnswer(std::string_view answer, Normalizer normalizer);

// math_normalized for math-like categories, exact otherwise.
Normalizer DefaultNormalizer(std::string_view category);

// Returns a copy with student_correct set. Throws MissingStudentAnswer.
QuestionRecord GradeStudentAnswer(const QuestionRecord& record,
                                  Normalizer normalizer);

struct BalancedSplit {
  std::vector<QuestionRecord> records;  // sorted by id
  std::size_t n_student_wrong = 0;
  std::size_t n_student_right = 0;

  bool operator==(const BalancedSplit&) const = default;
};

// Per-side sample size; nullopt takes every available record on each side,
// which may produce an imbalanced split.
using PerSide = std::optional<std::size_t>;

// Seeded shuffle of each side (ids sorted first), prefix-take, then the
// union sorted by id. Throws UngradedRecord and InsufficientRecords.
BalancedSplit BuildBalancedSplit(const std::vector<QuestionRecord>& records,
                                 PerSide per_side, std::uint64_t seed);

// Rebuilds the counts from a list of graded records (e.g. a split file).
BalancedSplit SplitFromRecords(std::vector<QuestionRecord> records);

// Keeps the first `limit` records in split order.
BalancedSplit TruncateSplit(const BalancedSplit& split, std::size_t limit);

}  // namespace jury

#endif  // JURY_CORPUS_H_
