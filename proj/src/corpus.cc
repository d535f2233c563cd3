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

#include "jury/corpus.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "jury/errors.h"

namespace jury {
namespace {

std::string RequireString(const nlohmann::json& j, const char* key,
                          std::size_t line_no) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw FormatError(line_no, std::string("missing key '") + key + "'");
  }
  if (!it->is_string()) {
    throw FormatError(line_no, std::string("key '") + key +
                                   "' must be a string");
  }
  return it->get<std::string>();
}

bool IsSpace(char c) { return std::isspace(static_cast<unsigned char>(c)); }

std::string Trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && IsSpace(s[b])) ++b;
  while (e > b && IsSpace(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

// Content of the last balanced \boxed{...}; nullopt if none closes.
std::optional<std::string> LastBoxed(std::string_view s) {
  static constexpr std::string_view kBoxed = "\\boxed{";
  std::size_t pos = s.rfind(kBoxed);
  while (pos != std::string_view::npos) {
    std::size_t start = pos + kBoxed.size();
    int depth = 1;
    for (std::size_t i = start; i < s.size(); ++i) {
      if (s[i] == '{') {
        ++depth;
      } else if (s[i] == '}' && --depth == 0) {
        return std::string(s.substr(start, i - start));
      }
    }
    if (pos == 0) break;
    pos = s.rfind(kBoxed, pos - 1);
  }
  return std::nullopt;
}

std::string StripDollars(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && i + 1 < s.size() && s[i + 1] == '$') {
      ++i;
      continue;
    }
    if (s[i] == '$') continue;
    out.push_back(s[i]);
  }
  return out;
}

// "1,234,567" -> "1234567"; a comma counts as a separator only when followed
// by exactly three digits and preceded by a digit.
std::string StripThousandsSeparators(std::string_view s) {
  auto digit = [&](std::size_t i) {
    return i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]));
  };
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == ',' && i > 0 && digit(i - 1) && digit(i + 1) && digit(i + 2) &&
        digit(i + 3) && !digit(i + 4)) {
      continue;
    }
    out.push_back(s[i]);
  }
  return out;
}

std::string ExactForm(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (IsSpace(c)) continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

// Portable Fisher-Yates: std::shuffle and std::uniform_int_distribution are
// implementation-defined, which would make splits differ across stdlibs.
void SeededShuffle(std::vector<QuestionRecord>& v, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::uint64_t bound = i;
    const std::uint64_t limit =
        std::numeric_limits<std::uint64_t>::max() -
        std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t draw;
    do {
      draw = rng();
    } while (draw >= limit);
    std::swap(v[i - 1], v[draw % bound]);
  }
}

bool ById(const QuestionRecord& a, const QuestionRecord& b) {
  return a.id < b.id;
}

}  // namespace

QuestionRecord RecordFromJson(const nlohmann::json& j, std::size_t line_no) {
  if (!j.is_object()) throw FormatError(line_no, "record is not an object");
  QuestionRecord r;
  r.id = RequireString(j, "id", line_no);
  r.question = RequireString(j, "question", line_no);
  r.gold_answer = RequireString(j, "gold_answer", line_no);
  r.category = RequireString(j, "category", line_no);
  if (r.id.empty()) throw FormatError(line_no, "empty id");
  if (r.category.empty()) throw FormatError(line_no, "empty category");
  if (auto it = j.find("student_answer"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) {
      throw FormatError(line_no, "key 'student_answer' must be a string");
    }
    r.student_answer = it->get<std::string>();
  }
  if (auto it = j.find("student_correct"); it != j.end() && !it->is_null()) {
    if (!it->is_boolean()) {
      throw FormatError(line_no, "key 'student_correct' must be a boolean");
    }
    if (!r.student_answer) {
      throw FormatError(line_no, "student_correct without student_answer");
    }
    r.student_correct = it->get<bool>();
  }
  return r;
}

nlohmann::json RecordToJson(const QuestionRecord& r) {
  nlohmann::json j = {{"id", r.id},
                      {"question", r.question},
                      {"gold_answer", r.gold_answer},
                      {"category", r.category}};
  if (r.student_answer) j["student_answer"] = *r.student_answer;
  if (r.student_correct) j["student_correct"] = *r.student_correct;
  return j;
}

std::vector<QuestionRecord> ParseDataset(std::istream& in) {
  std::vector<QuestionRecord> out;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw FormatError(line_no, e.what());
    }
    QuestionRecord r = RecordFromJson(j, line_no);
    if (!seen.insert(r.id).second) throw DuplicateId(r.id);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<QuestionRecord> IngestDataset(const std::filesystem::path& path,
                                          DatasetFormat format) {
  (void)format;  // jsonl is the only format
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read dataset " + path.string());
  return ParseDataset(in);
}

std::string SerializeDataset(const std::vector<QuestionRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += RecordToJson(r).dump();
    out += '\n';
  }
  return out;
}

void WriteDataset(const std::filesystem::path& path,
                  const std::vector<QuestionRecord>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << SerializeDataset(records);
  if (!out) throw IoError("short write to " + path.string());
}

std::string NormalizeAnswer(std::string_view answer, Normalizer normalizer) {
  if (normalizer == Normalizer::kExact) return ExactForm(answer);

  std::string s = Trim(answer);
  if (auto boxed = LastBoxed(s)) s = *boxed;
  s = Trim(StripDollars(s));
  while (!s.empty() && (s.back() == '.' || IsSpace(s.back()))) s.pop_back();
  s = StripThousandsSeparators(s);
  return ExactForm(s);
}

Normalizer DefaultNormalizer(std::string_view category) {
  static constexpr std::string_view kMathWords[] = {
      "math",     "algebra",  "arithmetic", "number",  "counting",
      "probab",   "geometry", "calculus",   "gsm",     "precalc",
      "discrete", "applied"};
  std::string lower;
  for (char c : category) {
    lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  for (auto w : kMathWords) {
    if (lower.find(w) != std::string::npos) return Normalizer::kMathNormalized;
  }
  return Normalizer::kExact;
}

QuestionRecord GradeStudentAnswer(const QuestionRecord& record,
                                  Normalizer normalizer) {
  if (!record.student_answer) throw MissingStudentAnswer(record.id);
  QuestionRecord out = record;
  out.student_correct = NormalizeAnswer(*record.student_answer, normalizer) ==
                        NormalizeAnswer(record.gold_answer, normalizer);
  return out;
}

BalancedSplit BuildBalancedSplit(const std::vector<QuestionRecord>& records,
                                 PerSide per_side, std::uint64_t seed) {
  std::vector<QuestionRecord> wrong;
  std::vector<QuestionRecord> right;
  for (const auto& r : records) {
    if (!r.graded()) throw UngradedRecord(r.id);
    (*r.student_correct ? right : wrong).push_back(r);
  }
  if (per_side) {
    if (wrong.size() < *per_side) {
      throw InsufficientRecords("wrong", wrong.size(), *per_side);
    }
    if (right.size() < *per_side) {
      throw InsufficientRecords("right", right.size(), *per_side);
    }
  }

  BalancedSplit split;
  // Distinct streams per side so one side's size does not perturb the other.
  std::uint64_t side_seed = seed;
  for (auto* side : {&wrong, &right}) {
    std::sort(side->begin(), side->end(), ById);
    if (per_side) {
      SeededShuffle(*side, side_seed);
      side->resize(*per_side);
    }
    side_seed = side_seed * 6364136223846793005ULL + 1442695040888963407ULL;
  }
  split.n_student_wrong = wrong.size();
  split.n_student_right = right.size();
  split.records = std::move(wrong);
  split.records.insert(split.records.end(),
                       std::make_move_iterator(right.begin()),
                       std::make_move_iterator(right.end()));
  std::sort(split.records.begin(), split.records.end(), ById);
  return split;
}

BalancedSplit SplitFromRecords(std::vector<QuestionRecord> records) {
  BalancedSplit split;
  for (const auto& r : records) {
    if (!r.graded()) throw UngradedRecord(r.id);
    ++(*r.student_correct ? split.n_student_right : split.n_student_wrong);
  }
  std::sort(records.begin(), records.end(), ById);
  split.records = std::move(records);
  return split;
}

BalancedSplit TruncateSplit(const BalancedSplit& split, std::size_t limit) {
  if (limit >= split.records.size()) return split;
  return SplitFromRecords(std::vector<QuestionRecord>(
      split.records.begin(), split.records.begin() + limit));
}

}  // namespace jury
