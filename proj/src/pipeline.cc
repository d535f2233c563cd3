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

#include "jury/pipeline.h"

#include <ctime>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "jury/arena.h"
#include "jury/corpus.h"
#include "jury/digest.h"
#include "jury/errors.h"
#include "jury/judge.h"
#include "jury/leaderboard.h"
#include "jury/maj.h"
#include "jury/parallel.h"

namespace jury {
namespace fs = std::filesystem;

namespace {

constexpr std::string_view kStudentSystem =
    "You are a helpful assistant who solves {task} problems.";
constexpr std::string_view kStudentInstruction =
    "\n\nSolve the problem above. Explain your reasoning step by step, then "
    "give your final answer in the form \\boxed{answer}.";

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFileAtomic(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << content;
    if (!out) throw IoError("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string DefaultClock() {
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    try {
      return IsoTimestamp(std::stoll(epoch));
    } catch (const std::exception&) {
      // fall through to the wall clock
    }
  }
  return IsoTimestamp(std::chrono::duration_cast<std::chrono::seconds>(
                          std::chrono::system_clock::now().time_since_epoch())
                          .count());
}

// Ids become file names; anything outside [A-Za-z0-9._-] is replaced and a
// short digest keeps the mapping injective.
std::string FileStem(const std::string& id) {
  std::string out;
  bool changed = id.empty() || id[0] == '.';
  for (char c : id) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' ||
        c == '-') {
      out.push_back(c);
    } else {
      out.push_back('_');
      changed = true;
    }
  }
  if (changed) out += "-" + Sha256Hex(id).substr(0, 8);
  return out;
}

std::vector<std::string> Categories(const BalancedSplit& split) {
  std::set<std::string> cats;
  for (const auto& r : split.records) cats.insert(r.category);
  return {cats.begin(), cats.end()};
}

BalancedSplit Subsplit(const BalancedSplit& split, const std::string& category) {
  if (category == kPooledCategory) return split;
  std::vector<QuestionRecord> out;
  for (const auto& r : split.records) {
    if (r.category == category) out.push_back(r);
  }
  return SplitFromRecords(std::move(out));
}

std::vector<std::string> CategoriesWithPool(const BalancedSplit& split) {
  auto cats = Categories(split);
  cats.emplace_back(kPooledCategory);
  return cats;
}

ClientStats Diff(const ClientStats& after, const ClientStats& before) {
  return {after.backend_calls - before.backend_calls,
          after.http_requests - before.http_requests,
          after.retries - before.retries,
          after.cache_hits - before.cache_hits};
}

std::vector<std::string> JudgeIds(const RunConfig& c) {
  std::vector<std::string> ids;
  for (const auto& j : c.judges) ids.push_back(j.id);
  return ids;
}

nlohmann::json ScoreToJson(const JudgeScore& s) {
  auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  return {{"judge", s.judge_id},       {"overall_acc", opt(s.overall_acc)},
          {"sw_acc", opt(s.sw_acc)},   {"sr_acc", opt(s.sr_acc)},
          {"elo", opt(s.elo)},         {"n_sw", s.n_sw},
          {"n_sr", s.n_sr},            {"correct_total", s.correct_total},
          {"correct_sw", s.correct_sw}, {"correct_sr", s.correct_sr}};
}

}  // namespace

std::string IsoTimestamp(std::int64_t unix_seconds) {
  std::time_t t = static_cast<std::time_t>(unix_seconds);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Pipeline::Stage {
  std::string name;
  ClientStats before;
  std::map<std::string, std::string> files;  // relative path -> sha256
  std::vector<std::string> warnings;
  fs::path root;

  void Write(const std::string& rel, const std::string& content) {
    WriteFileAtomic(root / rel, content);
    files[rel] = Sha256Hex(content);
  }
};

Pipeline::Pipeline(RunConfig config, PipelineOptions options)
    : config_(std::move(config)), options_(std::move(options)) {
  config_.Validate();
  if (config_.run_dir.empty()) {
    throw ValidationError("no run directory configured (use --run-dir)");
  }
  if (!options_.clock) options_.clock = DefaultClock;
  hash_ = config_.Hash();

  ClientOptions client_options;
  client_options.max_in_flight_per_backend = config_.gateway.max_in_flight;
  client_options.retry.max_retries = config_.gateway.max_retries;
  client_options.retry.base_delay = config_.gateway.base_delay;
  client_options.timeout = config_.gateway.timeout;
  if (options_.retry) client_options.retry = *options_.retry;
  if (options_.use_cache) client_options.cache_dir = config_.run_dir / "cache";
  client_ = std::make_unique<ChatClient>(client_options);
  if (options_.call_hook) client_->set_call_hook(options_.call_hook);
}

Pipeline::~Pipeline() = default;

void Pipeline::Prepare() {
  fs::create_directories(config_.run_dir);
  WriteFileAtomic(config_.run_dir / "config.json",
                  config_.ToJson().dump(2) + "\n");
}

void Pipeline::RequireStage(const std::string& name) const {
  const fs::path manifest = config_.run_dir / "manifests" / (name + ".json");
  if (!fs::exists(manifest)) throw MissingArtifact(name);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(ReadFile(manifest));
  } catch (const nlohmann::json::parse_error&) {
    throw MissingArtifact(name);
  }
  if (j.value("config_hash", std::string()) != hash_) {
    throw ConfigMismatch("artifacts of stage '" + name +
                         "' were produced by a different config");
  }
  for (const auto& [rel, digest] : j.at("files").items()) {
    const fs::path file = config_.run_dir / rel;
    if (!fs::exists(file)) throw MissingArtifact(name);
    if (Sha256Hex(ReadFile(file)) != digest.get<std::string>()) {
      throw ConfigMismatch("artifact " + rel + " changed since stage '" + name +
                           "' wrote it");
    }
  }
}

StageReport Pipeline::Finish(Stage& stage) {
  nlohmann::json files = nlohmann::json::object();
  for (const auto& [rel, digest] : stage.files) files[rel] = digest;
  nlohmann::json manifest = {
      {"stage", stage.name}, {"config_hash", hash_}, {"files", files}};
  WriteFileAtomic(config_.run_dir / "manifests" / (stage.name + ".json"),
                  manifest.dump(2) + "\n");
  StageReport report;
  report.stage = stage.name;
  report.stats = Diff(client_->stats(), stage.before);
  for (const auto& [rel, digest] : stage.files) report.outputs.push_back(rel);
  report.warnings = std::move(stage.warnings);
  return report;
}

StageReport Pipeline::Collect() {
  if (!config_.student) {
    throw ValidationError("collect needs a student backend in the config");
  }
  Prepare();
  Stage stage{"collect", client_->stats(), {}, {}, config_.run_dir};

  std::vector<QuestionRecord> records = IngestDataset(config_.dataset_path);
  const SamplingParams params =
      config_.student_sampling.value_or(config_.sampling);
  const std::string system = SubstituteTask(kStudentSystem, config_.task);
  ParallelFor(records.size(), config_.workers, [&](std::size_t i) {
    QuestionRecord& r = records[i];
    if (!r.student_answer) {
      std::vector<ChatMessage> messages = {
          ChatMessage::System(system),
          ChatMessage::User(r.question + std::string(kStudentInstruction))};
      Completion c = client_->Complete(*config_.student, messages, params);
      if (c.text.empty()) {
        throw ValidationError("ungradable record " + r.id +
                              ": empty student answer");
      }
      r.student_answer = std::move(c.text);
    }
    r = GradeStudentAnswer(r, config_.NormalizerFor(r.category));
  });
  stage.Write("answers.jsonl", SerializeDataset(records));
  return Finish(stage);
}

StageReport Pipeline::Judge() {
  std::vector<QuestionRecord> records;
  if (config_.student) {
    RequireStage("collect");
    records = IngestDataset(config_.run_dir / "answers.jsonl");
  } else {
    records = IngestDataset(config_.dataset_path);
    for (auto& r : records) {
      if (!r.student_answer) {
        throw ValidationError("ungradable record " + r.id +
                              ": no student answer and no student backend");
      }
      if (!r.graded()) r = GradeStudentAnswer(r, config_.NormalizerFor(r.category));
    }
  }
  Prepare();
  Stage stage{"judge", client_->stats(), {}, {}, config_.run_dir};

  std::map<std::string, std::vector<QuestionRecord>> by_category;
  for (auto& r : records) {
    if (r.category == kPooledCategory) {
      throw ValidationError("category name '" + std::string(kPooledCategory) +
                            "' is reserved for the pooled leaderboard");
    }
    by_category[r.category].push_back(std::move(r));
  }
  std::vector<QuestionRecord> selected;
  for (const auto& [category, recs] : by_category) {
    BalancedSplit part =
        BuildBalancedSplit(recs, config_.split.per_side, config_.split.seed);
    if (part.n_student_wrong != part.n_student_right) {
      stage.warnings.push_back("category " + category + " is imbalanced: " +
                               std::to_string(part.n_student_wrong) +
                               " student-wrong vs " +
                               std::to_string(part.n_student_right) +
                               " student-right");
    }
    selected.insert(selected.end(), part.records.begin(), part.records.end());
  }
  BalancedSplit split = SplitFromRecords(std::move(selected));
  if (config_.limit) split = TruncateSplit(split, *config_.limit);
  stage.Write("split.jsonl", SerializeDataset(split.records));

  const ProfileRegistry registry = config_.Profiles();
  const std::size_t n_q = split.records.size();
  std::vector<Verdict> results(config_.judges.size() * n_q);
  ParallelFor(results.size(), config_.workers, [&](std::size_t i) {
    const JudgeEntry& judge = config_.judges[i / n_q];
    const QuestionRecord& record = split.records[i % n_q];
    JudgeOptions opts{judge.id, config_.task, config_.max_reprompts};
    Verdict v = CollectJudgment(*client_, judge.backend,
                                registry.Get(judge.profile), record,
                                config_.SamplingFor(judge), opts);
    v.collected_at = options_.clock();
    results[i] = std::move(v);
  });
  VerdictTable table;
  for (auto& v : results) {
    VerdictKey key{v.judge_id, v.question_id};
    table.emplace(std::move(key), std::move(v));
  }
  std::string lines;
  for (const auto& [key, v] : table) lines += VerdictToJson(v).dump() + "\n";
  stage.Write("verdicts.jsonl", lines);
  return Finish(stage);
}

namespace {

BalancedSplit LoadSplit(const fs::path& run_dir) {
  return SplitFromRecords(IngestDataset(run_dir / "split.jsonl"));
}

VerdictTable LoadVerdicts(const fs::path& run_dir) {
  VerdictTable table;
  std::istringstream in(ReadFile(run_dir / "verdicts.jsonl"));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      Verdict v = VerdictFromJson(nlohmann::json::parse(line));
      VerdictKey key{v.judge_id, v.question_id};
      table.emplace(std::move(key), std::move(v));
    } catch (const nlohmann::json::parse_error& e) {
      throw FormatError(line_no, e.what());
    }
  }
  return table;
}

}  // namespace

StageReport Pipeline::Arena() {
  RequireStage("judge");
  Prepare();
  Stage stage{"arena", client_->stats(), {}, {}, config_.run_dir};
  const BalancedSplit split = LoadSplit(config_.run_dir);
  const VerdictTable verdicts = LoadVerdicts(config_.run_dir);
  for (const auto& category : CategoriesWithPool(split)) {
    Tournament t = RunTournament(Subsplit(split, category), verdicts,
                                 JudgeIds(config_), config_.elo);
    const std::string dir = "arena/" + FileStem(category) + "/";
    stage.Write(dir + "ratings.json", t.table.ToJson().dump(2) + "\n");
    std::string log;
    for (const auto& m : t.matches) log += MatchResultToJson(m).dump() + "\n";
    stage.Write(dir + "matches.jsonl", log);
  }
  return Finish(stage);
}

StageReport Pipeline::Board() {
  RequireStage("judge");
  RequireStage("arena");
  Prepare();
  Stage stage{"board", client_->stats(), {}, {}, config_.run_dir};
  const BalancedSplit split = LoadSplit(config_.run_dir);
  const VerdictTable verdicts = LoadVerdicts(config_.run_dir);
  for (const auto& category : CategoriesWithPool(split)) {
    const std::string stem = FileStem(category);
    const RatingTable ratings = RatingTable::FromJson(nlohmann::json::parse(
        ReadFile(config_.run_dir / "arena" / stem / "ratings.json")));
    auto scores = ComputeScores(verdicts, Subsplit(split, category), &ratings);
    for (RankingKey key : {RankingKey::kOverallAcc, RankingKey::kElo}) {
      Leaderboard board = BuildLeaderboard(scores, key, category);
      const std::string base = "board/" + stem + "/leaderboard" +
                               (key == RankingKey::kElo ? "_elo" : "") + ".";
      for (EmitFormat f :
           {EmitFormat::kJson, EmitFormat::kCsv, EmitFormat::kMarkdown}) {
        stage.Write(base + std::string(EmitFormatExtension(f)), Emit(board, f));
      }
    }
  }
  return Finish(stage);
}

StageReport Pipeline::Maj() {
  if (!config_.maj) throw ValidationError("no maj section in the config");
  RequireStage("judge");
  Prepare();
  Stage stage{"maj", client_->stats(), {}, {}, config_.run_dir};
  const MajConfig& mc = *config_.maj;
  const ProfileRegistry registry = config_.Profiles();

  auto agent = [&](const JudgeEntry& e) {
    return AgentConfig{e.id, e.backend, registry.Get(e.profile),
                       config_.SamplingFor(e)};
  };
  std::vector<AgentConfig> panel;
  for (const auto& e : mc.panel) panel.push_back(agent(e));
  stage.warnings = ValidatePanel(panel);
  DebateSettings settings;
  settings.rounds = mc.rounds;
  settings.tie_policy = mc.tie_policy;
  if (mc.tie_breaker) settings.tie_breaker = agent(*mc.tie_breaker);
  settings.task = config_.task;
  settings.max_reprompts = config_.max_reprompts;
  settings.prompt.include_peer_decisions = mc.include_peer_decisions;

  const BalancedSplit split = LoadSplit(config_.run_dir);
  std::vector<DebateTranscript> transcripts(split.records.size());
  ParallelFor(split.records.size(), config_.workers, [&](std::size_t i) {
    DebateTranscript t = RunDebate(*client_, panel, split.records[i], settings);
    const std::string now = options_.clock();
    for (auto* phase : {&t.initial, &t.revised}) {
      for (auto& [id, v] : *phase) v.collected_at = now;
    }
    if (t.tie_breaker_verdict) t.tie_breaker_verdict->collected_at = now;
    transcripts[i] = std::move(t);
  });

  std::string flagged;
  for (const auto& t : transcripts) {
    stage.Write("maj/" + FileStem(t.question_id) + ".json",
                TranscriptToJson(t).dump(2) + "\n");
    if (t.resolution == Resolution::kFlagged) {
      nlohmann::json revised = nlohmann::json::object();
      for (const auto& [id, v] : t.revised) revised[id] = DecisionName(v.decision);
      flagged += nlohmann::json({{"question_id", t.question_id},
                                 {"revised", revised}})
                     .dump() +
                 "\n";
    }
  }
  stage.Write("maj/flagged.jsonl", flagged);

  nlohmann::json scores = nlohmann::json::object();
  for (const auto& category : CategoriesWithPool(split)) {
    const BalancedSplit sub = Subsplit(split, category);
    std::vector<DebateTranscript> subset;
    for (const auto& t : transcripts) {
      for (const auto& r : sub.records) {
        if (r.id == t.question_id) subset.push_back(t);
      }
    }
    JudgeScore score = ScoreMaj(subset, sub, "maj");
    scores[category] = ScoreToJson(score);
    Leaderboard board =
        BuildLeaderboard({score}, RankingKey::kOverallAcc, category);
    const std::string base = "maj/board/" + FileStem(category) + "/leaderboard.";
    for (EmitFormat f :
         {EmitFormat::kJson, EmitFormat::kCsv, EmitFormat::kMarkdown}) {
      stage.Write(base + std::string(EmitFormatExtension(f)), Emit(board, f));
    }
  }
  stage.Write("maj/score.json", scores.dump(2) + "\n");
  return Finish(stage);
}

std::vector<StageReport> Pipeline::All() {
  std::vector<StageReport> reports;
  if (config_.student) reports.push_back(Collect());
  reports.push_back(Judge());
  reports.push_back(Arena());
  reports.push_back(Board());
  if (config_.maj) reports.push_back(Maj());
  return reports;
}

}  // namespace jury
