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

#include "jury/gateway.h"

#include <httplib.h>

#include <algorithm>
#include <condition_variable>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "jury/digest.h"
#include "jury/errors.h"

namespace jury {

std::string_view RoleName(Role role) {
  switch (role) {
    case Role::kSystem:
      return "system";
    case Role::kUser:
      return "user";
    case Role::kAssistant:
      return "assistant";
  }
  return "user";
}

Role ParseRole(std::string_view name) {
  if (name == "system") return Role::kSystem;
  if (name == "user") return Role::kUser;
  if (name == "assistant") return Role::kAssistant;
  throw ValidationError("unknown chat role: " + std::string(name));
}

nlohmann::json MessagesToJson(std::span<const ChatMessage> messages) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& m : messages) {
    out.push_back({{"role", RoleName(m.role)}, {"content", m.content}});
  }
  return out;
}

// ---- SamplingParams ---------------------------------------------------------

void SamplingParams::Validate() const {
  if (!(temperature >= 0.0)) {
    throw ValidationError("temperature must be >= 0");
  }
  if (!(top_p > 0.0 && top_p <= 1.0)) {
    throw ValidationError("top_p must be in (0, 1]");
  }
  if (max_tokens <= 0) throw ValidationError("max_tokens must be positive");
  if (top_k && *top_k <= 0) throw ValidationError("top_k must be positive");
}

nlohmann::json SamplingParams::ToJson() const {
  nlohmann::json j = {{"temperature", temperature},
                      {"top_p", top_p},
                      {"max_tokens", max_tokens}};
  if (top_k) j["top_k"] = *top_k;
  if (seed) j["seed"] = *seed;
  return j;
}

SamplingParams SamplingParams::FromJson(const nlohmann::json& j) {
  SamplingParams p;
  try {
    p.temperature = j.value("temperature", p.temperature);
    p.top_p = j.value("top_p", p.top_p);
    p.max_tokens = j.value("max_tokens", p.max_tokens);
    if (j.contains("top_k") && !j["top_k"].is_null()) {
      p.top_k = j["top_k"].get<int>();
    }
    if (j.contains("seed") && !j["seed"].is_null()) {
      p.seed = j["seed"].get<std::int64_t>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("sampling: ") + e.what());
  }
  p.Validate();
  return p;
}

// ---- Mock -------------------------------------------------------------------

std::string MockScript::Reply(std::span<const ChatMessage> messages) const {
  if (!replies.empty()) {
    auto it = replies.find(MessagesFingerprint(messages));
    if (it != replies.end()) return it->second;
  }
  if (!rules.empty()) {
    std::string text;
    for (const auto& m : messages) {
      text += m.content;
      text += '\n';
    }
    for (const auto& rule : rules) {
      bool all = std::all_of(
          rule.contains.begin(), rule.contains.end(),
          [&](const std::string& n) { return text.find(n) != std::string::npos; });
      if (all) return rule.reply;
    }
  }
  return default_reply;
}

nlohmann::json MockScript::ToJson() const {
  nlohmann::json rule_list = nlohmann::json::array();
  for (const auto& r : rules) {
    rule_list.push_back({{"contains", r.contains}, {"reply", r.reply}});
  }
  return {{"replies", replies},
          {"rules", rule_list},
          {"default_reply", default_reply}};
}

MockScript MockScript::FromJson(const nlohmann::json& j) {
  MockScript s;
  try {
    if (j.contains("replies")) {
      s.replies = j["replies"].get<std::map<std::string, std::string>>();
    }
    if (j.contains("rules")) {
      for (const auto& r : j["rules"]) {
        MockRule rule;
        if (r["contains"].is_string()) {
          rule.contains.push_back(r["contains"].get<std::string>());
        } else {
          rule.contains = r["contains"].get<std::vector<std::string>>();
        }
        rule.reply = r["reply"].get<std::string>();
        s.rules.push_back(std::move(rule));
      }
    }
    s.default_reply = j.value("default_reply", std::string());
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("mock script: ") + e.what());
  }
  return s;
}

std::string MessagesFingerprint(std::span<const ChatMessage> messages) {
  // Length-prefixed so that no two distinct sequences share an encoding.
  std::string buf;
  for (const auto& m : messages) {
    auto role = RoleName(m.role);
    buf += std::to_string(role.size()) + ':' + std::string(role) + ':';
    buf += std::to_string(m.content.size()) + ':' + m.content + ';';
  }
  return Sha256Hex(buf);
}

BackendSpec ScriptedMock(std::map<std::string, std::string> script,
                         std::string default_reply, std::string name) {
  MockScript s;
  s.replies = std::move(script);
  s.default_reply = std::move(default_reply);
  return MockFromScript(std::move(s), std::move(name));
}

BackendSpec MockFromScript(MockScript script, std::string name) {
  BackendSpec b;
  b.kind = BackendKind::kMock;
  b.model_name = std::move(name);
  b.script = std::make_shared<const MockScript>(std::move(script));
  return b;
}

// ---- BackendSpec ------------------------------------------------------------

void BackendSpec::Validate() const {
  switch (kind) {
    case BackendKind::kHttpChat:
      if (base_url.empty()) throw ValidationError("http_chat needs base_url");
      if (model_name.empty()) throw ValidationError("http_chat needs model");
      if (base_url.rfind("http://", 0) != 0 &&
          base_url.rfind("https://", 0) != 0) {
        throw ValidationError("base_url must start with http:// or https://");
      }
      break;
    case BackendKind::kMock:
      if (!script) throw ValidationError("mock backend needs a script");
      break;
  }
}

std::string BackendSpec::Fingerprint() const {
  if (kind == BackendKind::kHttpChat) {
    return Sha256Hex("http_chat\n" + base_url + "\n" + model_name);
  }
  return Sha256Hex("mock\n" + model_name + "\n" +
                   (script ? script->ToJson().dump() : std::string()));
}

nlohmann::json BackendSpec::ToJson() const {
  if (kind == BackendKind::kHttpChat) {
    nlohmann::json j = {{"kind", "http_chat"},
                        {"base_url", base_url},
                        {"model", model_name}};
    if (!auth_env_var.empty()) j["auth_env_var"] = auth_env_var;
    return j;
  }
  return {{"kind", "mock"},
          {"model", model_name},
          {"script", script ? script->ToJson() : nlohmann::json::object()}};
}

BackendSpec BackendSpec::FromJson(const nlohmann::json& j) {
  BackendSpec b;
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "http_chat") {
      b.kind = BackendKind::kHttpChat;
      b.base_url = j.value("base_url", std::string());
      b.model_name = j.value("model", std::string());
      b.auth_env_var = j.value("auth_env_var", std::string());
    } else if (kind == "mock") {
      b.kind = BackendKind::kMock;
      b.model_name = j.value("model", std::string("mock"));
      b.script = std::make_shared<const MockScript>(
          j.contains("script") ? MockScript::FromJson(j["script"]) : MockScript{});
    } else {
      throw ValidationError("unknown backend kind: " + kind);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("backend: ") + e.what());
  }
  b.Validate();
  return b;
}

// ---- ResponseCache ----------------------------------------------------------

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw IoError("cannot create cache dir " + dir_.string());
}

std::string ResponseCache::Key(const BackendSpec& backend,
                               std::span<const ChatMessage> messages,
                               const SamplingParams& params) {
  return Sha256Hex(backend.Fingerprint() + "\n" +
                   MessagesFingerprint(messages) + "\n" +
                   params.ToJson().dump());
}

std::optional<ResponseCache::Entry> ResponseCache::Get(
    const std::string& key) const {
  std::lock_guard lock(mu_);
  std::ifstream in(dir_ / (key + ".json"), std::ios::binary);
  if (!in) return std::nullopt;
  try {
    auto j = nlohmann::json::parse(in);
    return Entry{j.at("reply").get<std::string>(), j.value("attempts", 0),
                 j.value("http_status", 0)};
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;  // unreadable entries are misses
  }
}

void ResponseCache::Put(const std::string& key, const BackendSpec& backend,
                        const Entry& entry) {
  nlohmann::json j = {{"reply", entry.reply},
                      {"attempts", entry.attempts},
                      {"http_status", entry.http_status},
                      {"model", backend.model_name}};
  std::lock_guard lock(mu_);
  auto final_path = dir_ / (key + ".json");
  auto tmp_path = dir_ / (key + ".json.tmp");
  {
    std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write cache entry " + tmp_path.string());
    out << j.dump(2) << '\n';
  }
  std::filesystem::rename(tmp_path, final_path);
}

// ---- ChatClient -------------------------------------------------------------

class ChatClient::Limiter {
 public:
  explicit Limiter(int slots) : free_(std::max(1, slots)) {}
  void Acquire() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return free_ > 0; });
    --free_;
  }
  void Release() {
    {
      std::lock_guard lock(mu_);
      ++free_;
    }
    cv_.notify_one();
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  int free_;
};

namespace {

class SlotGuard {
 public:
  template <typename L>
  explicit SlotGuard(L& l) : release_([&l] { l.Release(); }) {
    l.Acquire();
  }
  ~SlotGuard() { release_(); }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;

 private:
  std::function<void()> release_;
};

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;    // without trailing slash
};

SplitUrl SplitBaseUrl(const std::string& url) {
  auto scheme_end = url.find("://");
  auto path_start = url.find('/', scheme_end + 3);
  SplitUrl out;
  if (path_start == std::string::npos) {
    out.origin = url;
  } else {
    out.origin = url.substr(0, path_start);
    out.path = url.substr(path_start);
  }
  while (!out.path.empty() && out.path.back() == '/') out.path.pop_back();
  return out;
}

void ValidateMessages(std::span<const ChatMessage> messages) {
  if (messages.empty() || messages.front().role != Role::kSystem) {
    throw ValidationError("messages must start with a system message");
  }
  for (std::size_t i = 0; i < messages.size(); ++i) {
    const auto& m = messages[i];
    if (i > 0 && m.role == Role::kSystem) {
      throw ValidationError("only one system message is allowed");
    }
    if (m.role != Role::kAssistant && m.content.empty()) {
      throw ValidationError("empty " + std::string(RoleName(m.role)) +
                            " message");
    }
  }
}

bool IsRetryableStatus(int status) { return status == 429 || status >= 500; }

}  // namespace

ChatClient::ChatClient(ClientOptions options) : options_(std::move(options)) {
  if (options_.cache_dir) {
    cache_ = std::make_unique<ResponseCache>(*options_.cache_dir);
  }
}

ChatClient::~ChatClient() = default;

ClientStats ChatClient::stats() const {
  std::lock_guard lock(mu_);
  return stats_;
}

ChatClient::Limiter& ChatClient::LimiterFor(const std::string& fingerprint) {
  std::lock_guard lock(mu_);
  auto& slot = limiters_[fingerprint];
  if (!slot) slot = std::make_unique<Limiter>(options_.max_in_flight_per_backend);
  return *slot;
}

Completion ChatClient::Complete(const BackendSpec& backend,
                                std::span<const ChatMessage> messages,
                                const SamplingParams& params) {
  backend.Validate();
  params.Validate();
  ValidateMessages(messages);

  std::string key;
  if (cache_) {
    key = ResponseCache::Key(backend, messages, params);
    if (auto hit = cache_->Get(key)) {
      std::lock_guard lock(mu_);
      ++stats_.cache_hits;
      return Completion{std::move(hit->reply), 0, true, 0};
    }
  }

  if (hook_) hook_(backend, messages);

  Completion result;
  if (backend.kind == BackendKind::kMock) {
    result.text = backend.script->Reply(messages);
    result.attempts = 1;
  } else {
    nlohmann::json body = {{"model", backend.model_name},
                           {"messages", MessagesToJson(messages)}};
    body.update(params.ToJson());
    SlotGuard slot(LimiterFor(backend.Fingerprint()));
    result = CallHttp(backend, body.dump());
  }
  {
    std::lock_guard lock(mu_);
    ++stats_.backend_calls;
  }
  if (cache_) {
    cache_->Put(key, backend,
                {result.text, result.attempts, result.http_status});
  }
  return result;
}

Completion ChatClient::CallHttp(const BackendSpec& backend,
                                const std::string& body) {
  httplib::Headers headers;
  if (!backend.auth_env_var.empty()) {
    const char* key = std::getenv(backend.auth_env_var.c_str());
    if (key == nullptr || *key == '\0') {
      throw AuthError("environment variable " + backend.auth_env_var +
                      " is not set");
    }
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  const SplitUrl url = SplitBaseUrl(backend.base_url);
  httplib::Client http(url.origin);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(
      options_.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(
      options_.timeout - secs);
  http.set_connection_timeout(secs.count(), usecs.count());
  http.set_read_timeout(secs.count(), usecs.count());
  http.set_write_timeout(secs.count(), usecs.count());
  const std::string path = url.path + "/chat/completions";

  const RetryPolicy& retry = options_.retry;
  int last_status = 0;
  bool last_was_timeout = false;
  std::string last_error;
  for (int attempt = 1; attempt <= retry.max_retries + 1; ++attempt) {
    if (attempt > 1) {
      auto delay = retry.base_delay * (1LL << std::min(attempt - 2, 20));
      std::this_thread::sleep_for(std::min<std::chrono::milliseconds>(
          delay, retry.max_delay));
      std::lock_guard lock(mu_);
      ++stats_.retries;
    }
    {
      std::lock_guard lock(mu_);
      ++stats_.http_requests;
    }
    auto res = http.Post(path, headers, body, "application/json");
    if (!res) {
      const auto err = res.error();
      last_status = 0;
      last_was_timeout = err == httplib::Error::ConnectionTimeout ||
                         err == httplib::Error::Read ||
                         err == httplib::Error::Write;
      last_error = httplib::to_string(err);
      continue;
    }
    last_status = res->status;
    last_was_timeout = false;
    if (res->status == 401 || res->status == 403) {
      throw AuthError("backend rejected credentials (HTTP " +
                      std::to_string(res->status) + ")");
    }
    if (IsRetryableStatus(res->status)) continue;
    if (res->status < 200 || res->status >= 300) {
      throw ProtocolError("HTTP " + std::to_string(res->status) + ": " +
                          res->body.substr(0, 200));
    }
    try {
      auto j = nlohmann::json::parse(res->body);
      const auto& content = j.at("choices").at(0).at("message").at("content");
      if (!content.is_string()) {
        throw ProtocolError("choices[0].message.content is not a string");
      }
      return Completion{content.get<std::string>(), attempt, false,
                        res->status};
    } catch (const nlohmann::json::exception& e) {
      throw ProtocolError(std::string("malformed completion body: ") +
                          e.what());
    }
  }
  if (last_was_timeout) {
    throw Timeout("request to " + backend.base_url + " timed out (" +
                  last_error + ")");
  }
  throw ExhaustedRetries(last_status, retry.max_retries + 1);
}

}  // namespace jury
