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

// Uniform access to chat-completion backends: an OpenAI-compatible HTTP
// client and a scripted mock. Nothing here interprets reply content.

#ifndef JURY_GATEWAY_H_
#define JURY_GATEWAY_H_

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace jury {

enum class Role { kSystem, kUser, kAssistant };

std::string_view RoleName(Role role);
Role ParseRole(std::string_view name);

struct ChatMessage {
  Role role;
  std::string content;

  static ChatMessage System(std::string text) {
    return {Role::kSystem, std::move(text)};
  }
  static ChatMessage User(std::string text) {
    return {Role::kUser, std::move(text)};
  }
  static ChatMessage Assistant(std::string text) {
    return {Role::kAssistant, std::move(text)};
  }
  bool operator==(const ChatMessage&) const = default;
};

nlohmann::json MessagesToJson(std::span<const ChatMessage> messages);

struct SamplingParams {
  double temperature = 0.5;
  double top_p = 1.0;
  int max_tokens = 1024;
  // Only sent when set; many OpenAI-compatible servers ignore it.
  std::optional<int> top_k;
  std::optional<std::int64_t> seed;

  // Throws ValidationError.
  void Validate() const;
  nlohmann::json ToJson() const;
  static SamplingParams FromJson(const nlohmann::json& j);
  bool operator==(const SamplingParams&) const = default;
};

// Replies for the mock backend. Lookup order: exact fingerprint match in
// `replies`, then the first rule whose every `contains` needle occurs in the
// conversation text, then `default_reply`.
struct MockRule {
  std::vector<std::string> contains;
  std::string reply;
  bool operator==(const MockRule&) const = default;
};

struct MockScript {
  std::map<std::string, std::string> replies;
  std::vector<MockRule> rules;
  std::string default_reply;

  std::string Reply(std::span<const ChatMessage> messages) const;
  nlohmann::json ToJson() const;
  static MockScript FromJson(const nlohmann::json& j);
};

enum class BackendKind { kHttpChat, kMock };

struct BackendSpec {
  BackendKind kind = BackendKind::kMock;
  std::string base_url;      // http_chat only, e.g. http://host:8000/v1
  std::string model_name;
  std::string auth_env_var;  // empty: no Authorization header
  std::shared_ptr<const MockScript> script;  // mock only

  // Throws ValidationError.
  void Validate() const;
  // Identity of the backend for caching and concurrency limits. Excludes
  // auth_env_var, which does not change replies.
  std::string Fingerprint() const;
  nlohmann::json ToJson() const;
  static BackendSpec FromJson(const nlohmann::json& j);
};

// Stable hash over the role:content sequence.
std::string MessagesFingerprint(std::span<const ChatMessage> messages);

BackendSpec ScriptedMock(std::map<std::string, std::string> script,
                         std::string default_reply,
                         std::string name = "mock");
BackendSpec MockFromScript(MockScript script, std::string name = "mock");

struct Completion {
  std::string text;
  int attempts = 0;     // requests sent for this call; 0 on a cache hit
  bool cache_hit = false;
  int http_status = 0;  // 0 for mock and cache hits
};

struct RetryPolicy {
  int max_retries = 5;
  std::chrono::milliseconds base_delay{500};
  std::chrono::milliseconds max_delay{30000};
};

struct ClientOptions {
  RetryPolicy retry;
  int max_in_flight_per_backend = 4;
  std::chrono::milliseconds timeout{120000};
  std::optional<std::filesystem::path> cache_dir;
};

struct ClientStats {
  std::uint64_t backend_calls = 0;  // completions served by a backend
  std::uint64_t http_requests = 0;
  std::uint64_t retries = 0;
  std::uint64_t cache_hits = 0;
};

// Content-addressed reply store: <dir>/<sha256>.json. Writes go through a
// temp file and rename so a killed run never leaves a torn entry.
class ResponseCache {
 public:
  struct Entry {
    std::string reply;
    int attempts = 0;
    int http_status = 0;
  };

  explicit ResponseCache(std::filesystem::path dir);

  static std::string Key(const BackendSpec& backend,
                         std::span<const ChatMessage> messages,
                         const SamplingParams& params);

  std::optional<Entry> Get(const std::string& key) const;
  void Put(const std::string& key, const BackendSpec& backend,
           const Entry& entry);

 private:
  std::filesystem::path dir_;
  mutable std::mutex mu_;
};

class ChatClient {
 public:
  // Invoked right before a backend (not the cache) is asked for a reply.
  using CallHook =
      std::function<void(const BackendSpec&, std::span<const ChatMessage>)>;

  explicit ChatClient(ClientOptions options = {});
  ~ChatClient();
  ChatClient(const ChatClient&) = delete;
  ChatClient& operator=(const ChatClient&) = delete;

  // Requires exactly one leading system message. Retries timeouts, 429 and
  // 5xx with exponential backoff; other 4xx fail immediately. The request
  // body is identical across attempts.
  Completion Complete(const BackendSpec& backend,
                      std::span<const ChatMessage> messages,
                      const SamplingParams& params);

  ClientStats stats() const;
  void set_call_hook(CallHook hook) { hook_ = std::move(hook); }

 private:
  class Limiter;
  Limiter& LimiterFor(const std::string& fingerprint);
  Completion CallHttp(const BackendSpec& backend, const std::string& body);

  ClientOptions options_;
  std::unique_ptr<ResponseCache> cache_;
  CallHook hook_;
  mutable std::mutex mu_;
  std::map<std::string, std::unique_ptr<Limiter>> limiters_;
  ClientStats stats_;
};

}  // namespace jury

#endif  // JURY_GATEWAY_H_
