// Copyright 2026 the soiq authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace soiq {

enum class Role { System, User, Assistant };

std::string to_string(Role role);

struct ChatMessage {
  Role role = Role::User;
  std::string text;
};

struct ChatRequest {
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  std::size_t max_output = 0;  // 0 = take the profile default
  std::string tag;             // caller label for the request log

  void validate() const;  // non-empty, first message system or user
};

struct ProviderProfile {
  std::string name;  // profile key: researcher, mentor, judge, extractor, ...
  std::string endpoint;
  std::string model;
  int timeout_seconds = 60;
  int retries = 2;
  int rate_limit_rpm = 0;  // 0 = unlimited
  bool rate_limit_block = true;
  std::size_t context_budget = 32768;  // tokens
  std::size_t max_output = 4096;       // tokens
  double temperature = 0.0;
  int backoff_ms = 250;

  void validate() const;  // retries >= 0, context_budget > max_output
};

// Raw single-attempt chat completion. Retry, rate limiting, budgeting and
// logging live in the Gateway; providers just perform (or simulate) one call.
class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  virtual std::string complete(const ChatRequest& request) = 0;
};

// Deterministic test double: replies are consumed strictly in order, a
// failure step raises a transient transport error, and running past the
// end of a sequence script raises ScriptError. Every request is recorded.
class ScriptedProvider : public ChatProvider {
 public:
  struct Step {
    bool fail = false;
    std::string reply;
  };
  enum class Mode { Sequence, Cycle };

  explicit ScriptedProvider(std::vector<Step> script, Mode mode = Mode::Sequence);
  static std::shared_ptr<ScriptedProvider> from_replies(std::vector<std::string> replies,
                                                        Mode mode = Mode::Sequence);

  std::string complete(const ChatRequest& request) override;

  std::size_t request_count() const;
  std::vector<ChatRequest> requests() const;

 private:
  mutable std::mutex mutex_;
  std::vector<Step> script_;
  Mode mode_;
  std::size_t cursor_ = 0;
  std::vector<ChatRequest> requests_;
};

// POST {"model", "messages": [{"role","content"}], "temperature",
// "max_tokens"} to the profile endpoint; the reply may carry the assistant
// text as choices[0].message.content, "content", or "text".
class HttpChatProvider : public ChatProvider {
 public:
  HttpChatProvider(std::string endpoint, std::string model, std::string api_key_env = {},
                   int timeout_seconds = 60);
  std::string complete(const ChatRequest& request) override;

 private:
  std::string endpoint_;
  std::string model_;
  std::string api_key_env_;
  int timeout_seconds_;
};

class Gateway;

// A provider bound to its profile and the shared gateway. This is the
// handle the pipeline modules pass around: one complete() call with all
// policy (retry, rate limit, budget, logging) applied.
struct ChatEndpoint {
  Gateway* gateway = nullptr;
  std::shared_ptr<ChatProvider> provider;
  ProviderProfile profile;

  std::string complete(std::vector<ChatMessage> messages, std::string tag,
                       std::optional<double> temperature = std::nullopt) const;
  bool valid() const { return gateway != nullptr && provider != nullptr; }
};

struct GatewayLogEntry {
  std::uint64_t seq = 0;
  std::string tag;
  std::string profile;
  int attempt = 0;
  bool ok = false;
  std::vector<ChatMessage> request;
  std::string response;  // assistant text, or the error message when !ok
};

// Shared completion front door: budget gate, per-profile rate limit,
// retry with exponential backoff, and a sequenced request/response log.
// All remote traffic in the system flows through here.
class Gateway {
 public:
  Gateway() = default;

  // Mirrors every log entry to a JSONL file (append).
  void set_log_path(const std::string& path);

  std::string complete(ChatProvider& provider, ChatRequest request,
                       const ProviderProfile& profile);

  std::vector<GatewayLogEntry> log() const;
  std::size_t attempts_made() const { return attempts_.load(); }

 private:
  void rate_limit(const ProviderProfile& profile);
  void append_log(GatewayLogEntry entry);

  mutable std::mutex mutex_;
  std::vector<GatewayLogEntry> log_;
  std::string log_path_;
  std::atomic<std::uint64_t> seq_{0};
  std::atomic<std::size_t> attempts_{0};
  std::map<std::string, std::deque<std::chrono::steady_clock::time_point>> windows_;
};

}  // namespace soiq
