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

#include "soiq/gateway.hpp"

#include <cstdlib>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "soiq/errors.hpp"
#include "soiq/util.hpp"

namespace soiq {

using Json = nlohmann::ordered_json;

std::string to_string(Role role) {
  switch (role) {
    case Role::System: return "system";
    case Role::User: return "user";
    case Role::Assistant: return "assistant";
  }
  return "user";
}

void ChatRequest::validate() const {
  if (messages.empty()) throw ValidationError("chat request has no messages");
  if (messages.front().role == Role::Assistant) {
    throw ValidationError("first chat message must be system or user");
  }
  if (temperature < 0.0) throw ValidationError("temperature must be >= 0");
}

void ProviderProfile::validate() const {
  if (retries < 0) throw ConfigError("profile " + name + ": retries must be >= 0");
  if (max_output == 0) throw ConfigError("profile " + name + ": max_output must be positive");
  if (context_budget <= max_output) {
    throw ConfigError("profile " + name + ": context budget must exceed max_output");
  }
}

ScriptedProvider::ScriptedProvider(std::vector<Step> script, Mode mode)
    : script_(std::move(script)), mode_(mode) {
  if (script_.empty()) throw ValidationError("scripted provider requires a non-empty script");
}

std::shared_ptr<ScriptedProvider> ScriptedProvider::from_replies(std::vector<std::string> replies,
                                                                 Mode mode) {
  std::vector<Step> steps;
  steps.reserve(replies.size());
  for (auto& r : replies) steps.push_back({false, std::move(r)});
  return std::make_shared<ScriptedProvider>(std::move(steps), mode);
}

std::string ScriptedProvider::complete(const ChatRequest& request) {
  std::lock_guard lock(mutex_);
  requests_.push_back(request);
  if (cursor_ >= script_.size()) {
    if (mode_ == Mode::Cycle) {
      cursor_ = 0;
    } else {
      throw ScriptError("scripted provider exhausted after " + std::to_string(script_.size()) +
                        " replies (tag: " + request.tag + ")");
    }
  }
  const Step& step = script_[cursor_++];
  if (step.fail) throw TransportError("scripted transient failure");
  return step.reply;
}

std::size_t ScriptedProvider::request_count() const {
  std::lock_guard lock(mutex_);
  return requests_.size();
}

std::vector<ChatRequest> ScriptedProvider::requests() const {
  std::lock_guard lock(mutex_);
  return requests_;
}

HttpChatProvider::HttpChatProvider(std::string endpoint, std::string model, std::string api_key_env,
                                   int timeout_seconds)
    : endpoint_(std::move(endpoint)),
      model_(std::move(model)),
      api_key_env_(std::move(api_key_env)),
      timeout_seconds_(timeout_seconds) {}

std::string HttpChatProvider::complete(const ChatRequest& request) {
  std::string url = endpoint_;
  std::string path = "/";
  std::size_t scheme = url.find("://");
  std::size_t host_start = scheme == std::string::npos ? 0 : scheme + 3;
  std::size_t slash = url.find('/', host_start);
  if (slash != std::string::npos) {
    path = url.substr(slash);
    url = url.substr(0, slash);
  }

  Json body;
  body["model"] = model_;
  body["messages"] = Json::array();
  for (const ChatMessage& m : request.messages) {
    body["messages"].push_back({{"role", to_string(m.role)}, {"content", m.text}});
  }
  body["temperature"] = request.temperature;
  body["max_tokens"] = request.max_output;

  httplib::Client client(url);
  client.set_read_timeout(timeout_seconds_, 0);
  client.set_connection_timeout(timeout_seconds_, 0);
  if (!api_key_env_.empty()) {
    if (const char* key = std::getenv(api_key_env_.c_str())) {
      client.set_default_headers({{"Authorization", std::string("Bearer ") + key}});
    }
  }

  auto res = client.Post(path, body.dump(), "application/json");
  if (!res) throw TransportError("no response from " + endpoint_);
  if (res->status == 429 || res->status >= 500) {
    throw TransportError("chat endpoint returned status " + std::to_string(res->status));
  }
  if (res->status < 200 || res->status >= 300) {
    throw TransportError("chat endpoint returned status " + std::to_string(res->status), false);
  }
  try {
    Json reply = Json::parse(res->body);
    if (reply.contains("choices")) {
      return reply["choices"].at(0).at("message").at("content").get<std::string>();
    }
    if (reply.contains("content")) return reply["content"].get<std::string>();
    if (reply.contains("text")) return reply["text"].get<std::string>();
    throw TransportError("chat response carries no assistant text", false);
  } catch (const Json::exception& e) {
    throw TransportError(std::string("malformed chat response: ") + e.what(), false);
  }
}

void Gateway::set_log_path(const std::string& path) {
  std::lock_guard lock(mutex_);
  log_path_ = path;
}

void Gateway::rate_limit(const ProviderProfile& profile) {
  if (profile.rate_limit_rpm <= 0) return;
  using clock = std::chrono::steady_clock;
  const auto window = std::chrono::seconds(60);
  while (true) {
    clock::time_point wake;
    {
      std::lock_guard lock(mutex_);
      auto& q = windows_[profile.name];
      auto now = clock::now();
      while (!q.empty() && now - q.front() >= window) q.pop_front();
      if (q.size() < static_cast<std::size_t>(profile.rate_limit_rpm)) {
        q.push_back(now);
        return;
      }
      if (!profile.rate_limit_block) {
        throw TransportError("rate limit exceeded for profile " + profile.name);
      }
      wake = q.front() + window;
    }
    std::this_thread::sleep_until(wake);
  }
}

void Gateway::append_log(GatewayLogEntry entry) {
  std::lock_guard lock(mutex_);
  if (!log_path_.empty()) {
    std::ofstream out(log_path_, std::ios::binary | std::ios::app);
    if (out) {
      Json j;
      j["seq"] = entry.seq;
      j["tag"] = entry.tag;
      j["profile"] = entry.profile;
      j["attempt"] = entry.attempt;
      j["ok"] = entry.ok;
      j["request"] = Json::array();
      for (const ChatMessage& m : entry.request) {
        j["request"].push_back({{"role", to_string(m.role)}, {"text", m.text}});
      }
      j["response"] = entry.response;
      out << j.dump() << "\n";
    }
  }
  log_.push_back(std::move(entry));
}

std::string Gateway::complete(ChatProvider& provider, ChatRequest request,
                              const ProviderProfile& profile) {
  profile.validate();
  request.validate();
  if (request.max_output == 0) request.max_output = profile.max_output;

  // Budget gate before any remote traffic.
  std::size_t estimated = 0;
  for (const ChatMessage& m : request.messages) estimated += estimate_tokens(m.text) + 4;
  if (estimated + request.max_output > profile.context_budget) {
    throw BudgetError("request for " + profile.name + " estimated at " + std::to_string(estimated) +
                      " tokens plus " + std::to_string(request.max_output) +
                      " output exceeds the context budget of " +
                      std::to_string(profile.context_budget));
  }

  for (int attempt = 1; attempt <= profile.retries + 1; ++attempt) {
    if (attempt > 1 && profile.backoff_ms > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(profile.backoff_ms << (attempt - 2)));
    }
    rate_limit(profile);
    GatewayLogEntry entry;
    entry.seq = seq_.fetch_add(1);
    entry.tag = request.tag;
    entry.profile = profile.name;
    entry.attempt = attempt;
    entry.request = request.messages;
    attempts_.fetch_add(1);
    try {
      std::string reply = provider.complete(request);
      entry.ok = true;
      entry.response = reply;
      append_log(std::move(entry));
      return reply;
    } catch (const TransportError& e) {
      entry.ok = false;
      entry.response = e.what();
      append_log(std::move(entry));
      if (!e.retryable || attempt == profile.retries + 1) {
        throw TransportError("provider " + profile.name + " failed after " +
                                 std::to_string(attempt) + " attempt(s): " + e.what(),
                             e.retryable);
      }
    }
    // ScriptError and everything else propagates untouched.
  }
  throw TransportError("unreachable retry state for profile " + profile.name);
}

std::vector<GatewayLogEntry> Gateway::log() const {
  std::lock_guard lock(mutex_);
  return log_;
}

std::string ChatEndpoint::complete(std::vector<ChatMessage> messages, std::string tag,
                                   std::optional<double> temperature) const {
  if (!valid()) throw ConfigError("chat endpoint is not configured");
  ChatRequest req;
  req.messages = std::move(messages);
  req.temperature = temperature.value_or(profile.temperature);
  req.tag = std::move(tag);
  return gateway->complete(*provider, std::move(req), profile);
}

}  // namespace soiq
