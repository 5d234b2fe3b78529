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

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "soiq/gateway.hpp"

namespace soiq::testing {

namespace fs = std::filesystem;

// Unique scratch directory removed on destruction.
struct TempDir {
  fs::path path;

  explicit TempDir(const std::string& prefix) {
    static std::atomic<unsigned> counter{0};
    path = fs::temp_directory_path() /
           (prefix + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter.fetch_add(1)));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string str() const { return path.string(); }
};

inline ProviderProfile quick_profile(std::string name = "test", int retries = 2) {
  ProviderProfile p;
  p.name = std::move(name);
  p.retries = retries;
  p.backoff_ms = 0;
  p.context_budget = 1u << 20;
  p.max_output = 4096;
  return p;
}

// A scripted provider wired through a private gateway.
struct MockEndpoint {
  Gateway gateway;
  std::shared_ptr<ScriptedProvider> mock;
  ProviderProfile profile;

  explicit MockEndpoint(std::vector<std::string> replies,
                        ScriptedProvider::Mode mode = ScriptedProvider::Mode::Sequence,
                        std::string name = "test")
      : mock(ScriptedProvider::from_replies(std::move(replies), mode)),
        profile(quick_profile(std::move(name))) {}

  MockEndpoint(std::vector<ScriptedProvider::Step> steps, ScriptedProvider::Mode mode,
               std::string name)
      : mock(std::make_shared<ScriptedProvider>(std::move(steps), mode)),
        profile(quick_profile(std::move(name))) {}

  ChatEndpoint endpoint() { return ChatEndpoint{&gateway, mock, profile}; }
};

inline std::string fenced_json(const std::string& body) {
  return "```json\n" + body + "\n```";
}

}  // namespace soiq::testing
