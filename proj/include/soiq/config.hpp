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

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "soiq/gateway.hpp"

namespace soiq {

// One chat provider entry in the run config: either a remote endpoint or
// a scripted mock reading its replies from a JSON file.
struct ProviderConfig {
  std::string type = "scripted";  // "scripted" | "http"
  std::string script;             // scripted: path to the reply script
  std::string mode = "sequence";  // scripted: "sequence" | "cycle"
  ProviderProfile profile;
};

struct EmbedderConfig {
  std::string type = "hash";  // "hash" | "http"
  std::uint64_t seed = 0;     // hash provider seed
  std::string endpoint;
  std::string api_key_env;
  int retries = 2;
  int timeout_seconds = 30;
};

struct LiteratureConfig {
  std::string type = "fixture";  // "fixture" | "http"
  std::string records;           // fixture: path to canned records
  std::string endpoint;
  std::string api_key_env;
  std::string cache_dir;
  std::size_t limit = 20;
  int timeout_seconds = 30;
};

// The one human-editable run configuration. Every numeric default is
// echoed back into the run manifest so a run directory documents exactly
// what produced it. Seeds are explicit: a config without a seed does not
// validate.
struct RunConfig {
  std::string base_dir;  // directory the config file lives in
  std::string graph_dir = "graph";
  std::string run_dir = "runs";
  std::string run_id;  // default: "run-seed<seed>"

  std::optional<std::uint64_t> seed;
  int workers = 1;
  bool dry_run = false;

  std::size_t k = 5;       // hierarchy neighbor count
  std::size_t top_k = 10;  // node_search result size
  int max_rounds = 5;
  int tool_call_budget = 12;
  int idea_reprompts = 2;
  int ideas_per_topic = 1;
  std::size_t max_levels = 3;
  std::optional<double> similarity_floor;
  int extraction_retries = 2;

  double elo_k_factor = 32.0;
  double elo_initial = 1000.0;
  int tournament_rounds = 0;  // 0 = auto

  std::size_t embedding_dim = 384;
  std::string current_time = "1970-01-01T00:00:00Z";

  std::map<std::string, ProviderConfig> providers;  // researcher, mentor, judge, extractor
  EmbedderConfig embedder;
  LiteratureConfig literature;

  static RunConfig from_file(const std::string& path);
  static RunConfig from_json(const nlohmann::ordered_json& j, std::string base_dir);

  // Paths referenced by the config must exist; the seed must be explicit.
  void validate() const;

  // Canonical echo including all effective defaults.
  nlohmann::ordered_json to_json() const;

  std::string resolve(const std::string& path) const;  // against base_dir
  std::string effective_run_id() const;
};

}  // namespace soiq
