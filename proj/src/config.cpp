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

#include "soiq/config.hpp"

#include <filesystem>

#include "soiq/errors.hpp"
#include "soiq/util.hpp"

namespace soiq {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

// Role-specific temperature defaults: creative researcher, cool-headed
// mentor, deterministic judge and extractor.
double default_temperature(const std::string& role) {
  if (role == "researcher") return 0.8;
  if (role == "mentor") return 0.3;
  return 0.0;
}

ProviderConfig parse_provider(const std::string& role, const Json& j) {
  ProviderConfig p;
  p.profile.name = role;
  p.profile.temperature = default_temperature(role);
  if (j.contains("type")) p.type = j["type"].get<std::string>();
  if (p.type != "scripted" && p.type != "http") {
    throw ConfigError("provider " + role + ": unknown type " + p.type);
  }
  if (j.contains("script")) p.script = j["script"].get<std::string>();
  if (j.contains("mode")) p.mode = j["mode"].get<std::string>();
  if (p.mode != "sequence" && p.mode != "cycle") {
    throw ConfigError("provider " + role + ": mode must be sequence or cycle");
  }
  if (j.contains("endpoint")) p.profile.endpoint = j["endpoint"].get<std::string>();
  if (j.contains("model")) p.profile.model = j["model"].get<std::string>();
  if (j.contains("timeout_seconds")) p.profile.timeout_seconds = j["timeout_seconds"].get<int>();
  if (j.contains("retries")) p.profile.retries = j["retries"].get<int>();
  if (j.contains("rate_limit_rpm")) p.profile.rate_limit_rpm = j["rate_limit_rpm"].get<int>();
  if (j.contains("rate_limit_block")) p.profile.rate_limit_block = j["rate_limit_block"].get<bool>();
  if (j.contains("context_budget")) p.profile.context_budget = j["context_budget"].get<std::size_t>();
  if (j.contains("max_output")) p.profile.max_output = j["max_output"].get<std::size_t>();
  if (j.contains("temperature")) p.profile.temperature = j["temperature"].get<double>();
  if (j.contains("backoff_ms")) p.profile.backoff_ms = j["backoff_ms"].get<int>();
  p.profile.validate();
  if (p.type == "scripted" && p.script.empty()) {
    throw ConfigError("provider " + role + ": scripted type requires a script file");
  }
  if (p.type == "http" && p.profile.endpoint.empty()) {
    throw ConfigError("provider " + role + ": http type requires an endpoint");
  }
  return p;
}

}  // namespace

RunConfig RunConfig::from_file(const std::string& path) {
  Json j = Json::parse(read_file(path), nullptr, false);
  if (j.is_discarded()) throw ConfigError("config file " + path + " is not valid JSON");
  return from_json(j, fs::path(path).parent_path().string());
}

RunConfig RunConfig::from_json(const Json& j, std::string base_dir) {
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  RunConfig c;
  c.base_dir = std::move(base_dir);

  if (j.contains("graph_dir")) c.graph_dir = j["graph_dir"].get<std::string>();
  if (j.contains("run_dir")) c.run_dir = j["run_dir"].get<std::string>();
  if (j.contains("run_id")) c.run_id = j["run_id"].get<std::string>();
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("workers")) c.workers = j["workers"].get<int>();
  if (j.contains("k")) c.k = j["k"].get<std::size_t>();
  if (j.contains("top_k")) c.top_k = j["top_k"].get<std::size_t>();
  if (j.contains("max_rounds")) c.max_rounds = j["max_rounds"].get<int>();
  if (j.contains("tool_call_budget")) c.tool_call_budget = j["tool_call_budget"].get<int>();
  if (j.contains("idea_reprompts")) c.idea_reprompts = j["idea_reprompts"].get<int>();
  if (j.contains("ideas_per_topic")) c.ideas_per_topic = j["ideas_per_topic"].get<int>();
  if (j.contains("max_levels")) c.max_levels = j["max_levels"].get<std::size_t>();
  if (j.contains("similarity_floor")) c.similarity_floor = j["similarity_floor"].get<double>();
  if (j.contains("extraction_retries")) c.extraction_retries = j["extraction_retries"].get<int>();
  if (j.contains("elo_k_factor")) c.elo_k_factor = j["elo_k_factor"].get<double>();
  if (j.contains("elo_initial")) c.elo_initial = j["elo_initial"].get<double>();
  if (j.contains("tournament_rounds")) c.tournament_rounds = j["tournament_rounds"].get<int>();
  if (j.contains("embedding_dim")) c.embedding_dim = j["embedding_dim"].get<std::size_t>();
  if (j.contains("current_time")) c.current_time = j["current_time"].get<std::string>();

  if (j.contains("providers")) {
    for (const auto& [role, pj] : j["providers"].items()) {
      c.providers[role] = parse_provider(role, pj);
    }
  }

  if (j.contains("embedder")) {
    const Json& e = j["embedder"];
    if (e.contains("type")) c.embedder.type = e["type"].get<std::string>();
    if (c.embedder.type != "hash" && c.embedder.type != "http") {
      throw ConfigError("embedder: unknown type " + c.embedder.type);
    }
    if (e.contains("seed")) c.embedder.seed = e["seed"].get<std::uint64_t>();
    if (e.contains("endpoint")) c.embedder.endpoint = e["endpoint"].get<std::string>();
    if (e.contains("api_key_env")) c.embedder.api_key_env = e["api_key_env"].get<std::string>();
    if (e.contains("retries")) c.embedder.retries = e["retries"].get<int>();
    if (e.contains("timeout_seconds")) c.embedder.timeout_seconds = e["timeout_seconds"].get<int>();
    if (c.embedder.type == "http" && c.embedder.endpoint.empty()) {
      throw ConfigError("embedder: http type requires an endpoint");
    }
  }

  if (j.contains("literature")) {
    const Json& l = j["literature"];
    if (l.contains("type")) c.literature.type = l["type"].get<std::string>();
    if (c.literature.type != "fixture" && c.literature.type != "http") {
      throw ConfigError("literature: unknown type " + c.literature.type);
    }
    if (l.contains("records")) c.literature.records = l["records"].get<std::string>();
    if (l.contains("endpoint")) c.literature.endpoint = l["endpoint"].get<std::string>();
    if (l.contains("api_key_env")) c.literature.api_key_env = l["api_key_env"].get<std::string>();
    if (l.contains("cache_dir")) c.literature.cache_dir = l["cache_dir"].get<std::string>();
    if (l.contains("limit")) c.literature.limit = l["limit"].get<std::size_t>();
    if (l.contains("timeout_seconds")) c.literature.timeout_seconds = l["timeout_seconds"].get<int>();
    if (c.literature.type == "fixture" && c.literature.records.empty()) {
      throw ConfigError("literature: fixture type requires a records file");
    }
    if (c.literature.type == "http" && c.literature.endpoint.empty()) {
      throw ConfigError("literature: http type requires an endpoint");
    }
  }

  return c;
}

std::string RunConfig::resolve(const std::string& path) const {
  if (path.empty() || fs::path(path).is_absolute() || base_dir.empty()) return path;
  return (fs::path(base_dir) / path).string();
}

std::string RunConfig::effective_run_id() const {
  if (!run_id.empty()) return run_id;
  return "run-seed" + std::to_string(seed.value_or(0));
}

void RunConfig::validate() const {
  if (!seed.has_value()) {
    throw ConfigError("seed is required: runs must be explicitly seeded, never wall-clock seeded");
  }
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (max_rounds < 1) throw ConfigError("max_rounds must be >= 1");
  if (tool_call_budget < 1) throw ConfigError("tool_call_budget must be >= 1");
  if (ideas_per_topic < 1) throw ConfigError("ideas_per_topic must be >= 1");
  if (k < 1) throw ConfigError("k must be >= 1");
  if (top_k < 1) throw ConfigError("top_k must be >= 1");
  if (embedding_dim < 1) throw ConfigError("embedding_dim must be >= 1");
  if (elo_k_factor <= 0) throw ConfigError("elo_k_factor must be positive");

  for (const auto& [role, p] : providers) {
    if (p.type == "scripted" && !fs::exists(resolve(p.script))) {
      throw ConfigError("provider " + role + ": script file does not exist: " + resolve(p.script));
    }
  }
  if (literature.type == "fixture" && !fs::exists(resolve(literature.records))) {
    throw ConfigError("literature records file does not exist: " + resolve(literature.records));
  }
}

Json RunConfig::to_json() const {
  Json j;
  j["graph_dir"] = graph_dir;
  j["run_dir"] = run_dir;
  j["run_id"] = effective_run_id();
  j["seed"] = seed.value_or(0);
  j["workers"] = workers;
  j["k"] = k;
  j["top_k"] = top_k;
  j["max_rounds"] = max_rounds;
  j["tool_call_budget"] = tool_call_budget;
  j["idea_reprompts"] = idea_reprompts;
  j["ideas_per_topic"] = ideas_per_topic;
  j["max_levels"] = max_levels;
  if (similarity_floor.has_value()) j["similarity_floor"] = *similarity_floor;
  j["extraction_retries"] = extraction_retries;
  j["elo_k_factor"] = elo_k_factor;
  j["elo_initial"] = elo_initial;
  j["tournament_rounds"] = tournament_rounds;
  j["embedding_dim"] = embedding_dim;
  j["current_time"] = current_time;

  Json providers_json;
  for (const auto& [role, p] : providers) {
    Json pj;
    pj["type"] = p.type;
    if (!p.script.empty()) pj["script"] = p.script;
    if (p.type == "scripted") pj["mode"] = p.mode;
    if (!p.profile.endpoint.empty()) pj["endpoint"] = p.profile.endpoint;
    if (!p.profile.model.empty()) pj["model"] = p.profile.model;
    pj["timeout_seconds"] = p.profile.timeout_seconds;
    pj["retries"] = p.profile.retries;
    pj["rate_limit_rpm"] = p.profile.rate_limit_rpm;
    pj["context_budget"] = p.profile.context_budget;
    pj["max_output"] = p.profile.max_output;
    pj["temperature"] = p.profile.temperature;
    pj["backoff_ms"] = p.profile.backoff_ms;
    providers_json[role] = std::move(pj);
  }
  j["providers"] = std::move(providers_json);

  Json e;
  e["type"] = embedder.type;
  if (embedder.type == "hash") e["seed"] = embedder.seed;
  if (!embedder.endpoint.empty()) e["endpoint"] = embedder.endpoint;
  if (!embedder.api_key_env.empty()) e["api_key_env"] = embedder.api_key_env;
  e["retries"] = embedder.retries;
  j["embedder"] = std::move(e);

  Json l;
  l["type"] = literature.type;
  if (!literature.records.empty()) l["records"] = literature.records;
  if (!literature.endpoint.empty()) l["endpoint"] = literature.endpoint;
  if (!literature.api_key_env.empty()) l["api_key_env"] = literature.api_key_env;
  if (!literature.cache_dir.empty()) l["cache_dir"] = literature.cache_dir;
  l["limit"] = literature.limit;
  j["literature"] = std::move(l);

  return j;
}

}  // namespace soiq
