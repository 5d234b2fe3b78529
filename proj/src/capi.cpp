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

#include "soiq.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

#include "soiq/config.hpp"
#include "soiq/errors.hpp"
#include "soiq/pipeline.hpp"
#include "soiq/util.hpp"

using soiq::Engine;
using soiq::Error;
using soiq::ErrorCode;
using soiq::RunConfig;

// The engine proper is constructed lazily on the first command so that
// option overrides (seed, run id, ...) land before providers and state
// are built.
struct soiq_engine {
  RunConfig config;
  std::unique_ptr<Engine> engine;
  std::string last_error;
};

namespace {

soiq_status status_of(const Error& e) {
  switch (e.code()) {
    case ErrorCode::Usage: return SOIQ_USAGE_ERROR;
    case ErrorCode::Config: return SOIQ_CONFIG_ERROR;
    case ErrorCode::Extraction: return SOIQ_EXTRACTION_ERROR;
    case ErrorCode::Provider:
    case ErrorCode::Budget: return SOIQ_PROVIDER_ERROR;
    case ErrorCode::Validation:
    case ErrorCode::Schema:
    case ErrorCode::Cycle:
    case ErrorCode::NotFound:
    case ErrorCode::Parse:
    case ErrorCode::Scheduling: return SOIQ_VALIDATION_ERROR;
    case ErrorCode::Io: return SOIQ_IO_ERROR;
    case ErrorCode::Internal:
    case ErrorCode::Script: return SOIQ_INTERNAL_ERROR;
  }
  return SOIQ_INTERNAL_ERROR;
}

char* dup_string(const std::string& text) {
  char* out = static_cast<char*>(std::malloc(text.size() + 1));
  if (out != nullptr) std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

template <typename F>
soiq_status guarded(soiq_engine* engine, F&& fn) {
  if (engine == nullptr) return SOIQ_USAGE_ERROR;
  try {
    engine->last_error.clear();
    if (!engine->engine) engine->engine = std::make_unique<Engine>(engine->config);
    fn(*engine->engine);
    return SOIQ_OK;
  } catch (const Error& e) {
    engine->last_error = e.what();
    return status_of(e);
  } catch (const std::exception& e) {
    engine->last_error = e.what();
    return SOIQ_INTERNAL_ERROR;
  }
}

}  // namespace

extern "C" {

const char* soiq_version(void) { return "0.1.0"; }

soiq_status soiq_open(const char* config_path, soiq_engine** out_engine) {
  if (config_path == nullptr || out_engine == nullptr) return SOIQ_USAGE_ERROR;
  *out_engine = nullptr;
  auto handle = std::make_unique<soiq_engine>();
  try {
    handle->config = RunConfig::from_file(config_path);
  } catch (const Error& e) {
    return status_of(e);
  } catch (const std::exception&) {
    return SOIQ_INTERNAL_ERROR;
  }
  *out_engine = handle.release();
  return SOIQ_OK;
}

soiq_status soiq_open_json(const char* config_json, const char* base_dir,
                           soiq_engine** out_engine) {
  if (config_json == nullptr || out_engine == nullptr) return SOIQ_USAGE_ERROR;
  *out_engine = nullptr;
  auto handle = std::make_unique<soiq_engine>();
  try {
    auto j = nlohmann::ordered_json::parse(config_json, nullptr, false);
    if (j.is_discarded()) throw soiq::ConfigError("config JSON does not parse");
    handle->config = RunConfig::from_json(j, base_dir == nullptr ? std::string{} : base_dir);
  } catch (const Error& e) {
    return status_of(e);
  } catch (const std::exception&) {
    return SOIQ_INTERNAL_ERROR;
  }
  *out_engine = handle.release();
  return SOIQ_OK;
}

void soiq_close(soiq_engine* engine) { delete engine; }

const char* soiq_last_error(const soiq_engine* engine) {
  return engine == nullptr ? "" : engine->last_error.c_str();
}

soiq_status soiq_set_option(soiq_engine* engine, const char* key, const char* value) {
  if (engine == nullptr || key == nullptr || value == nullptr) return SOIQ_USAGE_ERROR;
  if (engine->engine) {
    engine->last_error = "options must be set before the first command";
    return SOIQ_USAGE_ERROR;
  }
  try {
    std::string k = key, v = value;
    if (k == "seed") {
      engine->config.seed = std::stoull(v);
    } else if (k == "workers") {
      engine->config.workers = std::stoi(v);
    } else if (k == "run_id") {
      engine->config.run_id = v;
    } else if (k == "dry_run") {
      engine->config.dry_run = v == "1" || v == "true";
    } else {
      engine->last_error = "unknown option: " + k;
      return SOIQ_USAGE_ERROR;
    }
    return SOIQ_OK;
  } catch (const std::exception& e) {
    engine->last_error = std::string("invalid option value: ") + e.what();
    return SOIQ_USAGE_ERROR;
  }
}

soiq_status soiq_build_graph(soiq_engine* engine, const char* corpus_dir,
                             char** out_summary_json) {
  if (corpus_dir == nullptr) return SOIQ_USAGE_ERROR;
  return guarded(engine, [&](Engine& e) {
    auto summary = e.build_graph(corpus_dir);
    if (out_summary_json != nullptr) *out_summary_json = dup_string(summary.dump(2));
  });
}

soiq_status soiq_hierarchy(soiq_engine* engine, const char* kind, char** out_summary_json) {
  return guarded(engine, [&](Engine& e) {
    auto summary = e.hierarchy(kind == nullptr ? "both" : kind);
    if (out_summary_json != nullptr) *out_summary_json = dup_string(summary.dump(2));
  });
}

soiq_status soiq_ideate(soiq_engine* engine, const char* topics_file, char** out_summary_json) {
  if (topics_file == nullptr) return SOIQ_USAGE_ERROR;
  return guarded(engine, [&](Engine& e) {
    auto summary = e.ideate(topics_file);
    if (out_summary_json != nullptr) *out_summary_json = dup_string(summary.dump(2));
  });
}

soiq_status soiq_evaluate(soiq_engine* engine, const char* sets_json, char** out_report_json) {
  if (sets_json == nullptr) return SOIQ_USAGE_ERROR;
  return guarded(engine, [&](Engine& e) {
    auto j = nlohmann::ordered_json::parse(sets_json, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw soiq::UsageError("sets_json must be a JSON object of method -> directory");
    }
    std::map<std::string, std::string> sets;
    for (const auto& [method, dir] : j.items()) sets[method] = dir.get<std::string>();
    auto report = e.evaluate(sets);
    if (out_report_json != nullptr) *out_report_json = dup_string(report.dump(2));
  });
}

soiq_status soiq_validate_graph(soiq_engine* engine, char** out_report_json) {
  return guarded(engine, [&](Engine& e) {
    auto report = e.validate_graph();
    if (out_report_json != nullptr) *out_report_json = dup_string(report.dump(2));
    if (!report["ok"].get<bool>()) {
      throw soiq::ValidationError("graph validation found violations");
    }
  });
}

void soiq_free(char* text) { std::free(text); }

}  // extern "C"
