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

// soiq command line. Talks to the engine exclusively through the shared
// library's C API.

#include <cstdio>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "soiq.h"

namespace {

struct EngineCloser {
  void operator()(soiq_engine* e) const { soiq_close(e); }
};
using EnginePtr = std::unique_ptr<soiq_engine, EngineCloser>;

struct GlobalOptions {
  std::string config_path;
  std::string seed;
  int workers = 0;
  std::string run_id;
  bool dry_run = false;
};

EnginePtr open_engine(const GlobalOptions& opts, int& exit_code) {
  soiq_engine* raw = nullptr;
  soiq_status status = soiq_open(opts.config_path.c_str(), &raw);
  EnginePtr engine(raw);
  if (status != SOIQ_OK) {
    std::fprintf(stderr, "error: cannot load config %s (status %d)\n", opts.config_path.c_str(),
                 static_cast<int>(status));
    exit_code = static_cast<int>(status);
    return nullptr;
  }
  auto set = [&](const char* key, const std::string& value) {
    if (value.empty()) return true;
    if (soiq_set_option(engine.get(), key, value.c_str()) != SOIQ_OK) {
      std::fprintf(stderr, "error: %s\n", soiq_last_error(engine.get()));
      exit_code = static_cast<int>(SOIQ_USAGE_ERROR);
      return false;
    }
    return true;
  };
  if (!set("seed", opts.seed)) return nullptr;
  if (opts.workers > 0 && !set("workers", std::to_string(opts.workers))) return nullptr;
  if (!set("run_id", opts.run_id)) return nullptr;
  if (opts.dry_run && !set("dry_run", "1")) return nullptr;
  return engine;
}

int finish(soiq_engine* engine, soiq_status status, char* output) {
  if (output != nullptr) {
    std::printf("%s\n", output);
    soiq_free(output);
  }
  if (status != SOIQ_OK) {
    std::fprintf(stderr, "error: %s\n", soiq_last_error(engine));
  }
  return static_cast<int>(status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"soiq: motivation-graph construction, Socratic ideation, and idea evaluation"};
  app.require_subcommand(1);

  GlobalOptions opts;
  app.add_option("--config", opts.config_path, "run config JSON")->required();
  app.add_option("--seed", opts.seed, "override the config seed");
  app.add_option("--workers", opts.workers, "override the worker count");
  app.add_option("--run-id", opts.run_id, "name of the run directory");
  app.add_flag("--dry-run", opts.dry_run, "validate inputs and print the plan, no side effects");

  std::string corpus_dir;
  auto* build = app.add_subcommand("build-graph", "extract motivation triples from a paper corpus");
  build->add_option("corpus", corpus_dir, "directory of paper files")->required();

  std::string kind = "both";
  auto* hier = app.add_subcommand("hierarchy", "synthesize parent nodes over similar concepts");
  hier->add_option("kind", kind, "problem, challenge, or both");

  std::string topics_file;
  auto* ideate = app.add_subcommand("ideate", "run exploration + deliberation sessions per topic");
  ideate->add_option("topics", topics_file, "file with one topic per line")->required();

  std::vector<std::string> set_specs;
  auto* evaluate = app.add_subcommand("evaluate", "diversity, direct scores, and tournament ratings");
  evaluate->add_option("--set", set_specs, "method=idea-set-directory (repeatable)")
      ->required()
      ->expected(-1);

  auto* validate = app.add_subcommand("validate-graph", "scan the stored graph for invariant violations");

  CLI11_PARSE(app, argc, argv);

  int exit_code = 0;
  EnginePtr engine = open_engine(opts, exit_code);
  if (!engine) return exit_code;

  char* output = nullptr;
  if (build->parsed()) {
    return finish(engine.get(), soiq_build_graph(engine.get(), corpus_dir.c_str(), &output),
                  output);
  }
  if (hier->parsed()) {
    return finish(engine.get(), soiq_hierarchy(engine.get(), kind.c_str(), &output), output);
  }
  if (ideate->parsed()) {
    return finish(engine.get(), soiq_ideate(engine.get(), topics_file.c_str(), &output), output);
  }
  if (evaluate->parsed()) {
    std::string sets_json = "{";
    bool first = true;
    for (const std::string& spec : set_specs) {
      std::size_t eq = spec.find('=');
      if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
        std::fprintf(stderr, "error: --set expects method=directory, got: %s\n", spec.c_str());
        return static_cast<int>(SOIQ_USAGE_ERROR);
      }
      if (!first) sets_json += ",";
      first = false;
      auto quote = [](const std::string& s) {
        std::string out = "\"";
        for (char c : s) {
          if (c == '"' || c == '\\') out.push_back('\\');
          out.push_back(c);
        }
        return out + "\"";
      };
      sets_json += quote(spec.substr(0, eq)) + ":" + quote(spec.substr(eq + 1));
    }
    sets_json += "}";
    return finish(engine.get(), soiq_evaluate(engine.get(), sets_json.c_str(), &output), output);
  }
  if (validate->parsed()) {
    return finish(engine.get(), soiq_validate_graph(engine.get(), &output), output);
  }
  return static_cast<int>(SOIQ_USAGE_ERROR);
}
