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

#include <map>
#include <memory>
#include <string>

#include <json.hpp>

#include "soiq/config.hpp"
#include "soiq/embedding.hpp"
#include "soiq/gateway.hpp"
#include "soiq/graph.hpp"
#include "soiq/tools.hpp"

namespace soiq {

// The operator pipeline behind the CLI verbs. One engine owns the graph,
// the index, the provider gateway, and the run directory
// (<run_dir>/<run_id>/: config snapshot, transcripts, idea sets, reports,
// request log). All commands are deterministic under scripted providers
// and a fixed seed.
class Engine {
 public:
  explicit Engine(RunConfig config);

  // Ingests every file of the corpus directory (sorted by name) and
  // persists graph + embeddings under graph_dir. The summary carries the
  // same count categories a full-corpus build would be compared on:
  // per-kind node counts, edge counts per kind, parent counts.
  nlohmann::ordered_json build_graph(const std::string& corpus_dir);

  // kind: "problem", "challenge", or "both".
  nlohmann::ordered_json hierarchy(const std::string& kind);

  // One exploration + deliberation session per topic x ideas_per_topic.
  // Accepted ideas land in <run>/ideas/, every transcript in
  // <run>/transcripts/.
  nlohmann::ordered_json ideate(const std::string& topics_file);

  // sets: method name -> idea-set directory (as written by ideate).
  nlohmann::ordered_json evaluate(const std::map<std::string, std::string>& sets);

  nlohmann::ordered_json validate_graph();

  const RunConfig& config() const { return config_; }
  std::string run_path() const;

 private:
  void load_state();
  void save_state();
  void prepare_run_dir();
  ChatEndpoint endpoint(const std::string& role);
  nlohmann::ordered_json session_summary(const std::string& topics_file);

  RunConfig config_;
  Gateway gateway_;
  GraphStore graph_;
  IndexStore index_;
  std::shared_ptr<Embedder> embedder_;
  std::shared_ptr<LiteratureClient> literature_;
  std::map<std::string, std::shared_ptr<ChatProvider>> providers_;
  bool run_dir_ready_ = false;
};

}  // namespace soiq
