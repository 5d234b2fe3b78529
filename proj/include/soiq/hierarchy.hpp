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
#include <optional>
#include <string>
#include <vector>

#include "soiq/embedding.hpp"
#include "soiq/gateway.hpp"
#include "soiq/graph.hpp"

namespace soiq {

// Provider verdict on whether a focal node and its similar candidates
// form a more general concept.
struct MergeDecision {
  bool merge = false;
  std::string parent_name;
  std::string parent_description;
  std::vector<std::string> children;  // node ids, focal included
};

struct PassReport {
  NodeKind kind = NodeKind::Problem;
  int level = 0;  // level of the processed nodes
  std::size_t parents_created = 0;
  std::size_t edges_created = 0;
  std::vector<std::string> focal_sequence;  // each node id at most once
  std::vector<std::string> parent_ids;
  bool complete = true;
  std::string error;
};

struct HierarchyOptions {
  std::size_t k = 5;
  int decision_retries = 1;
  std::optional<double> similarity_floor;  // minimum cosine for candidates
  std::size_t max_levels = 3;
};

// One pass of the working-set loop over the nodes of `kind` at `level`:
// nodes become focal in a seeded-shuffle order fixed at pass start; each
// focal node's k nearest neighbors still in the working set go to the
// provider for a merge decision; merges synthesize a parent node (level =
// 1 + max child level) with parent_of edges to every merged child, and
// remove focal plus children from the set. A provider transport failure
// aborts the pass cleanly: work done so far stays, complete=false.
PassReport run_parent_pass(GraphStore& graph, IndexStore& index, Embedder& embedder, NodeKind kind,
                           int level, const ChatEndpoint& llm, std::uint64_t rng_seed,
                           const HierarchyOptions& options = {});

// Iterates run_parent_pass, feeding each pass only the parents the
// previous one created, until a pass creates no parents or max_levels
// passes have run.
std::vector<PassReport> run_until_stable(GraphStore& graph, IndexStore& index, Embedder& embedder,
                                         NodeKind kind, const ChatEndpoint& llm,
                                         std::uint64_t rng_seed,
                                         const HierarchyOptions& options = {});

}  // namespace soiq
