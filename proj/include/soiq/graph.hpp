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
#include <memory>
#include <optional>
#include <set>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

namespace soiq {

// The three node types of the motivation graph. A problem is a research
// task or domain, a challenge is a specific difficulty inside a problem,
// and a solution is a concrete method addressing a challenge.
enum class NodeKind { Problem, Challenge, Solution };

// ParentOf links two nodes of the same kind (problems or challenges only)
// from the more abstract parent to the child. ProblemChallenge and
// ChallengeSolution carry the motivation triples.
enum class EdgeKind { ParentOf, ProblemChallenge, ChallengeSolution };

enum class EdgeDirection { Outgoing, Incoming };

std::string to_string(NodeKind kind);
std::string to_string(EdgeKind kind);
std::optional<NodeKind> parse_node_kind(std::string_view text);
std::optional<EdgeKind> parse_edge_kind(std::string_view text);

struct MotivNode {
  std::string id;
  NodeKind kind = NodeKind::Problem;
  std::string name;
  std::string description;
  std::set<std::string> sources;
  // 0 = extracted leaf, >= 1 = synthesized parent.
  int level = 0;
};

struct MotivEdge {
  std::string id;
  EdgeKind kind = EdgeKind::ParentOf;
  std::string src;
  std::string dst;
};

// A connected problem -> challenge -> solution path.
struct MotivTriple {
  std::string problem;
  std::string challenge;
  std::string solution;

  friend bool operator==(const MotivTriple&, const MotivTriple&) = default;
};

struct NeighborEntry {
  EdgeKind kind;
  EdgeDirection direction;
  MotivNode node;
};

struct GraphViolation {
  // One of: "schema", "duplicate-name", "parent-cycle", "level".
  std::string check;
  std::string detail;
  std::vector<std::string> ids;
};

struct GraphStats {
  std::size_t problem_nodes = 0;
  std::size_t challenge_nodes = 0;
  std::size_t solution_nodes = 0;
  std::size_t parent_nodes = 0;  // nodes with level >= 1
  std::size_t parent_of_edges = 0;
  std::size_t problem_challenge_edges = 0;
  std::size_t challenge_solution_edges = 0;
  std::size_t total_nodes = 0;
  std::size_t total_edges = 0;
};

// In-memory typed store. Plain value semantics and not thread-safe;
// GraphStore below adds the reader/writer discipline.
class MotivGraph {
 public:
  // Merging insert: an existing (kind, normalized name) node gains the new
  // source and keeps its id; otherwise a fresh level-0 node is created.
  std::string add_node(NodeKind kind, std::string_view name,
                       std::string_view description, std::string_view source);

  // Non-merging insert used for synthesized parents. Throws ValidationError
  // when the (kind, normalized name) slot is already taken.
  std::string create_node(NodeKind kind, std::string_view name,
                          std::string_view description, int level,
                          const std::set<std::string>& sources = {});

  // Stores the edge exactly once; a duplicate (kind, src, dst) returns the
  // existing id. Enforces endpoint-kind rules and rejects ParentOf cycles.
  std::string add_edge(EdgeKind kind, const std::string& src, const std::string& dst);

  bool has_node(const std::string& id) const;
  const MotivNode& node(const std::string& id) const;
  const MotivNode* find_node(const std::string& id) const;
  const MotivNode* find_by_name(NodeKind kind, std::string_view name) const;

  // Every incident edge with the far endpoint, both directions, ordered by
  // (edge kind, neighbor name, direction, neighbor id).
  std::vector<NeighborEntry> neighbors(const std::string& id) const;

  // Enumerates complete P->C->S paths sorted by (problem, challenge,
  // solution) name. With a seed the full enumeration is shuffled
  // (Fisher-Yates) before truncation, giving a uniform sample without
  // replacement. limit == 0 means no truncation.
  std::vector<MotivTriple> list_triples(std::size_t limit = 0,
                                        std::optional<std::uint64_t> rng_seed = std::nullopt) const;

  // Full invariant scan; empty result iff the graph is well-formed.
  std::vector<GraphViolation> validate() const;

  GraphStats stats() const;

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  // Sorted by id.
  std::vector<const MotivNode*> nodes_sorted() const;
  std::vector<const MotivEdge*> edges_sorted() const;
  std::vector<std::string> node_ids_of(NodeKind kind, std::optional<int> level = std::nullopt) const;

  // Persistence: nodes.jsonl + edges.jsonl under dir, UTF-8, one record per
  // line, nodes sorted by id and edges canonically by (kind, src, dst).
  // load() is permissive: it restores whatever the files say and leaves
  // invariant checking to validate().
  void save(const std::string& dir) const;
  static MotivGraph load(const std::string& dir);

 private:
  std::string next_node_id(NodeKind kind);
  std::string next_edge_id();
  bool parent_path_exists(const std::string& from, const std::string& to) const;

  std::map<std::string, MotivNode> nodes_;
  std::map<std::string, MotivEdge> edges_;
  // "kind|normalized name" -> node id
  std::map<std::string, std::string> name_index_;
  // "kind|src|dst" -> edge id
  std::map<std::string, std::string> edge_index_;
  // node id -> edge ids
  std::map<std::string, std::vector<std::string>> out_edges_;
  std::map<std::string, std::vector<std::string>> in_edges_;
  std::uint64_t next_node_seq_ = 1;
  std::uint64_t next_edge_seq_ = 1;
};

// Many concurrent readers, single writer. Agents receive immutable
// snapshots so a running dialogue never observes mid-ingest state.
class GraphStore {
 public:
  GraphStore() = default;
  explicit GraphStore(MotivGraph graph) : graph_(std::move(graph)) {}

  template <typename F>
  auto read(F&& fn) const {
    std::shared_lock lock(mutex_);
    return fn(static_cast<const MotivGraph&>(graph_));
  }

  template <typename F>
  auto write(F&& fn) {
    std::unique_lock lock(mutex_);
    return fn(graph_);
  }

  std::shared_ptr<const MotivGraph> snapshot() const {
    std::shared_lock lock(mutex_);
    return std::make_shared<const MotivGraph>(graph_);
  }

  void reset(MotivGraph graph) {
    std::unique_lock lock(mutex_);
    graph_ = std::move(graph);
  }

 private:
  mutable std::shared_mutex mutex_;
  MotivGraph graph_;
};

}  // namespace soiq
