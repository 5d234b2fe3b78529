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

#include "soiq/graph.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "soiq/errors.hpp"
#include "soiq/util.hpp"

namespace soiq {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

std::string to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::Problem: return "problem";
    case NodeKind::Challenge: return "challenge";
    case NodeKind::Solution: return "solution";
  }
  return "problem";
}

std::string to_string(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::ParentOf: return "parent_of";
    case EdgeKind::ProblemChallenge: return "problem_challenge";
    case EdgeKind::ChallengeSolution: return "challenge_solution";
  }
  return "parent_of";
}

std::optional<NodeKind> parse_node_kind(std::string_view text) {
  std::string t = to_lower(trim(text));
  if (t == "problem") return NodeKind::Problem;
  if (t == "challenge") return NodeKind::Challenge;
  if (t == "solution") return NodeKind::Solution;
  return std::nullopt;
}

std::optional<EdgeKind> parse_edge_kind(std::string_view text) {
  std::string t = to_lower(trim(text));
  if (t == "parent_of" || t == "parent-of") return EdgeKind::ParentOf;
  if (t == "problem_challenge" || t == "problem-challenge") return EdgeKind::ProblemChallenge;
  if (t == "challenge_solution" || t == "challenge-solution") return EdgeKind::ChallengeSolution;
  return std::nullopt;
}

namespace {

char kind_letter(NodeKind kind) {
  switch (kind) {
    case NodeKind::Problem: return 'P';
    case NodeKind::Challenge: return 'C';
    case NodeKind::Solution: return 'S';
  }
  return 'P';
}

std::string name_key(NodeKind kind, std::string_view name) {
  return to_string(kind) + "|" + normalize_name(name);
}

std::string edge_key(EdgeKind kind, const std::string& src, const std::string& dst) {
  return to_string(kind) + "|" + src + "|" + dst;
}

std::string pad_seq(std::uint64_t seq) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%06llu", static_cast<unsigned long long>(seq));
  return buf;
}

// Numeric tail of an id like "P000123"; 0 when unparseable.
std::uint64_t id_seq(const std::string& id) {
  std::size_t i = 0;
  while (i < id.size() && !std::isdigit(static_cast<unsigned char>(id[i]))) ++i;
  std::uint64_t v = 0;
  for (; i < id.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(id[i]))) return 0;
    v = v * 10 + static_cast<std::uint64_t>(id[i] - '0');
  }
  return v;
}

}  // namespace

std::string MotivGraph::next_node_id(NodeKind kind) {
  return std::string(1, kind_letter(kind)) + pad_seq(next_node_seq_++);
}

std::string MotivGraph::next_edge_id() {
  return "E" + pad_seq(next_edge_seq_++);
}

std::string MotivGraph::add_node(NodeKind kind, std::string_view name,
                                 std::string_view description, std::string_view source) {
  std::string norm = normalize_name(name);
  if (norm.empty()) throw ValidationError("node name must be non-empty");
  if (trim(description).empty()) throw ValidationError("node description must be non-empty");

  auto it = name_index_.find(name_key(kind, name));
  if (it != name_index_.end()) {
    MotivNode& existing = nodes_.at(it->second);
    if (!source.empty()) existing.sources.insert(std::string(source));
    return existing.id;
  }

  MotivNode node;
  node.id = next_node_id(kind);
  node.kind = kind;
  node.name = std::string(name);
  node.description = std::string(description);
  if (!source.empty()) node.sources.insert(std::string(source));
  node.level = 0;
  name_index_[name_key(kind, name)] = node.id;
  std::string id = node.id;
  nodes_.emplace(id, std::move(node));
  return id;
}

std::string MotivGraph::create_node(NodeKind kind, std::string_view name,
                                    std::string_view description, int level,
                                    const std::set<std::string>& sources) {
  std::string norm = normalize_name(name);
  if (norm.empty()) throw ValidationError("node name must be non-empty");
  if (trim(description).empty()) throw ValidationError("node description must be non-empty");
  if (level < 0) throw ValidationError("node level must be non-negative");
  std::string key = name_key(kind, name);
  if (name_index_.count(key) != 0) {
    throw ValidationError("node name already taken: " + std::string(name) + " (" + to_string(kind) + ")");
  }
  MotivNode node;
  node.id = next_node_id(kind);
  node.kind = kind;
  node.name = std::string(name);
  node.description = std::string(description);
  node.sources = sources;
  node.level = level;
  name_index_[key] = node.id;
  std::string id = node.id;
  nodes_.emplace(id, std::move(node));
  return id;
}

bool MotivGraph::parent_path_exists(const std::string& from, const std::string& to) const {
  // DFS over ParentOf out-edges.
  std::vector<const std::string*> stack{&from};
  std::set<std::string> seen;
  while (!stack.empty()) {
    const std::string& cur = *stack.back();
    stack.pop_back();
    if (cur == to) return true;
    if (!seen.insert(cur).second) continue;
    auto it = out_edges_.find(cur);
    if (it == out_edges_.end()) continue;
    for (const std::string& eid : it->second) {
      const MotivEdge& e = edges_.at(eid);
      if (e.kind == EdgeKind::ParentOf) stack.push_back(&e.dst);
    }
  }
  return false;
}

std::string MotivGraph::add_edge(EdgeKind kind, const std::string& src, const std::string& dst) {
  const MotivNode* s = find_node(src);
  const MotivNode* d = find_node(dst);
  if (s == nullptr) throw NotFoundError("unknown edge endpoint: " + src);
  if (d == nullptr) throw NotFoundError("unknown edge endpoint: " + dst);

  switch (kind) {
    case EdgeKind::ParentOf:
      if (s->kind != d->kind || s->kind == NodeKind::Solution) {
        throw SchemaError("parent_of requires two problem nodes or two challenge nodes");
      }
      break;
    case EdgeKind::ProblemChallenge:
      if (s->kind != NodeKind::Problem || d->kind != NodeKind::Challenge) {
        throw SchemaError("problem_challenge must connect a problem to a challenge");
      }
      break;
    case EdgeKind::ChallengeSolution:
      if (s->kind != NodeKind::Challenge || d->kind != NodeKind::Solution) {
        throw SchemaError("challenge_solution must connect a challenge to a solution");
      }
      break;
  }

  std::string key = edge_key(kind, src, dst);
  auto it = edge_index_.find(key);
  if (it != edge_index_.end()) return it->second;

  if (kind == EdgeKind::ParentOf && (src == dst || parent_path_exists(dst, src))) {
    throw CycleError("parent_of edge " + src + " -> " + dst + " would close a cycle");
  }

  MotivEdge edge;
  edge.id = next_edge_id();
  edge.kind = kind;
  edge.src = src;
  edge.dst = dst;
  edge_index_[key] = edge.id;
  out_edges_[src].push_back(edge.id);
  in_edges_[dst].push_back(edge.id);
  std::string id = edge.id;
  edges_.emplace(id, std::move(edge));
  return id;
}

bool MotivGraph::has_node(const std::string& id) const { return nodes_.count(id) != 0; }

const MotivNode& MotivGraph::node(const std::string& id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw NotFoundError("unknown node: " + id);
  return it->second;
}

const MotivNode* MotivGraph::find_node(const std::string& id) const {
  auto it = nodes_.find(id);
  return it == nodes_.end() ? nullptr : &it->second;
}

const MotivNode* MotivGraph::find_by_name(NodeKind kind, std::string_view name) const {
  auto it = name_index_.find(name_key(kind, name));
  return it == name_index_.end() ? nullptr : &nodes_.at(it->second);
}

std::vector<NeighborEntry> MotivGraph::neighbors(const std::string& id) const {
  if (!has_node(id)) throw NotFoundError("unknown node: " + id);
  std::vector<NeighborEntry> out;
  auto push = [&](const MotivEdge& e, EdgeDirection dir) {
    const std::string& far = dir == EdgeDirection::Outgoing ? e.dst : e.src;
    const MotivNode* n = find_node(far);
    if (n == nullptr) return;  // dangling endpoints are only reported by validate()
    out.push_back({e.kind, dir, *n});
  };
  if (auto it = out_edges_.find(id); it != out_edges_.end()) {
    for (const std::string& eid : it->second) push(edges_.at(eid), EdgeDirection::Outgoing);
  }
  if (auto it = in_edges_.find(id); it != in_edges_.end()) {
    for (const std::string& eid : it->second) push(edges_.at(eid), EdgeDirection::Incoming);
  }
  std::sort(out.begin(), out.end(), [](const NeighborEntry& a, const NeighborEntry& b) {
    if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind);
    std::string an = normalize_name(a.node.name), bn = normalize_name(b.node.name);
    if (an != bn) return an < bn;
    if (a.direction != b.direction) return a.direction == EdgeDirection::Outgoing;
    return a.node.id < b.node.id;
  });
  return out;
}

std::vector<MotivTriple> MotivGraph::list_triples(std::size_t limit,
                                                  std::optional<std::uint64_t> rng_seed) const {
  // challenge id -> (incoming problems, outgoing solutions)
  std::map<std::string, std::pair<std::vector<std::string>, std::vector<std::string>>> by_challenge;
  for (const auto& [eid, e] : edges_) {
    if (e.kind == EdgeKind::ProblemChallenge && has_node(e.src) && has_node(e.dst)) {
      by_challenge[e.dst].first.push_back(e.src);
    } else if (e.kind == EdgeKind::ChallengeSolution && has_node(e.src) && has_node(e.dst)) {
      by_challenge[e.src].second.push_back(e.dst);
    }
  }
  std::vector<MotivTriple> triples;
  for (auto& [cid, pair] : by_challenge) {
    for (const std::string& pid : pair.first) {
      for (const std::string& sid : pair.second) {
        triples.push_back({pid, cid, sid});
      }
    }
  }
  auto sort_name = [&](const std::string& id) { return normalize_name(node(id).name); };
  std::sort(triples.begin(), triples.end(), [&](const MotivTriple& a, const MotivTriple& b) {
    auto ka = std::make_tuple(sort_name(a.problem), sort_name(a.challenge), sort_name(a.solution),
                              a.problem, a.challenge, a.solution);
    auto kb = std::make_tuple(sort_name(b.problem), sort_name(b.challenge), sort_name(b.solution),
                              b.problem, b.challenge, b.solution);
    return ka < kb;
  });
  if (rng_seed.has_value()) {
    Rng rng(*rng_seed);
    rng.shuffle(triples);
  }
  if (limit > 0 && triples.size() > limit) triples.resize(limit);
  return triples;
}

std::vector<GraphViolation> MotivGraph::validate() const {
  std::vector<GraphViolation> report;

  // Edge schema.
  for (const auto& [eid, e] : edges_) {
    const MotivNode* s = find_node(e.src);
    const MotivNode* d = find_node(e.dst);
    if (s == nullptr || d == nullptr) {
      report.push_back({"schema", "edge references a missing node", {eid, e.src, e.dst}});
      continue;
    }
    bool ok = true;
    switch (e.kind) {
      case EdgeKind::ParentOf:
        ok = s->kind == d->kind && s->kind != NodeKind::Solution;
        break;
      case EdgeKind::ProblemChallenge:
        ok = s->kind == NodeKind::Problem && d->kind == NodeKind::Challenge;
        break;
      case EdgeKind::ChallengeSolution:
        ok = s->kind == NodeKind::Challenge && d->kind == NodeKind::Solution;
        break;
    }
    if (!ok) {
      report.push_back({"schema",
                        to_string(e.kind) + " endpoints have kinds " + to_string(s->kind) + " -> " +
                            to_string(d->kind),
                        {eid}});
    }
  }

  // Duplicate (kind, normalized name).
  std::map<std::string, std::vector<std::string>> by_name;
  for (const auto& [id, n] : nodes_) by_name[name_key(n.kind, n.name)].push_back(id);
  for (const auto& [key, ids] : by_name) {
    if (ids.size() > 1) {
      report.push_back({"duplicate-name", "several nodes share the name slot " + key, ids});
    }
  }

  // Empty fields / negative levels.
  for (const auto& [id, n] : nodes_) {
    if (normalize_name(n.name).empty()) report.push_back({"schema", "node has an empty name", {id}});
    if (trim(n.description).empty()) report.push_back({"schema", "node has an empty description", {id}});
    if (n.level < 0) report.push_back({"level", "node level is negative", {id}});
  }

  // ParentOf cycles: iterative coloring DFS.
  std::map<std::string, int> color;  // 0 unseen, 1 on stack, 2 done
  std::function<bool(const std::string&, std::vector<std::string>&)> dfs =
      [&](const std::string& id, std::vector<std::string>& path) -> bool {
    color[id] = 1;
    path.push_back(id);
    if (auto it = out_edges_.find(id); it != out_edges_.end()) {
      for (const std::string& eid : it->second) {
        const MotivEdge& e = edges_.at(eid);
        if (e.kind != EdgeKind::ParentOf || !has_node(e.dst)) continue;
        int c = color[e.dst];
        if (c == 1) {
          report.push_back({"parent-cycle", "parent_of cycle through " + e.dst, path});
          return true;
        }
        if (c == 0 && dfs(e.dst, path)) return true;
      }
    }
    color[id] = 2;
    path.pop_back();
    return false;
  };
  for (const auto& [id, n] : nodes_) {
    if (color[id] == 0) {
      std::vector<std::string> path;
      dfs(id, path);
    }
  }

  // Level consistency.
  for (const auto& [id, n] : nodes_) {
    std::vector<int> child_levels;
    if (auto it = out_edges_.find(id); it != out_edges_.end()) {
      for (const std::string& eid : it->second) {
        const MotivEdge& e = edges_.at(eid);
        if (e.kind != EdgeKind::ParentOf) continue;
        if (const MotivNode* child = find_node(e.dst)) child_levels.push_back(child->level);
      }
    }
    if (n.level >= 1 && child_levels.empty()) {
      report.push_back({"level", "level " + std::to_string(n.level) + " node has no parent_of out-edges", {id}});
    } else if (!child_levels.empty()) {
      int expected = 1 + *std::max_element(child_levels.begin(), child_levels.end());
      if (n.level != expected) {
        report.push_back({"level",
                          "node level " + std::to_string(n.level) + " but children imply " +
                              std::to_string(expected),
                          {id}});
      }
    }
  }

  return report;
}

GraphStats MotivGraph::stats() const {
  GraphStats s;
  for (const auto& [id, n] : nodes_) {
    switch (n.kind) {
      case NodeKind::Problem: ++s.problem_nodes; break;
      case NodeKind::Challenge: ++s.challenge_nodes; break;
      case NodeKind::Solution: ++s.solution_nodes; break;
    }
    if (n.level >= 1) ++s.parent_nodes;
  }
  for (const auto& [id, e] : edges_) {
    switch (e.kind) {
      case EdgeKind::ParentOf: ++s.parent_of_edges; break;
      case EdgeKind::ProblemChallenge: ++s.problem_challenge_edges; break;
      case EdgeKind::ChallengeSolution: ++s.challenge_solution_edges; break;
    }
  }
  s.total_nodes = nodes_.size();
  s.total_edges = edges_.size();
  return s;
}

std::vector<const MotivNode*> MotivGraph::nodes_sorted() const {
  std::vector<const MotivNode*> out;
  out.reserve(nodes_.size());
  for (const auto& [id, n] : nodes_) out.push_back(&n);
  return out;  // std::map iteration is already id-sorted
}

std::vector<const MotivEdge*> MotivGraph::edges_sorted() const {
  std::vector<const MotivEdge*> out;
  out.reserve(edges_.size());
  for (const auto& [id, e] : edges_) out.push_back(&e);
  return out;
}

std::vector<std::string> MotivGraph::node_ids_of(NodeKind kind, std::optional<int> level) const {
  std::vector<std::string> ids;
  for (const auto& [id, n] : nodes_) {
    if (n.kind != kind) continue;
    if (level.has_value() && n.level != *level) continue;
    ids.push_back(id);
  }
  return ids;
}

void MotivGraph::save(const std::string& dir) const {
  fs::create_directories(dir);
  {
    std::ofstream out(fs::path(dir) / "nodes.jsonl", std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write nodes.jsonl under " + dir);
    for (const auto& [id, n] : nodes_) {
      Json j;
      j["id"] = n.id;
      j["kind"] = to_string(n.kind);
      j["name"] = n.name;
      j["description"] = n.description;
      j["sources"] = n.sources;
      j["level"] = n.level;
      out << j.dump() << "\n";
    }
  }
  {
    std::vector<const MotivEdge*> sorted = edges_sorted();
    std::sort(sorted.begin(), sorted.end(), [](const MotivEdge* a, const MotivEdge* b) {
      auto ka = std::make_tuple(static_cast<int>(a->kind), a->src, a->dst);
      auto kb = std::make_tuple(static_cast<int>(b->kind), b->src, b->dst);
      return ka < kb;
    });
    std::ofstream out(fs::path(dir) / "edges.jsonl", std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write edges.jsonl under " + dir);
    for (const MotivEdge* e : sorted) {
      Json j;
      j["kind"] = to_string(e->kind);
      j["src"] = e->src;
      j["dst"] = e->dst;
      out << j.dump() << "\n";
    }
  }
}

MotivGraph MotivGraph::load(const std::string& dir) {
  MotivGraph g;
  fs::path nodes_path = fs::path(dir) / "nodes.jsonl";
  fs::path edges_path = fs::path(dir) / "edges.jsonl";
  if (!fs::exists(nodes_path)) throw IoError("missing " + nodes_path.string());

  std::ifstream nin(nodes_path, std::ios::binary);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(nin, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const std::exception& e) {
      throw IoError("nodes.jsonl line " + std::to_string(lineno) + ": " + e.what());
    }
    MotivNode n;
    n.id = j.at("id").get<std::string>();
    auto kind = parse_node_kind(j.at("kind").get<std::string>());
    if (!kind) throw IoError("nodes.jsonl line " + std::to_string(lineno) + ": unknown kind");
    n.kind = *kind;
    n.name = j.at("name").get<std::string>();
    n.description = j.value("description", std::string{});
    if (j.contains("sources")) {
      for (const auto& s : j["sources"]) n.sources.insert(s.get<std::string>());
    }
    n.level = j.value("level", 0);
    g.name_index_[name_key(n.kind, n.name)] = n.id;  // last record wins; validate() reports dupes
    g.next_node_seq_ = std::max(g.next_node_seq_, id_seq(n.id) + 1);
    g.nodes_[n.id] = std::move(n);
  }

  if (fs::exists(edges_path)) {
    std::ifstream ein(edges_path, std::ios::binary);
    lineno = 0;
    while (std::getline(ein, line)) {
      ++lineno;
      if (trim(line).empty()) continue;
      Json j;
      try {
        j = Json::parse(line);
      } catch (const std::exception& e) {
        throw IoError("edges.jsonl line " + std::to_string(lineno) + ": " + e.what());
      }
      auto kind = parse_edge_kind(j.at("kind").get<std::string>());
      if (!kind) throw IoError("edges.jsonl line " + std::to_string(lineno) + ": unknown kind");
      MotivEdge e;
      e.kind = *kind;
      e.src = j.at("src").get<std::string>();
      e.dst = j.at("dst").get<std::string>();
      std::string key = edge_key(e.kind, e.src, e.dst);
      if (g.edge_index_.count(key) != 0) continue;
      e.id = g.next_edge_id();
      g.edge_index_[key] = e.id;
      g.out_edges_[e.src].push_back(e.id);
      g.in_edges_[e.dst].push_back(e.id);
      g.edges_[e.id] = std::move(e);
    }
  }
  return g;
}

}  // namespace soiq
