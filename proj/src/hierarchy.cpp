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

#include "soiq/hierarchy.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <json.hpp>

#include "soiq/errors.hpp"
#include "soiq/prompts.hpp"
#include "soiq/util.hpp"

namespace soiq {

using Json = nlohmann::ordered_json;

namespace {

std::optional<MergeDecision> parse_merge_reply(const std::string& reply) {
  for (const FencedBlock& block : find_fenced_blocks(reply)) {
    Json j = Json::parse(block.body, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("merge")) continue;
    if (!j["merge"].is_boolean()) return std::nullopt;
    MergeDecision d;
    d.merge = j["merge"].get<bool>();
    if (d.merge) {
      if (!j.contains("parent_name") || !j.contains("parent_description")) return std::nullopt;
      d.parent_name = trim(j["parent_name"].get<std::string>());
      d.parent_description = trim(j["parent_description"].get<std::string>());
      if (d.parent_name.empty() || d.parent_description.empty()) return std::nullopt;
      if (j.contains("children")) {
        if (!j["children"].is_array()) return std::nullopt;
        for (const Json& c : j["children"]) d.children.push_back(c.get<std::string>());
      }
    }
    return d;
  }
  return std::nullopt;
}

std::string merge_prompt_user(const MotivGraph& g, NodeKind kind, const std::string& focal,
                              const std::vector<std::string>& candidates) {
  std::string text;
  text += "Node type: " + to_string(kind) + "\n\nFocal node:\n";
  const MotivNode& f = g.node(focal);
  text += "- " + f.name + ": " + f.description + "\n\nSimilar nodes:\n";
  for (const std::string& id : candidates) {
    const MotivNode& n = g.node(id);
    text += "- " + n.name + ": " + n.description + "\n";
  }
  return text;
}

// The working-set loop over an explicit node set.
PassReport run_pass_over(GraphStore& graph, IndexStore& index, Embedder& embedder, NodeKind kind,
                         int level, std::vector<std::string> initial, const ChatEndpoint& llm,
                         std::uint64_t rng_seed, const HierarchyOptions& options) {
  PassReport report;
  report.kind = kind;
  report.level = level;

  std::sort(initial.begin(), initial.end());
  auto snapshot = graph.snapshot();

  // Nodes missing from the index (e.g. a graph loaded without its
  // embeddings sidecar) are embedded on demand before the pass begins.
  {
    auto idx = index.snapshot();
    std::vector<std::string> missing;
    for (const std::string& id : initial) {
      if (!idx->contains(id)) missing.push_back(id);
    }
    if (!missing.empty()) {
      std::vector<std::pair<std::string, Embedding>> vecs;
      for (const std::string& id : missing) {
        vecs.push_back({id, embedder.embed(snapshot->node(id).description)});
      }
      index.write([&](EmbeddingIndex& w) {
        for (auto& [id, v] : vecs) w.add(id, snapshot->node(id).name, v);
      });
    }
  }
  auto idx = index.snapshot();

  // Focal order: a seeded shuffle fixed at pass start.
  std::vector<std::string> order = initial;
  Rng rng(rng_seed);
  rng.shuffle(order);

  std::set<std::string> working(initial.begin(), initial.end());
  std::optional<std::set<std::string>> restrict_ids{std::in_place, initial.begin(), initial.end()};

  for (const std::string& focal : order) {
    if (working.count(focal) == 0) continue;  // merged away earlier in this pass
    report.focal_sequence.push_back(focal);

    std::vector<std::string> filtered;
    if (working.size() > 1) {
      const Embedding* q = idx->find_vector(focal);
      if (q != nullptr) {
        // k most similar among the pass's initial set, then keep those
        // still in the working set.
        std::vector<ScoredHit> hits = idx->top_k(*q, options.k + 1, restrict_ids);
        std::size_t taken = 0;
        for (const ScoredHit& hit : hits) {
          if (hit.id == focal) continue;
          if (taken == options.k) break;
          ++taken;
          if (working.count(hit.id) == 0) continue;
          if (options.similarity_floor && hit.score < *options.similarity_floor) continue;
          filtered.push_back(hit.id);
        }
      }
    }

    if (filtered.empty()) {
      working.erase(focal);
      continue;
    }

    std::vector<std::string> group = filtered;
    group.insert(group.begin(), focal);

    std::optional<MergeDecision> decision;
    try {
      std::string user = merge_prompt_user(*snapshot, kind, focal, filtered);
      for (int attempt = 0; attempt <= options.decision_retries; ++attempt) {
        std::string reply = llm.complete({{Role::System, std::string(prompts::kHierarchySystem)},
                                          {Role::User, user}},
                                         "hierarchy:" + focal);
        decision = parse_merge_reply(reply);
        if (decision.has_value()) {
          // A parent name that collides with an existing node would merge
          // two unrelated concepts; treat it as an invalid reply.
          if (decision->merge &&
              snapshot->find_by_name(kind, decision->parent_name) != nullptr) {
            decision.reset();
          }
        }
        if (decision.has_value()) break;
      }
    } catch (const TransportError& e) {
      report.complete = false;
      report.error = e.what();
      return report;
    }
    if (!decision.has_value() || !decision->merge) {
      working.erase(focal);
      continue;
    }

    // Resolve the chosen children; default is the whole candidate group.
    // The focal node is always a child of the new parent.
    std::vector<std::string> children;
    if (decision->children.empty()) {
      children = filtered;
    } else {
      std::map<std::string, std::string> by_name;
      for (const std::string& id : filtered) {
        by_name[normalize_name(snapshot->node(id).name)] = id;
      }
      for (const std::string& raw : decision->children) {
        auto it = by_name.find(normalize_name(raw));
        if (it != by_name.end()) children.push_back(it->second);
      }
      std::sort(children.begin(), children.end());
      children.erase(std::unique(children.begin(), children.end()), children.end());
    }
    if (children.empty()) {  // provider picked nobody usable
      working.erase(focal);
      continue;
    }
    children.insert(children.begin(), focal);

    int parent_level = 0;
    for (const std::string& id : children) {
      parent_level = std::max(parent_level, snapshot->node(id).level);
    }
    parent_level += 1;

    Embedding parent_vec = embedder.embed(decision->parent_description);
    std::string parent_id = graph.write([&](MotivGraph& g) {
      std::string pid =
          g.create_node(kind, decision->parent_name, decision->parent_description, parent_level);
      for (const std::string& child : children) {
        g.add_edge(EdgeKind::ParentOf, pid, child);
        ++report.edges_created;
      }
      return pid;
    });
    index.write([&](EmbeddingIndex& w) { w.add(parent_id, decision->parent_name, parent_vec); });
    snapshot = graph.snapshot();

    report.parent_ids.push_back(parent_id);
    ++report.parents_created;
    for (const std::string& child : children) working.erase(child);
  }

  return report;
}

}  // namespace

PassReport run_parent_pass(GraphStore& graph, IndexStore& index, Embedder& embedder, NodeKind kind,
                           int level, const ChatEndpoint& llm, std::uint64_t rng_seed,
                           const HierarchyOptions& options) {
  if (kind == NodeKind::Solution) {
    throw UsageError("solution nodes do not take parents");
  }
  std::vector<std::string> initial =
      graph.read([&](const MotivGraph& g) { return g.node_ids_of(kind, level); });
  return run_pass_over(graph, index, embedder, kind, level, std::move(initial), llm, rng_seed,
                       options);
}

std::vector<PassReport> run_until_stable(GraphStore& graph, IndexStore& index, Embedder& embedder,
                                         NodeKind kind, const ChatEndpoint& llm,
                                         std::uint64_t rng_seed, const HierarchyOptions& options) {
  if (kind == NodeKind::Solution) {
    throw UsageError("solution nodes do not take parents");
  }
  if (options.max_levels < 1) throw UsageError("max_levels must be >= 1");

  std::vector<PassReport> reports;
  std::vector<std::string> current =
      graph.read([&](const MotivGraph& g) { return g.node_ids_of(kind, 0); });
  int level = 0;
  for (std::size_t pass = 0; pass < options.max_levels; ++pass) {
    if (current.empty()) break;
    PassReport report = run_pass_over(graph, index, embedder, kind, level, current, llm,
                                      mix_seed(rng_seed, pass), options);
    bool done = report.parents_created == 0 || !report.complete;
    current = report.parent_ids;
    level += 1;
    reports.push_back(std::move(report));
    if (done) break;
  }
  return reports;
}

}  // namespace soiq
