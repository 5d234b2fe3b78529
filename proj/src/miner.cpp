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

#include "soiq/miner.hpp"

#include <algorithm>
#include <array>
#include <set>

#include <json.hpp>

#include "soiq/errors.hpp"
#include "soiq/prompts.hpp"
#include "soiq/util.hpp"

namespace soiq {

using Json = nlohmann::ordered_json;

namespace {

void check_word_count(NodeKind kind, std::string_view name, std::size_t lo, std::size_t hi,
                      std::vector<NamingViolation>& out) {
  std::size_t n = split_words(name).size();
  if (n < lo || n > hi) {
    out.push_back({kind, "word-count",
                   to_string(kind) + " name has " + std::to_string(n) + " words, aims for " +
                       std::to_string(lo) + "-" + std::to_string(hi),
                   std::string(name)});
  }
}

// "<difficulty> in <context>": the token "in" with at least one token on
// each side.
bool matches_two_part_pattern(std::string_view name) {
  std::vector<std::string> words = split_words(name);
  for (std::size_t i = 1; i + 1 < words.size(); ++i) {
    if (to_lower(words[i]) == "in") return true;
  }
  return false;
}

}  // namespace

std::vector<NamingViolation> validate_name(NodeKind kind, std::string_view name) {
  std::vector<NamingViolation> out;
  switch (kind) {
    case NodeKind::Problem:
      check_word_count(kind, name, 3, 7, out);
      break;
    case NodeKind::Challenge:
      check_word_count(kind, name, 5, 8, out);
      if (!matches_two_part_pattern(name)) {
        out.push_back({kind, "structure-pattern",
                       "challenge name does not follow \"<difficulty> in <context>\"",
                       std::string(name)});
      }
      break;
    case NodeKind::Solution:
      check_word_count(kind, name, 7, 10, out);
      break;
  }
  return out;
}

std::string extraction_input_from_paper(const std::string& raw) {
  Json j = Json::parse(raw, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return raw;
  const Json* sections = &j;
  if (j.contains("sections") && j["sections"].is_object()) sections = &j["sections"];
  std::string intro;
  if (sections->contains("introduction")) intro = sections->at("introduction").get<std::string>();
  std::string solution;
  for (const char* key : {"solution", "method", "approach"}) {
    if (sections->contains(key)) {
      solution = sections->at(key).get<std::string>();
      break;
    }
  }
  if (intro.empty() && solution.empty()) return raw;
  std::string out;
  if (!intro.empty()) out += "Introduction:\n" + intro + "\n";
  if (!solution.empty()) out += "\nSolution:\n" + solution + "\n";
  return out;
}

namespace {

std::string dedupe_key(const CandidateTriple& t) {
  return normalize_name(t.problem.name) + "|" + normalize_name(t.challenge.name) + "|" +
         normalize_name(t.solution.name);
}

EntitySketch parse_entity(const Json& j, const char* slot) {
  if (!j.is_object() || !j.contains("name") || !j.contains("description")) {
    throw ParseError(std::string("triple slot '") + slot + "' lacks name/description");
  }
  EntitySketch e{j["name"].get<std::string>(), j["description"].get<std::string>()};
  if (trim(e.name).empty() || trim(e.description).empty()) {
    throw ParseError(std::string("triple slot '") + slot + "' has an empty field");
  }
  return e;
}

std::vector<CandidateTriple> parse_extraction_reply(const std::string& reply,
                                                    const std::string& paper_id) {
  for (const FencedBlock& block : find_fenced_blocks(reply)) {
    Json j = Json::parse(block.body, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("triples")) continue;
    if (!j["triples"].is_array()) throw ParseError("\"triples\" must be an array");
    std::vector<CandidateTriple> out;
    std::set<std::string> seen;
    for (const Json& t : j["triples"]) {
      CandidateTriple c;
      c.problem = parse_entity(t.value("problem", Json()), "problem");
      c.challenge = parse_entity(t.value("challenge", Json()), "challenge");
      c.solution = parse_entity(t.value("solution", Json()), "solution");
      c.paper = paper_id;
      if (seen.insert(dedupe_key(c)).second) out.push_back(std::move(c));
    }
    return out;
  }
  throw ParseError("no fenced JSON block with a \"triples\" array");
}

}  // namespace

std::vector<CandidateTriple> extract_triples(const std::string& paper_text,
                                             const std::string& paper_id,
                                             const ChatEndpoint& extractor,
                                             const MinerOptions& options) {
  if (trim(paper_text).empty()) throw ValidationError("paper text must be non-empty");

  std::vector<ChatMessage> messages{
      {Role::System, std::string(prompts::kExtractorSystem)},
      {Role::User, "Paper id: " + paper_id + "\n\n" + paper_text},
  };

  std::string last_reply;
  std::string last_error;
  for (int attempt = 0; attempt <= options.extraction_retries; ++attempt) {
    last_reply = extractor.complete(messages, "extract:" + paper_id);
    try {
      return parse_extraction_reply(last_reply, paper_id);
    } catch (const ParseError& e) {
      last_error = e.what();
      messages.push_back({Role::Assistant, last_reply});
      messages.push_back({Role::User,
                          std::string("Your reply could not be parsed (") + e.what() +
                              "). Output only the fenced JSON block with the \"triples\" array."});
    }
  }
  throw ExtractionError("extraction failed for paper " + paper_id + " after " +
                            std::to_string(options.extraction_retries + 1) + " attempt(s): " +
                            last_error,
                        last_reply);
}

IngestReport ingest_paper(const std::string& paper_text, const std::string& paper_id,
                          const ChatEndpoint& extractor, GraphStore& graph, IndexStore& index,
                          Embedder& embedder, const MinerOptions& options) {
  IngestReport report;
  report.paper = paper_id;

  std::string input = extraction_input_from_paper(paper_text);
  std::vector<CandidateTriple> triples = extract_triples(input, paper_id, extractor, options);
  report.triples = triples.size();

  for (const CandidateTriple& t : triples) {
    for (const auto& [kind, sketch] :
         {std::pair{NodeKind::Problem, &t.problem}, std::pair{NodeKind::Challenge, &t.challenge},
          std::pair{NodeKind::Solution, &t.solution}}) {
      for (NamingViolation v : validate_name(kind, sketch->name)) report.violations.push_back(v);
    }
  }

  // Embed everything up front so the mutation phase below cannot hit the
  // network; descriptions of nodes that end up merging are simply unused.
  std::vector<std::array<Embedding, 3>> vectors;
  vectors.reserve(triples.size());
  for (const CandidateTriple& t : triples) {
    vectors.push_back({embedder.embed(t.problem.description), embedder.embed(t.challenge.description),
                       embedder.embed(t.solution.description)});
  }

  // All-or-nothing per paper: mutate a scratch copy, then swap it in.
  MotivGraph scratch = *graph.snapshot();
  std::vector<std::pair<std::string, std::pair<std::string, Embedding>>> new_vectors;

  for (std::size_t i = 0; i < triples.size(); ++i) {
    const CandidateTriple& t = triples[i];
    struct Slot {
      NodeKind kind;
      const EntitySketch* sketch;
      const Embedding* vec;
    };
    const Slot slots[3] = {{NodeKind::Problem, &t.problem, &vectors[i][0]},
                           {NodeKind::Challenge, &t.challenge, &vectors[i][1]},
                           {NodeKind::Solution, &t.solution, &vectors[i][2]}};
    std::string ids[3];
    for (int s = 0; s < 3; ++s) {
      bool existed = scratch.find_by_name(slots[s].kind, slots[s].sketch->name) != nullptr;
      ids[s] = scratch.add_node(slots[s].kind, slots[s].sketch->name, slots[s].sketch->description,
                                paper_id);
      if (existed) {
        ++report.nodes_merged;
      } else {
        ++report.nodes_created;
        report.node_ids.push_back(ids[s]);
        new_vectors.push_back({ids[s], {slots[s].sketch->name, *slots[s].vec}});
      }
    }
    // The problem->challenge link always lands before its companion
    // challenge->solution link.
    std::size_t before = scratch.edge_count();
    std::string pc = scratch.add_edge(EdgeKind::ProblemChallenge, ids[0], ids[1]);
    if (scratch.edge_count() > before) report.edge_ids.push_back(pc);
    before = scratch.edge_count();
    std::string cs = scratch.add_edge(EdgeKind::ChallengeSolution, ids[1], ids[2]);
    if (scratch.edge_count() > before) report.edge_ids.push_back(cs);
  }
  report.edges_created = report.edge_ids.size();

  graph.write([&](MotivGraph& g) { g = std::move(scratch); });
  index.write([&](EmbeddingIndex& idx) {
    for (const auto& [id, named_vec] : new_vectors) idx.add(id, named_vec.first, named_vec.second);
  });
  return report;
}

}  // namespace soiq
