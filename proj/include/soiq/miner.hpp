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

#include <string>
#include <string_view>
#include <vector>

#include "soiq/embedding.hpp"
#include "soiq/gateway.hpp"
#include "soiq/graph.hpp"

namespace soiq {

struct EntitySketch {
  std::string name;
  std::string description;
};

// One extracted (problem, challenge, solution) candidate before ingestion.
struct CandidateTriple {
  EntitySketch problem;
  EntitySketch challenge;
  EntitySketch solution;
  std::string paper;
};

struct NamingViolation {
  NodeKind kind = NodeKind::Problem;
  std::string rule;  // "word-count" or "structure-pattern"
  std::string detail;
  std::string name;
};

// Checks a proposed entity name against its kind's conventions:
//   problem    3-7 words
//   challenge  5-8 words and the two-part shape "<difficulty> in <context>"
//   solution   7-10 words
// Word counts are whitespace-token counts. Violations are warnings only;
// ingestion proceeds regardless and reports them.
std::vector<NamingViolation> validate_name(NodeKind kind, std::string_view name);

struct MinerOptions {
  int extraction_retries = 2;
};

// The extractor's reply must contain a fenced JSON block of the shape
// {"triples": [{"problem": {"name", "description"}, "challenge": ...,
// "solution": ...}, ...]}. Malformed replies are re-prompted up to the
// retry limit before an ExtractionError (carrying the raw output) is
// raised. Duplicate triples within one paper are collapsed.
std::vector<CandidateTriple> extract_triples(const std::string& paper_text,
                                             const std::string& paper_id,
                                             const ChatEndpoint& extractor,
                                             const MinerOptions& options = {});

// Accepts either plain text or a JSON document carrying section bodies
// ({"sections": {"introduction": ..., "solution"|"method"|"approach": ...}}
// or the same keys at top level). Only the introduction and the solution
// material are forwarded to the extractor.
std::string extraction_input_from_paper(const std::string& raw);

struct IngestReport {
  std::string paper;
  std::size_t triples = 0;
  std::size_t nodes_created = 0;
  std::size_t nodes_merged = 0;
  std::size_t edges_created = 0;
  std::vector<std::string> node_ids;
  std::vector<std::string> edge_ids;
  std::vector<NamingViolation> violations;
};

// Extracts, embeds, and ingests one paper. All graph and index mutations
// happen atomically per paper: any failure restores the previous state.
IngestReport ingest_paper(const std::string& paper_text, const std::string& paper_id,
                          const ChatEndpoint& extractor, GraphStore& graph, IndexStore& index,
                          Embedder& embedder, const MinerOptions& options = {});

}  // namespace soiq
