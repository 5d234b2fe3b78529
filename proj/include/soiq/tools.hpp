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

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "soiq/embedding.hpp"
#include "soiq/graph.hpp"

namespace soiq {

// A parsed call to one of the four researcher tools. Argument keys are
// canonical: "query" (node_search, semantic_search), "names"
// (node_relation), "number" (get_random_nodes).
struct ToolCall {
  std::string tool;
  nlohmann::ordered_json args = nlohmann::ordered_json::object();

  friend bool operator==(const ToolCall& a, const ToolCall& b) {
    return a.tool == b.tool && a.args == b.args;
  }
};

// Finds the first committed call in a model reply. A call is a fenced
// block whose body contains a line `conducting <tool>(<key>=<value>...)`
// followed, inside the same fence, by a line containing the literal
// token <CALL>. A fence without the token is not a call and is skipped;
// if nothing commits, the result is empty. A committed fence with an
// unknown tool name, an unaccepted parameter, or malformed argument
// syntax raises ParseError.
//
// node_search accepts both the declared parameter name (search_query)
// and the example spelling (entity_name_list); agents imitate either.
std::optional<ToolCall> parse_tool_call(std::string_view llm_output);

// Canonical wire rendering of a call; re-parsing the result yields an
// equal ToolCall.
std::string render_tool_call(const ToolCall& call);

struct ToolResult {
  std::string tool;
  std::string rendered;  // never empty, the agent loop needs an observation
  nlohmann::ordered_json payload;
};

struct LitRecord {
  std::string title;
  std::string abstract;
  std::vector<std::string> authors;
  int year = 0;
};

class LiteratureClient {
 public:
  virtual ~LiteratureClient() = default;
  virtual std::vector<LitRecord> search(const std::string& query, std::size_t limit) = 0;
};

// Canned records for offline runs and tests; returns the same records for
// every query and counts calls.
class FixtureLiteratureClient : public LiteratureClient {
 public:
  explicit FixtureLiteratureClient(std::vector<LitRecord> records)
      : records_(std::move(records)) {}
  static std::vector<LitRecord> load_records(const std::string& path);

  std::vector<LitRecord> search(const std::string& query, std::size_t limit) override;
  std::size_t call_count() const { return calls_.load(); }

 private:
  std::vector<LitRecord> records_;
  std::atomic<std::size_t> calls_{0};
};

// GET <endpoint>?query=...&limit=N expecting {"data": [{"title",
// "abstract", "authors", "year"}, ...]}; authors entries may be plain
// strings or {"name": ...} objects. API key read from the environment.
class HttpLiteratureClient : public LiteratureClient {
 public:
  HttpLiteratureClient(std::string endpoint, std::string api_key_env = {}, int timeout_seconds = 30);
  std::vector<LitRecord> search(const std::string& query, std::size_t limit) override;

 private:
  std::string endpoint_;
  std::string api_key_env_;
  int timeout_seconds_;
};

// Memoizes per query string, optionally persisting each result set as a
// JSON file keyed by the query's fnv1a64 hash.
class CachingLiteratureClient : public LiteratureClient {
 public:
  CachingLiteratureClient(std::shared_ptr<LiteratureClient> inner, std::string cache_dir = {});
  std::vector<LitRecord> search(const std::string& query, std::size_t limit) override;

 private:
  std::shared_ptr<LiteratureClient> inner_;
  std::string cache_dir_;
  std::mutex mutex_;
  std::map<std::string, std::vector<LitRecord>> memo_;
};

struct DispatcherOptions {
  std::size_t top_k = 10;           // node_search result size
  std::size_t literature_limit = 20;
  std::uint64_t rng_seed = 0;       // base seed for get_random_nodes
};

// Read-only execution of the four tools over an immutable graph snapshot.
// Tool failures never throw out of dispatch(); they come back rendered so
// the agent loop always receives an observation.
class ToolDispatcher {
 public:
  ToolDispatcher(std::shared_ptr<const MotivGraph> graph,
                 std::shared_ptr<const EmbeddingIndex> index, std::shared_ptr<Embedder> embedder,
                 std::shared_ptr<LiteratureClient> literature, DispatcherOptions options = {});

  ToolResult dispatch(const ToolCall& call);

  ToolResult node_search(const std::string& query, std::size_t top_k) const;
  ToolResult node_relation(const std::vector<std::string>& names) const;
  ToolResult get_random_nodes(std::size_t number, std::uint64_t rng_seed) const;
  ToolResult semantic_search(const std::string& query) const;

 private:
  std::shared_ptr<const MotivGraph> graph_;
  std::shared_ptr<const EmbeddingIndex> index_;
  std::shared_ptr<Embedder> embedder_;
  std::shared_ptr<LiteratureClient> literature_;
  DispatcherOptions options_;
  std::atomic<std::uint64_t> call_counter_{0};
};

}  // namespace soiq
