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

#include "soiq/tools.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <filesystem>

#include <httplib.h>

#include "soiq/errors.hpp"
#include "soiq/util.hpp"

namespace soiq {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

const char* kToolNames[] = {"node_search", "node_relation", "get_random_nodes", "semantic_search"};

bool known_tool(std::string_view name) {
  for (const char* t : kToolNames) {
    if (name == t) return true;
  }
  return false;
}

struct ArgValue {
  enum class Type { String, Integer, List } type;
  std::string str;
  long long integer = 0;
  std::vector<std::string> list;
};

// Scans "key=value, key=value" between the call's parentheses. Values may
// span lines; strings are double-quoted with backslash escapes, lists use
// bracket syntax, integers are bare.
class ArgScanner {
 public:
  explicit ArgScanner(std::string_view text) : text_(text) {}

  std::vector<std::pair<std::string, ArgValue>> parse() {
    std::vector<std::pair<std::string, ArgValue>> args;
    skip_ws();
    if (done()) return args;
    while (true) {
      std::string key = parse_identifier();
      skip_ws();
      expect('=');
      skip_ws();
      ArgValue value = parse_value();
      for (const auto& [k, v] : args) {
        if (k == key) throw ParseError("duplicate parameter: " + key);
      }
      args.emplace_back(std::move(key), std::move(value));
      skip_ws();
      if (done()) break;
      expect(',');
      skip_ws();
    }
    return args;
  }

 private:
  bool done() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  void skip_ws() {
    while (!done() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }

  void expect(char c) {
    if (done() || peek() != c) {
      throw ParseError(std::string("malformed argument syntax: expected '") + c + "'");
    }
    ++pos_;
  }

  std::string parse_identifier() {
    std::size_t start = pos_;
    while (!done() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) ++pos_;
    if (pos_ == start) throw ParseError("malformed argument syntax: expected a parameter name");
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string parse_quoted() {
    expect('"');
    std::string out;
    while (!done() && peek() != '"') {
      char c = text_[pos_++];
      if (c == '\\' && !done() && (peek() == '"' || peek() == '\\')) {
        out.push_back(text_[pos_++]);
      } else {
        out.push_back(c);
      }
    }
    expect('"');
    return out;
  }

  ArgValue parse_value() {
    ArgValue v{ArgValue::Type::String, {}, 0, {}};
    if (done()) throw ParseError("malformed argument syntax: missing value");
    if (peek() == '"') {
      v.type = ArgValue::Type::String;
      v.str = parse_quoted();
      return v;
    }
    if (peek() == '[') {
      ++pos_;
      v.type = ArgValue::Type::List;
      skip_ws();
      if (!done() && peek() == ']') {
        ++pos_;
        return v;
      }
      while (true) {
        skip_ws();
        if (done()) throw ParseError("malformed argument syntax: unterminated list");
        if (peek() == '"') {
          v.list.push_back(parse_quoted());
        } else {
          std::size_t start = pos_;
          while (!done() && peek() != ',' && peek() != ']') ++pos_;
          std::string item = trim(text_.substr(start, pos_ - start));
          if (item.empty()) throw ParseError("malformed argument syntax: empty list item");
          v.list.push_back(std::move(item));
        }
        skip_ws();
        if (done()) throw ParseError("malformed argument syntax: unterminated list");
        if (peek() == ']') {
          ++pos_;
          return v;
        }
        expect(',');
      }
    }
    // Bare token: only integers are legal.
    std::size_t start = pos_;
    while (!done() && peek() != ',' && !std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
    std::string token = std::string(text_.substr(start, pos_ - start));
    if (token.empty()) throw ParseError("malformed argument syntax: missing value");
    std::size_t idx = 0;
    if (token[0] == '+' || token[0] == '-') idx = 1;
    if (idx == token.size() ||
        !std::all_of(token.begin() + static_cast<long>(idx), token.end(),
                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; })) {
      throw ParseError("malformed argument syntax: unquoted value '" + token + "'");
    }
    v.type = ArgValue::Type::Integer;
    v.integer = std::stoll(token);
    return v;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

ToolCall canonicalize(const std::string& tool,
                      const std::vector<std::pair<std::string, ArgValue>>& args) {
  ToolCall call;
  call.tool = tool;

  auto reject_unknown = [&](std::initializer_list<const char*> accepted) {
    for (const auto& [k, v] : args) {
      bool ok = false;
      for (const char* a : accepted) {
        if (k == a) ok = true;
      }
      if (!ok) throw ParseError("parameter " + k + " is not accepted by " + tool);
    }
  };

  if (tool == "node_search" || tool == "semantic_search") {
    // The prompt declares search_query; the worked example for node_search
    // writes entity_name_list. Both spell the same thing.
    if (tool == "node_search") {
      reject_unknown({"search_query", "entity_name_list", "query"});
    } else {
      reject_unknown({"search_query", "query"});
    }
    std::optional<ArgValue> value;
    for (const char* k : {"search_query", "entity_name_list", "query"}) {
      for (const auto& [key, v] : args) {
        if (key == k) value = v;
      }
    }
    if (!value.has_value()) throw ParseError("missing required parameter: search_query");
    if (value->type != ArgValue::Type::String) {
      throw ParseError("the search query must be a quoted string");
    }
    call.args["query"] = value->str;
    return call;
  }

  if (tool == "node_relation") {
    reject_unknown({"entity_name_list", "names"});
    std::optional<ArgValue> value;
    for (const auto& [key, v] : args) {
      if (key == "entity_name_list" || key == "names") value = v;
    }
    if (!value.has_value()) throw ParseError("missing required parameter: entity_name_list");
    std::vector<std::string> names;
    if (value->type == ArgValue::Type::List) {
      names = value->list;
    } else if (value->type == ArgValue::Type::String) {
      names.push_back(value->str);
    } else {
      throw ParseError("entity_name_list must be a list or a quoted string");
    }
    if (names.empty()) throw ParseError("entity_name_list must not be empty");
    call.args["names"] = names;
    return call;
  }

  if (tool == "get_random_nodes") {
    reject_unknown({"number"});
    for (const auto& [key, v] : args) {
      if (key == "number") {
        if (v.type != ArgValue::Type::Integer) throw ParseError("number must be a bare integer");
        call.args["number"] = v.integer;
      }
    }
    return call;
  }

  throw ParseError("unknown tool: " + tool);
}

}  // namespace

std::optional<ToolCall> parse_tool_call(std::string_view llm_output) {
  for (const FencedBlock& block : find_fenced_blocks(llm_output)) {
    const std::string& body = block.body;

    // Locate the conducting line.
    std::size_t call_pos = std::string::npos;
    std::size_t line_start = 0;
    std::string lower = to_lower(body);
    while (line_start <= lower.size()) {
      std::size_t line_end = lower.find('\n', line_start);
      std::string_view line(lower.data() + line_start,
                            (line_end == std::string::npos ? lower.size() : line_end) - line_start);
      std::string trimmed = trim(line);
      if (starts_with(trimmed, "conducting")) {
        call_pos = line_start + (line.find("conducting"));
        break;
      }
      if (line_end == std::string::npos) break;
      line_start = line_end + 1;
    }
    if (call_pos == std::string::npos) continue;  // fence holds no call

    // The commit marker must appear on a later line of the same fence.
    std::size_t after_call_line = body.find('\n', call_pos);
    bool committed = after_call_line != std::string::npos &&
                     body.find("<CALL>", after_call_line) != std::string::npos;
    if (!committed) continue;  // "If this marker is not present, the function will not be called."

    // Parse: conducting <identifier> ( ... )
    std::size_t cursor = call_pos + std::string("conducting").size();
    while (cursor < body.size() && std::isspace(static_cast<unsigned char>(body[cursor]))) ++cursor;
    std::size_t name_start = cursor;
    while (cursor < body.size() &&
           (std::isalnum(static_cast<unsigned char>(body[cursor])) || body[cursor] == '_')) {
      ++cursor;
    }
    std::string tool = body.substr(name_start, cursor - name_start);
    if (tool.empty()) throw ParseError("malformed call: missing tool name");
    if (!known_tool(tool)) throw ParseError("unknown tool: " + tool);

    while (cursor < body.size() && std::isspace(static_cast<unsigned char>(body[cursor]))) ++cursor;
    if (cursor >= body.size() || body[cursor] != '(') {
      throw ParseError("malformed call: expected '(' after tool name");
    }
    ++cursor;
    // Find the matching ')' with awareness of quoted strings.
    std::size_t args_start = cursor;
    bool in_string = false;
    std::size_t close = std::string::npos;
    for (std::size_t i = cursor; i < body.size(); ++i) {
      char c = body[i];
      if (in_string) {
        if (c == '\\') {
          ++i;
        } else if (c == '"') {
          in_string = false;
        }
      } else if (c == '"') {
        in_string = true;
      } else if (c == ')') {
        close = i;
        break;
      }
    }
    if (close == std::string::npos) throw ParseError("malformed call: missing ')'");

    ArgScanner scanner(std::string_view(body).substr(args_start, close - args_start));
    return canonicalize(tool, scanner.parse());
  }
  return std::nullopt;
}

std::string render_tool_call(const ToolCall& call) {
  std::string line = "conducting " + call.tool + "(";
  auto quote = [](const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
      if (c == '"' || c == '\\') out.push_back('\\');
      out.push_back(c);
    }
    out.push_back('"');
    return out;
  };
  if (call.tool == "node_search" || call.tool == "semantic_search") {
    line += "search_query=" + quote(call.args.at("query").get<std::string>());
  } else if (call.tool == "node_relation") {
    line += "entity_name_list=[";
    bool first = true;
    for (const auto& name : call.args.at("names")) {
      if (!first) line += ",";
      first = false;
      line += quote(name.get<std::string>());
    }
    line += "]";
  } else if (call.tool == "get_random_nodes") {
    if (call.args.contains("number")) {
      line += "number=" + std::to_string(call.args.at("number").get<long long>());
    }
  }
  line += ")";
  return "```function call\n" + line + "\nSpecial token: <CALL>\n```";
}

std::vector<LitRecord> FixtureLiteratureClient::load_records(const std::string& path) {
  Json j = Json::parse(read_file(path));
  std::vector<LitRecord> records;
  const Json& array = j.is_array() ? j : j.at("records");
  for (const Json& r : array) {
    LitRecord rec;
    rec.title = r.value("title", std::string{});
    rec.abstract = r.value("abstract", std::string{});
    if (r.contains("authors")) {
      for (const Json& a : r["authors"]) {
        rec.authors.push_back(a.is_string() ? a.get<std::string>()
                                            : a.value("name", std::string{}));
      }
    }
    rec.year = r.value("year", 0);
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<LitRecord> FixtureLiteratureClient::search(const std::string& query, std::size_t limit) {
  (void)query;
  calls_.fetch_add(1);
  std::vector<LitRecord> out = records_;
  if (out.size() > limit) out.resize(limit);
  return out;
}

HttpLiteratureClient::HttpLiteratureClient(std::string endpoint, std::string api_key_env,
                                           int timeout_seconds)
    : endpoint_(std::move(endpoint)),
      api_key_env_(std::move(api_key_env)),
      timeout_seconds_(timeout_seconds) {}

std::vector<LitRecord> HttpLiteratureClient::search(const std::string& query, std::size_t limit) {
  std::string url = endpoint_;
  std::string path = "/";
  std::size_t scheme = url.find("://");
  std::size_t host_start = scheme == std::string::npos ? 0 : scheme + 3;
  std::size_t slash = url.find('/', host_start);
  if (slash != std::string::npos) {
    path = url.substr(slash);
    url = url.substr(0, slash);
  }
  httplib::Client client(url);
  client.set_read_timeout(timeout_seconds_, 0);
  client.set_connection_timeout(timeout_seconds_, 0);
  httplib::Headers headers;
  if (!api_key_env_.empty()) {
    if (const char* key = std::getenv(api_key_env_.c_str())) headers.emplace("x-api-key", key);
  }
  httplib::Params params{{"query", query}, {"limit", std::to_string(limit)}};
  auto res = client.Get(path, params, headers);
  if (!res) throw TransportError("no response from literature endpoint " + endpoint_);
  if (res->status < 200 || res->status >= 300) {
    throw TransportError("literature endpoint returned status " + std::to_string(res->status),
                         res->status == 429 || res->status >= 500);
  }
  Json j = Json::parse(res->body, nullptr, false);
  if (j.is_discarded()) throw TransportError("malformed literature response", false);
  const Json* array = nullptr;
  if (j.is_array()) {
    array = &j;
  } else if (j.contains("data") && j["data"].is_array()) {
    array = &j["data"];
  } else {
    throw TransportError("literature response carries no record array", false);
  }
  std::vector<LitRecord> records;
  for (const Json& r : *array) {
    LitRecord rec;
    rec.title = r.value("title", std::string{});
    rec.abstract = r.value("abstract", std::string{});
    if (r.contains("authors") && r["authors"].is_array()) {
      for (const Json& a : r["authors"]) {
        rec.authors.push_back(a.is_string() ? a.get<std::string>()
                                            : a.value("name", std::string{}));
      }
    }
    rec.year = r.value("year", 0);
    records.push_back(std::move(rec));
    if (records.size() >= limit) break;
  }
  return records;
}

namespace {

Json records_to_json(const std::vector<LitRecord>& records) {
  Json array = Json::array();
  for (const LitRecord& r : records) {
    Json j;
    j["title"] = r.title;
    j["abstract"] = r.abstract;
    j["authors"] = r.authors;
    j["year"] = r.year;
    array.push_back(std::move(j));
  }
  return array;
}

std::vector<LitRecord> records_from_json(const Json& array) {
  std::vector<LitRecord> records;
  for (const Json& r : array) {
    LitRecord rec;
    rec.title = r.value("title", std::string{});
    rec.abstract = r.value("abstract", std::string{});
    for (const Json& a : r.value("authors", Json::array())) rec.authors.push_back(a.get<std::string>());
    rec.year = r.value("year", 0);
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace

CachingLiteratureClient::CachingLiteratureClient(std::shared_ptr<LiteratureClient> inner,
                                                 std::string cache_dir)
    : inner_(std::move(inner)), cache_dir_(std::move(cache_dir)) {
  if (!cache_dir_.empty()) fs::create_directories(cache_dir_);
}

std::vector<LitRecord> CachingLiteratureClient::search(const std::string& query, std::size_t limit) {
  std::unique_lock lock(mutex_);
  if (auto it = memo_.find(query); it != memo_.end()) {
    auto out = it->second;
    if (out.size() > limit) out.resize(limit);
    return out;
  }
  fs::path cache_file;
  if (!cache_dir_.empty()) {
    cache_file = fs::path(cache_dir_) / (hex64(fnv1a64(query)) + ".json");
    if (fs::exists(cache_file)) {
      Json j = Json::parse(read_file(cache_file.string()), nullptr, false);
      if (!j.is_discarded() && j.contains("records")) {
        auto records = records_from_json(j["records"]);
        memo_[query] = records;
        if (records.size() > limit) records.resize(limit);
        return records;
      }
    }
  }
  lock.unlock();
  std::vector<LitRecord> records = inner_->search(query, limit);
  lock.lock();
  memo_[query] = records;
  if (!cache_dir_.empty()) {
    Json j;
    j["query"] = query;
    j["records"] = records_to_json(records);
    write_file(cache_file.string(), j.dump(2) + "\n");
  }
  return records;
}

ToolDispatcher::ToolDispatcher(std::shared_ptr<const MotivGraph> graph,
                               std::shared_ptr<const EmbeddingIndex> index,
                               std::shared_ptr<Embedder> embedder,
                               std::shared_ptr<LiteratureClient> literature,
                               DispatcherOptions options)
    : graph_(std::move(graph)),
      index_(std::move(index)),
      embedder_(std::move(embedder)),
      literature_(std::move(literature)),
      options_(options) {}

ToolResult ToolDispatcher::node_search(const std::string& query, std::size_t top_k) const {
  ToolResult result;
  result.tool = "node_search";
  std::vector<ScoredHit> hits;
  try {
    Embedding q = embedder_->embed(query);
    hits = index_->top_k(q, std::max<std::size_t>(top_k, 1));
  } catch (const Error& e) {
    result.rendered = std::string("Sorry, the node search failed: ") + e.what() +
                      " Please retry or rephrase your query.";
    result.payload["error"] = e.what();
    return result;
  }
  result.payload["hits"] = Json::array();
  if (hits.empty()) {
    result.rendered = "No results found in the graph for this query.";
    return result;
  }
  std::string text;
  std::size_t i = 1;
  for (const ScoredHit& hit : hits) {
    const MotivNode* n = graph_->find_node(hit.id);
    if (n == nullptr) continue;
    text += std::to_string(i++) + ". " + n->name + " (" + to_string(n->kind) + ")\n";
    result.payload["hits"].push_back(
        {{"id", hit.id}, {"name", n->name}, {"kind", to_string(n->kind)}, {"score", hit.score}});
  }
  result.rendered = text.empty() ? "No results found in the graph for this query." : text;
  return result;
}

ToolResult ToolDispatcher::node_relation(const std::vector<std::string>& names) const {
  ToolResult result;
  result.tool = "node_relation";
  result.payload["nodes"] = Json::array();
  std::string text;
  for (const std::string& raw : names) {
    bool found = false;
    for (NodeKind kind : {NodeKind::Problem, NodeKind::Challenge, NodeKind::Solution}) {
      const MotivNode* n = graph_->find_by_name(kind, raw);
      if (n == nullptr) continue;
      found = true;
      text += n->name + " (" + to_string(n->kind) + "): " + n->description + "\nRelations:\n";
      Json entry;
      entry["name"] = n->name;
      entry["kind"] = to_string(n->kind);
      entry["description"] = n->description;
      entry["relations"] = Json::array();
      std::vector<NeighborEntry> rels = graph_->neighbors(n->id);
      if (rels.empty()) text += "  (no relations)\n";
      for (const NeighborEntry& rel : rels) {
        std::string src = rel.direction == EdgeDirection::Outgoing ? n->name : rel.node.name;
        std::string dst = rel.direction == EdgeDirection::Outgoing ? rel.node.name : n->name;
        text += "  (" + src + ") -[" + to_string(rel.kind) + "]-> (" + dst + ")\n";
        entry["relations"].push_back({{"kind", to_string(rel.kind)}, {"src", src}, {"dst", dst}});
      }
      result.payload["nodes"].push_back(std::move(entry));
    }
    if (!found) {
      text += "not found: " + raw + "\n";
      result.payload["nodes"].push_back({{"name", raw}, {"found", false}});
    }
  }
  result.rendered = text.empty() ? "not found" : text;
  return result;
}

ToolResult ToolDispatcher::get_random_nodes(std::size_t number, std::uint64_t rng_seed) const {
  ToolResult result;
  result.tool = "get_random_nodes";
  if (number < 1) {
    result.rendered = "The number of random nodes must be at least 1.";
    result.payload["error"] = "number must be >= 1";
    return result;
  }
  std::vector<MotivTriple> triples = graph_->list_triples(number, rng_seed);
  result.payload["triples"] = Json::array();
  if (triples.empty()) {
    result.rendered = "No complete problem-challenge-solution triples available in the graph.";
    return result;
  }
  std::string text;
  std::size_t i = 1;
  for (const MotivTriple& t : triples) {
    const MotivNode& p = graph_->node(t.problem);
    const MotivNode& c = graph_->node(t.challenge);
    const MotivNode& s = graph_->node(t.solution);
    text += std::to_string(i++) + ". [problem] " + p.name + ": " + p.description + "\n";
    text += "   [challenge] " + c.name + ": " + c.description + "\n";
    text += "   [solution] " + s.name + ": " + s.description + "\n";
    result.payload["triples"].push_back(
        {{"problem", t.problem}, {"challenge", t.challenge}, {"solution", t.solution}});
  }
  if (triples.size() < number) {
    text += "(only " + std::to_string(triples.size()) +
            " complete triples exist; the graph is exhausted)\n";
    result.payload["exhausted"] = true;
  }
  result.rendered = text;
  return result;
}

ToolResult ToolDispatcher::semantic_search(const std::string& query) const {
  ToolResult result;
  result.tool = "semantic_search";
  std::vector<LitRecord> records;
  try {
    records = literature_->search(query, options_.literature_limit);
  } catch (const Error& e) {
    result.rendered = std::string("The literature search failed (") + e.what() +
                      "). If the result is empty, please adjust your search_query or retry.";
    result.payload["error"] = e.what();
    return result;
  }
  result.payload["records"] = records_to_json(records);
  if (records.empty()) {
    result.rendered =
        "No papers found for this query. If the result is empty, please adjust your "
        "search_query or retry.";
    return result;
  }
  std::string text;
  std::size_t i = 1;
  for (const LitRecord& r : records) {
    std::string authors;
    if (r.authors.empty()) {
      authors = "Unknown";
    } else if (r.authors.size() == 1) {
      authors = r.authors.front();
    } else {
      authors = r.authors.front() + " et al.";
    }
    text += std::to_string(i++) + ". " + r.title + " (" + authors + ", " + std::to_string(r.year) +
            ")\n   Abstract: " + r.abstract + "\n";
  }
  result.rendered = text;
  return result;
}

ToolResult ToolDispatcher::dispatch(const ToolCall& call) {
  if (call.tool == "node_search") {
    return node_search(call.args.at("query").get<std::string>(), options_.top_k);
  }
  if (call.tool == "node_relation") {
    return node_relation(call.args.at("names").get<std::vector<std::string>>());
  }
  if (call.tool == "get_random_nodes") {
    long long number = 10;
    if (call.args.contains("number")) number = call.args.at("number").get<long long>();
    std::uint64_t seed = mix_seed(options_.rng_seed, call_counter_.fetch_add(1));
    if (number < 1) return get_random_nodes(0, seed);
    return get_random_nodes(static_cast<std::size_t>(number), seed);
  }
  if (call.tool == "semantic_search") {
    return semantic_search(call.args.at("query").get<std::string>());
  }
  ToolResult result;
  result.tool = call.tool;
  result.rendered = "Unknown tool: " + call.tool;
  result.payload["error"] = "unknown tool";
  return result;
}

}  // namespace soiq
