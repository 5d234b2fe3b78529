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

#include "soiq/embedding.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <random>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "soiq/errors.hpp"
#include "soiq/util.hpp"

namespace soiq {

using Json = nlohmann::ordered_json;

double cosine_similarity(const Embedding& a, const Embedding& b) {
  if (a.size() != b.size() || a.empty()) {
    throw ValidationError("cosine_similarity: dimension mismatch");
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw ValidationError("cosine_similarity: zero-norm vector");
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

namespace {

void normalize_in_place(Embedding& v) {
  double norm2 = 0.0;
  for (double x : v) norm2 += x * x;
  if (!(norm2 > 0.0) || !std::isfinite(norm2)) {
    throw ValidationError("embedding has non-finite or zero norm");
  }
  double inv = 1.0 / std::sqrt(norm2);
  for (double& x : v) x *= inv;
}

}  // namespace

HashEmbedder::HashEmbedder(std::size_t dim, std::uint64_t seed) : dim_(dim), seed_(seed) {
  if (dim_ == 0) throw ConfigError("embedding dim must be positive");
}

Embedding HashEmbedder::embed(std::string_view text) {
  if (trim(text).empty()) throw ValidationError("cannot embed empty text");
  std::vector<std::string> tokens = split_words(to_lower(text));
  Embedding acc(dim_, 0.0);
  for (const std::string& token : tokens) {
    std::mt19937_64 engine(fnv1a64(token) ^ seed_);
    for (std::size_t i = 0; i < dim_; ++i) {
      double u = static_cast<double>(engine() >> 11) * (1.0 / 9007199254740992.0);
      acc[i] += 2.0 * u - 1.0;
    }
  }
  normalize_in_place(acc);
  return acc;
}

HttpEmbedder::HttpEmbedder(std::string endpoint, std::size_t dim, std::string api_key_env,
                           int retries, int timeout_seconds, int backoff_ms)
    : endpoint_(std::move(endpoint)),
      dim_(dim),
      api_key_env_(std::move(api_key_env)),
      retries_(retries),
      timeout_seconds_(timeout_seconds),
      backoff_ms_(backoff_ms) {
  if (dim_ == 0) throw ConfigError("embedding dim must be positive");
}

Embedding HttpEmbedder::embed(std::string_view text) {
  if (trim(text).empty()) throw ValidationError("cannot embed empty text");
  {
    std::shared_lock lock(memo_mutex_);
    if (auto it = memo_.find(text); it != memo_.end()) return it->second;
  }

  // Split "http://host:port/path" for httplib.
  std::string url = endpoint_;
  std::string path = "/";
  std::size_t scheme = url.find("://");
  std::size_t host_start = scheme == std::string::npos ? 0 : scheme + 3;
  std::size_t slash = url.find('/', host_start);
  if (slash != std::string::npos) {
    path = url.substr(slash);
    url = url.substr(0, slash);
  }

  Json body;
  body["texts"] = Json::array({std::string(text)});

  std::string last_error;
  for (int attempt = 0; attempt <= retries_; ++attempt) {
    if (attempt > 0 && backoff_ms_ > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms_ << (attempt - 1)));
    }
    httplib::Client client(url);
    client.set_read_timeout(timeout_seconds_, 0);
    client.set_connection_timeout(timeout_seconds_, 0);
    if (!api_key_env_.empty()) {
      if (const char* key = std::getenv(api_key_env_.c_str())) {
        client.set_default_headers({{"Authorization", std::string("Bearer ") + key}});
      }
    }
    auto res = client.Post(path, body.dump(), "application/json");
    if (!res) {
      last_error = "no response from " + endpoint_;
      continue;
    }
    if (res->status < 200 || res->status >= 300) {
      last_error = "embedding endpoint returned status " + std::to_string(res->status);
      if (res->status >= 500 || res->status == 429) continue;  // retryable
      throw TransportError(last_error, false);
    }
    Json reply;
    try {
      reply = Json::parse(res->body);
      Embedding vec = reply.at("vectors").at(0).get<Embedding>();
      if (vec.size() != dim_) {
        throw ValidationError("embedding endpoint returned dim " + std::to_string(vec.size()) +
                              ", expected " + std::to_string(dim_));
      }
      normalize_in_place(vec);
      std::unique_lock lock(memo_mutex_);
      return memo_.emplace(std::string(text), std::move(vec)).first->second;
    } catch (const Json::exception& e) {
      throw TransportError(std::string("malformed embedding response: ") + e.what(), false);
    }
  }
  throw TransportError("embedding provider unreachable after " + std::to_string(retries_ + 1) +
                       " attempts: " + last_error);
}

EmbeddingIndex::EmbeddingIndex(std::size_t dim) : dim_(dim) {
  if (dim_ == 0) throw ConfigError("index dim must be positive");
}

void EmbeddingIndex::add(const std::string& id, std::string_view name, const Embedding& vector) {
  if (vector.size() != dim_) {
    throw ValidationError("vector dim " + std::to_string(vector.size()) + " does not match index dim " +
                          std::to_string(dim_));
  }
  Embedding copy = vector;
  normalize_in_place(copy);
  entries_[id] = Entry{std::string(name), std::move(copy)};
}

const Embedding* EmbeddingIndex::find_vector(const std::string& id) const {
  auto it = entries_.find(id);
  return it == entries_.end() ? nullptr : &it->second.vector;
}

std::vector<ScoredHit> EmbeddingIndex::top_k(
    const Embedding& query, std::size_t k,
    const std::optional<std::set<std::string>>& restrict_ids) const {
  if (k == 0) throw ValidationError("top_k requires k >= 1");
  if (query.size() != dim_) {
    throw ValidationError("query dim " + std::to_string(query.size()) + " does not match index dim " +
                          std::to_string(dim_));
  }
  Embedding q = query;
  normalize_in_place(q);

  struct Ranked {
    double score;
    std::string norm_name;
    const std::string* id;
  };
  std::vector<Ranked> ranked;
  ranked.reserve(entries_.size());
  for (const auto& [id, entry] : entries_) {
    if (restrict_ids.has_value() && restrict_ids->count(id) == 0) continue;
    double dot = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) dot += q[i] * entry.vector[i];
    ranked.push_back({dot, normalize_name(entry.name), &id});
  }
  std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.norm_name != b.norm_name) return a.norm_name < b.norm_name;
    return *a.id < *b.id;
  });
  if (ranked.size() > k) ranked.resize(k);
  std::vector<ScoredHit> hits;
  hits.reserve(ranked.size());
  for (const Ranked& r : ranked) hits.push_back({*r.id, r.score});
  return hits;
}

void EmbeddingIndex::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  for (const auto& [id, entry] : entries_) {
    Json j;
    j["id"] = id;
    j["vector"] = entry.vector;
    out << j.dump() << "\n";
  }
}

EmbeddingIndex EmbeddingIndex::load(const std::string& path, std::size_t dim,
                                    const std::map<std::string, std::string>& names) {
  EmbeddingIndex index(dim);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const std::exception& e) {
      throw IoError("embeddings.jsonl line " + std::to_string(lineno) + ": " + e.what());
    }
    std::string id = j.at("id").get<std::string>();
    Embedding vec = j.at("vector").get<Embedding>();
    auto it = names.find(id);
    index.add(id, it == names.end() ? std::string_view(id) : std::string_view(it->second), vec);
  }
  return index;
}

}  // namespace soiq
