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

using Embedding = std::vector<double>;

double cosine_similarity(const Embedding& a, const Embedding& b);

// Text-to-vector provider. Implementations must be pure per text: the same
// input always yields bitwise-identical output.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual Embedding embed(std::string_view text) = 0;
  virtual std::size_t dim() const = 0;
};

// Deterministic mock used offline and in tests. The algorithm is part of
// the contract so expectations can be precomputed independently:
//   1. case-fold the text and split on whitespace;
//   2. for each token, seed std::mt19937_64 with fnv1a64(token) XOR the
//      provider seed;
//   3. draw dim doubles u = (raw >> 11) / 2^53 and accumulate 2u - 1 per
//      component across tokens;
//   4. L2-normalize the accumulated vector.
class HashEmbedder : public Embedder {
 public:
  explicit HashEmbedder(std::size_t dim = 384, std::uint64_t seed = 0);
  Embedding embed(std::string_view text) override;
  std::size_t dim() const override { return dim_; }

 private:
  std::size_t dim_;
  std::uint64_t seed_;
};

// Remote provider speaking POST {"texts": [...]} -> {"vectors": [[...]]}.
// Credentials come from the environment variable named in api_key_env and
// are sent as a bearer token when present.
class HttpEmbedder : public Embedder {
 public:
  HttpEmbedder(std::string endpoint, std::size_t dim, std::string api_key_env = {},
               int retries = 2, int timeout_seconds = 30, int backoff_ms = 250);
  Embedding embed(std::string_view text) override;
  std::size_t dim() const override { return dim_; }

 private:
  std::string endpoint_;
  std::size_t dim_;
  std::string api_key_env_;
  int retries_;
  int timeout_seconds_;
  int backoff_ms_;
  std::map<std::string, Embedding, std::less<>> memo_;  // providers are pure per text
  std::shared_mutex memo_mutex_;
};

struct ScoredHit {
  std::string id;
  double score = 0.0;  // cosine similarity in [-1, 1]
};

// Exact brute-force nearest-neighbor search over stored node vectors.
// Vectors are normalized on insert so similarity reduces to a dot product.
class EmbeddingIndex {
 public:
  explicit EmbeddingIndex(std::size_t dim = 384);

  // Inserts or replaces. The name is kept for deterministic tie-breaking.
  void add(const std::string& id, std::string_view name, const Embedding& vector);
  bool contains(const std::string& id) const { return entries_.count(id) != 0; }
  // Unit-norm stored vector, or nullptr when the id is not indexed.
  const Embedding* find_vector(const std::string& id) const;
  std::size_t size() const { return entries_.size(); }
  std::size_t dim() const { return dim_; }

  // The k highest-cosine entries (fewer if the index is smaller), sorted by
  // descending score with ties broken by node name ascending. When restrict
  // is given only ids in that set are eligible.
  std::vector<ScoredHit> top_k(const Embedding& query, std::size_t k,
                               const std::optional<std::set<std::string>>& restrict_ids =
                                   std::nullopt) const;

  // embeddings.jsonl sidecar: one {"id", "vector"} object per line, sorted
  // by id. Names are not persisted; the loader resolves them via lookup.
  void save(const std::string& path) const;
  static EmbeddingIndex load(const std::string& path, std::size_t dim,
                             const std::map<std::string, std::string>& names);

 private:
  struct Entry {
    std::string name;
    Embedding vector;  // unit norm
  };
  std::size_t dim_;
  std::map<std::string, Entry> entries_;
};

// Read-parallel wrapper; rebuilds swap the active snapshot atomically.
class IndexStore {
 public:
  IndexStore() : index_(std::make_shared<EmbeddingIndex>()) {}
  explicit IndexStore(EmbeddingIndex index)
      : index_(std::make_shared<EmbeddingIndex>(std::move(index))) {}

  std::shared_ptr<const EmbeddingIndex> snapshot() const {
    std::shared_lock lock(mutex_);
    return index_;
  }

  void reset(EmbeddingIndex index) {
    std::unique_lock lock(mutex_);
    index_ = std::make_shared<EmbeddingIndex>(std::move(index));
  }

  template <typename F>
  auto write(F&& fn) {
    std::unique_lock lock(mutex_);
    auto next = std::make_shared<EmbeddingIndex>(*index_);
    if constexpr (std::is_void_v<decltype(fn(*next))>) {
      fn(*next);
      index_ = std::move(next);
    } else {
      auto result = fn(*next);
      index_ = std::move(next);
      return result;
    }
  }

 private:
  mutable std::shared_mutex mutex_;
  std::shared_ptr<const EmbeddingIndex> index_;
};

}  // namespace soiq
