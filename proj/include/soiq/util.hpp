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
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace soiq {

// --- text helpers -----------------------------------------------------------

// ASCII case-fold + collapse whitespace runs to single spaces + trim.
// This is the one normalization used for node-name identity everywhere.
std::string normalize_name(std::string_view text);

// Whitespace tokenization (the word-count rule counts these tokens).
std::vector<std::string> split_words(std::string_view text);

std::string to_lower(std::string_view text);
std::string trim(std::string_view text);

bool starts_with(std::string_view text, std::string_view prefix);

// Filesystem-safe slug: lowercase alnum, everything else collapsed to '_'.
std::string slugify(std::string_view text, std::size_t max_len = 48);

// A ``` fenced block. info is the text after the opening fence marker
// ("json", "function call", ...); body excludes both fence lines. A fence
// left open at end of input yields a block running to the end.
struct FencedBlock {
  std::string info;
  std::string body;
  std::size_t pos = 0;  // offset of the opening fence line
};
std::vector<FencedBlock> find_fenced_blocks(std::string_view text);

// FNV-1a 64-bit over the raw bytes. Used by the deterministic mock embedder
// and as the literature-cache file key; both are documented to use exactly
// this hash.
std::uint64_t fnv1a64(std::string_view bytes);

std::string hex64(std::uint64_t value);

// Conservative token estimate: ceil(chars / 4) plus a 10% safety margin.
std::size_t estimate_tokens(std::string_view text);

// --- deterministic randomness ------------------------------------------------

// splitmix64 finalizer; used to derive independent sub-seeds from one
// run seed (per session, per pass level, per tool call, ...).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

// mt19937_64 with explicitly coded derived draws. The standard fully pins
// the raw engine sequence; distributions are implementation-defined, so the
// mappings below are written out to keep results identical everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform over [0, n) by rejection sampling. n must be > 0.
  std::size_t uniform_index(std::size_t n);

  // Uniform in [0, 1): top 53 bits of the raw draw.
  double uniform_double();

  bool coin_flip() { return (next_u64() & 1u) != 0; }

  // In-place Fisher-Yates.
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = uniform_index(i);
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// --- small file helpers ------------------------------------------------------

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace soiq
