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
#include <string>
#include <vector>

#include <json.hpp>

#include "soiq/embedding.hpp"
#include "soiq/gateway.hpp"
#include "soiq/ideator.hpp"

namespace soiq {

enum class Dimension { Novelty, Experiment, Motivation };
std::string to_string(Dimension d);

struct DimensionScore {
  double novelty = 0.0;
  double experiment = 0.0;
  double motivation = 0.0;
};

// 1 minus the mean pairwise cosine similarity of the ideas' embedded
// texts (the eight fields concatenated in schema order), clamped to
// [0, 1]. Requires at least two ideas.
double diversity(const std::vector<IdeaDocument>& ideas, Embedder& embedder);

// One judged reply parsed into three 0-10 scores ("Scores: n/e/m" or any
// reply whose first three numbers are in range); out-of-range or
// unparseable replies are re-asked up to `retries` times.
DimensionScore direct_score(const IdeaDocument& idea, const ChatEndpoint& judge, int retries = 2);

enum class PairWinner { A, B };

struct PairJudgment {
  PairWinner winner = PairWinner::A;
  // Set when the two presentation orders disagreed and the winner came
  // from the seeded coin flip.
  bool order_sensitive = false;
};

// Queries the judge twice with the presentation order swapped. Agreement
// decides the winner; disagreement falls back to a seeded coin flip and
// flags the match.
PairJudgment judge_pair(const IdeaDocument& a, const IdeaDocument& b, Dimension dimension,
                        const ChatEndpoint& judge, std::uint64_t rng_seed, int retries = 2);

// Standard logistic update: expected_a = 1 / (1 + 10^((rb - ra) / 400)),
// ra' = ra + k * (score_a - expected_a), zero-sum by construction.
std::pair<double, double> elo_update(double rating_a, double rating_b, PairWinner winner,
                                     double k_factor);

struct MatchRecord {
  int round = 0;
  std::string dimension;
  std::string method_a;
  std::string method_b;
  std::string winner;
  std::string topic;
  bool order_sensitive = false;
};

struct RatingTable {
  // dimension name -> method -> rating
  std::map<std::string, std::map<std::string, double>> ratings;
  std::vector<MatchRecord> matches;

  std::map<std::string, double> averages() const;  // mean across dimensions per method
  nlohmann::ordered_json to_json() const;
  std::string leaderboard_text() const;
};

struct TournamentOptions {
  int rounds = 0;  // 0 = ceil(log2(methods)) + 2
  double k_factor = 32.0;
  double initial_rating = 1000.0;
};

// Swiss pairing per dimension: methods sorted by standing, adjacent
// pairing with rematch avoidance where feasible, odd method sits out.
// Each pairing judges one topic's idea pair (topics consumed in seeded
// order) and rating updates apply after the round in pairing order.
// `entries` maps each method to one idea per topic, aligned with
// `topics`; a missing idea is a scheduling error raised before any
// judging.
RatingTable swiss_tournament(const std::map<std::string, std::vector<IdeaDocument>>& entries,
                             const std::vector<std::string>& topics,
                             const std::vector<Dimension>& dimensions, const ChatEndpoint& judge,
                             std::uint64_t rng_seed, const TournamentOptions& options = {});

}  // namespace soiq
