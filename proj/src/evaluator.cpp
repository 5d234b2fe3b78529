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

#include "soiq/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "soiq/errors.hpp"
#include "soiq/prompts.hpp"
#include "soiq/util.hpp"

namespace soiq {

using Json = nlohmann::ordered_json;

std::string to_string(Dimension d) {
  switch (d) {
    case Dimension::Novelty: return "novelty";
    case Dimension::Experiment: return "experiment";
    case Dimension::Motivation: return "motivation";
  }
  return "novelty";
}

double diversity(const std::vector<IdeaDocument>& ideas, Embedder& embedder) {
  if (ideas.size() < 2) throw ValidationError("diversity requires at least two ideas");
  std::vector<Embedding> vectors;
  vectors.reserve(ideas.size());
  for (const IdeaDocument& idea : ideas) vectors.push_back(embedder.embed(idea.concatenated_text()));
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    for (std::size_t j = i + 1; j < vectors.size(); ++j) {
      sum += cosine_similarity(vectors[i], vectors[j]);
      ++pairs;
    }
  }
  double value = 1.0 - sum / static_cast<double>(pairs);
  return std::clamp(value, 0.0, 1.0);
}

namespace {

// First three numbers appearing in the reply.
std::vector<double> extract_numbers(const std::string& text, std::size_t want) {
  std::vector<double> out;
  std::size_t i = 0;
  while (i < text.size() && out.size() < want) {
    char c = text[i];
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        ((c == '-' || c == '+') && i + 1 < text.size() &&
         std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
      std::size_t end = i + (c == '-' || c == '+' ? 1 : 0);
      while (end < text.size() && std::isdigit(static_cast<unsigned char>(text[end]))) ++end;
      if (end < text.size() && text[end] == '.') {
        ++end;
        while (end < text.size() && std::isdigit(static_cast<unsigned char>(text[end]))) ++end;
      }
      out.push_back(std::stod(text.substr(i, end - i)));
      i = end;
    } else {
      ++i;
    }
  }
  return out;
}

}  // namespace

DimensionScore direct_score(const IdeaDocument& idea, const ChatEndpoint& judge, int retries) {
  std::vector<ChatMessage> messages{{Role::System, std::string(prompts::kJudgeDirectSystem)},
                                    {Role::User, idea.wire_json().dump(2)}};
  std::string last_error;
  for (int attempt = 0; attempt <= retries; ++attempt) {
    std::string reply = judge.complete(messages, "judge:direct:" + idea.name);
    std::vector<double> nums = extract_numbers(reply, 3);
    if (nums.size() == 3 && std::all_of(nums.begin(), nums.end(),
                                        [](double v) { return v >= 0.0 && v <= 10.0; })) {
      return DimensionScore{nums[0], nums[1], nums[2]};
    }
    last_error = nums.size() < 3 ? "reply carries fewer than three numbers"
                                 : "scores must lie in [0, 10]";
  }
  throw ParseError("judge produced no usable scores after " + std::to_string(retries + 1) +
                   " attempt(s): " + last_error);
}

namespace {

// A or B as a standalone word; the first such token decides.
std::optional<char> parse_winner_letter(const std::string& reply) {
  for (std::size_t i = 0; i < reply.size(); ++i) {
    char c = reply[i];
    if (c != 'A' && c != 'B') continue;
    bool left_ok = i == 0 || !std::isalnum(static_cast<unsigned char>(reply[i - 1]));
    bool right_ok =
        i + 1 == reply.size() || !std::isalnum(static_cast<unsigned char>(reply[i + 1]));
    if (left_ok && right_ok) return c;
  }
  return std::nullopt;
}

// Asks once in the given presentation order; returns true when the
// FIRST-presented idea wins.
bool ask_pair(const IdeaDocument& first, const IdeaDocument& second, Dimension dimension,
              const ChatEndpoint& judge, int retries, const std::string& tag) {
  std::vector<ChatMessage> messages{
      {Role::System,
       prompts::fill(prompts::kJudgePairSystem, {{"DIMENSION", to_string(dimension)}})},
      {Role::User,
       "Idea A:\n" + first.wire_json().dump(2) + "\n\nIdea B:\n" + second.wire_json().dump(2)}};
  for (int attempt = 0; attempt <= retries; ++attempt) {
    std::string reply = judge.complete(messages, tag);
    if (auto letter = parse_winner_letter(reply)) return *letter == 'A';
  }
  throw ParseError("judge produced no usable A/B verdict (" + tag + ")");
}

}  // namespace

PairJudgment judge_pair(const IdeaDocument& a, const IdeaDocument& b, Dimension dimension,
                        const ChatEndpoint& judge, std::uint64_t rng_seed, int retries) {
  // Two calls with swapped presentation order to cancel position bias.
  bool a_wins_order1 = ask_pair(a, b, dimension, judge, retries, "judge:pair:ab");
  bool b_wins_order2 = ask_pair(b, a, dimension, judge, retries, "judge:pair:ba");
  bool a_wins_order2 = !b_wins_order2;

  PairJudgment result;
  if (a_wins_order1 == a_wins_order2) {
    result.winner = a_wins_order1 ? PairWinner::A : PairWinner::B;
    result.order_sensitive = false;
  } else {
    Rng rng(rng_seed);
    result.winner = rng.coin_flip() ? PairWinner::A : PairWinner::B;
    result.order_sensitive = true;
  }
  return result;
}

std::pair<double, double> elo_update(double rating_a, double rating_b, PairWinner winner,
                                     double k_factor) {
  if (k_factor <= 0.0) throw ValidationError("k_factor must be positive");
  double expected_a = 1.0 / (1.0 + std::pow(10.0, (rating_b - rating_a) / 400.0));
  double score_a = winner == PairWinner::A ? 1.0 : 0.0;
  double delta = k_factor * (score_a - expected_a);
  return {rating_a + delta, rating_b - delta};
}

std::map<std::string, double> RatingTable::averages() const {
  std::map<std::string, double> sums;
  for (const auto& [dim, table] : ratings) {
    for (const auto& [method, rating] : table) sums[method] += rating;
  }
  for (auto& [method, sum] : sums) sum /= static_cast<double>(ratings.size());
  return sums;
}

Json RatingTable::to_json() const {
  Json j;
  j["dimensions"] = Json::object();
  for (const auto& [dim, table] : ratings) {
    Json t;
    for (const auto& [method, rating] : table) t[method] = rating;
    j["dimensions"][dim] = std::move(t);
  }
  Json avg;
  for (const auto& [method, rating] : averages()) avg[method] = rating;
  j["average"] = std::move(avg);
  j["matches"] = Json::array();
  for (const MatchRecord& m : matches) {
    j["matches"].push_back({{"round", m.round},
                            {"dimension", m.dimension},
                            {"method_a", m.method_a},
                            {"method_b", m.method_b},
                            {"winner", m.winner},
                            {"topic", m.topic},
                            {"order_sensitive", m.order_sensitive}});
  }
  return j;
}

std::string RatingTable::leaderboard_text() const {
  std::vector<std::string> dims;
  for (const auto& [dim, table] : ratings) dims.push_back(dim);
  auto avg = averages();
  std::vector<std::pair<std::string, double>> order(avg.begin(), avg.end());
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  std::string out = "method";
  for (const std::string& d : dims) out += "\t" + d;
  out += "\taverage\n";
  char buf[64];
  for (const auto& [method, mean] : order) {
    out += method;
    for (const std::string& d : dims) {
      std::snprintf(buf, sizeof(buf), "\t%.1f", ratings.at(d).at(method));
      out += buf;
    }
    std::snprintf(buf, sizeof(buf), "\t%.1f", mean);
    out += buf;
    out += "\n";
  }
  return out;
}

RatingTable swiss_tournament(const std::map<std::string, std::vector<IdeaDocument>>& entries,
                             const std::vector<std::string>& topics,
                             const std::vector<Dimension>& dimensions, const ChatEndpoint& judge,
                             std::uint64_t rng_seed, const TournamentOptions& options) {
  if (entries.size() < 2) throw ValidationError("a tournament needs at least two methods");
  if (topics.empty()) throw ValidationError("a tournament needs at least one topic");
  for (const auto& [method, ideas] : entries) {
    if (ideas.size() != topics.size()) {
      throw SchedulingError("method " + method + " supplies " + std::to_string(ideas.size()) +
                            " ideas for " + std::to_string(topics.size()) + " topics");
    }
  }

  int rounds = options.rounds;
  if (rounds <= 0) {
    rounds = static_cast<int>(
                 std::ceil(std::log2(static_cast<double>(entries.size())))) + 2;
  }

  RatingTable table;
  for (std::size_t d = 0; d < dimensions.size(); ++d) {
    const std::string dim_name = to_string(dimensions[d]);
    auto& ratings = table.ratings[dim_name];
    for (const auto& [method, ideas] : entries) ratings[method] = options.initial_rating;

    // Seeded topic order, consumed one per pairing, cycling as needed.
    Rng topic_rng(mix_seed(rng_seed, d));
    std::vector<std::size_t> topic_order(topics.size());
    for (std::size_t i = 0; i < topic_order.size(); ++i) topic_order[i] = i;
    topic_rng.shuffle(topic_order);
    std::size_t topic_cursor = 0;
    auto next_topic = [&]() {
      std::size_t t = topic_order[topic_cursor % topic_order.size()];
      ++topic_cursor;
      return t;
    };

    std::set<std::pair<std::string, std::string>> played;
    std::uint64_t match_seq = 0;

    for (int round = 1; round <= rounds; ++round) {
      // Standings: rating descending, name ascending.
      std::vector<std::string> standing;
      for (const auto& [method, rating] : ratings) standing.push_back(method);
      std::sort(standing.begin(), standing.end(), [&](const std::string& x, const std::string& y) {
        if (ratings[x] != ratings[y]) return ratings[x] > ratings[y];
        return x < y;
      });

      // Adjacent pairing with rematch avoidance where feasible.
      const std::size_t npos = standing.size();
      std::vector<bool> used(standing.size(), false);
      std::vector<std::pair<std::string, std::string>> pairings;
      for (std::size_t i = 0; i < standing.size(); ++i) {
        if (used[i]) continue;
        std::size_t fresh = npos, fallback = npos;
        for (std::size_t j = i + 1; j < standing.size(); ++j) {
          if (used[j]) continue;
          if (fallback == npos) fallback = j;
          auto key = std::minmax(standing[i], standing[j]);
          if (played.count({key.first, key.second}) == 0) {
            fresh = j;
            break;
          }
        }
        std::size_t partner = fresh != npos ? fresh : fallback;
        if (partner == npos) continue;  // odd method sits out, rating unchanged
        used[i] = used[partner] = true;
        pairings.emplace_back(standing[i], standing[partner]);
      }

      // Judge all pairings, then apply updates in pairing order.
      struct Outcome {
        std::string a, b, topic;
        PairJudgment judgment;
      };
      std::vector<Outcome> outcomes;
      for (const auto& [ma, mb] : pairings) {
        std::size_t t = next_topic();
        PairJudgment judgment =
            judge_pair(entries.at(ma)[t], entries.at(mb)[t], dimensions[d], judge,
                       mix_seed(rng_seed, (d << 24) ^ match_seq), 2);
        ++match_seq;
        outcomes.push_back({ma, mb, topics[t], judgment});
        auto key = std::minmax(ma, mb);
        played.insert({key.first, key.second});
      }
      for (const Outcome& o : outcomes) {
        auto [ra, rb] =
            elo_update(ratings[o.a], ratings[o.b], o.judgment.winner, options.k_factor);
        ratings[o.a] = ra;
        ratings[o.b] = rb;
        table.matches.push_back({round, dim_name, o.a, o.b,
                                 o.judgment.winner == PairWinner::A ? o.a : o.b, o.topic,
                                 o.judgment.order_sensitive});
      }
    }
  }
  return table;
}

}  // namespace soiq
