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

#include "soiq/pipeline.hpp"

#include <algorithm>
#include <exception>
#include <filesystem>
#include <set>
#include <thread>

#include "soiq/errors.hpp"
#include "soiq/evaluator.hpp"
#include "soiq/hierarchy.hpp"
#include "soiq/ideator.hpp"
#include "soiq/miner.hpp"
#include "soiq/util.hpp"

namespace soiq {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

std::vector<ScriptedProvider::Step> load_script(const std::string& path) {
  Json j = Json::parse(read_file(path), nullptr, false);
  if (j.is_discarded()) throw ConfigError("provider script is not valid JSON: " + path);
  const Json* array = nullptr;
  if (j.is_array()) {
    array = &j;
  } else if (j.is_object() && j.contains("responses") && j["responses"].is_array()) {
    array = &j["responses"];
  } else {
    throw ConfigError("provider script must be an array or {\"responses\": [...]}: " + path);
  }
  std::vector<ScriptedProvider::Step> steps;
  for (const Json& item : *array) {
    if (item.is_string()) {
      steps.push_back({false, item.get<std::string>()});
    } else if (item.is_object() && item.value("fail", false)) {
      steps.push_back({true, {}});
    } else if (item.is_object() && item.contains("reply")) {
      steps.push_back({false, item["reply"].get<std::string>()});
    } else {
      throw ConfigError("provider script entries must be strings, {\"reply\":...}, or {\"fail\":true}");
    }
  }
  if (steps.empty()) throw ConfigError("provider script is empty: " + path);
  return steps;
}

ScriptedProvider::Mode script_mode(const std::string& mode) {
  return mode == "cycle" ? ScriptedProvider::Mode::Cycle : ScriptedProvider::Mode::Sequence;
}

Json stats_json(const GraphStats& s) {
  Json j;
  j["problem_nodes"] = s.problem_nodes;
  j["challenge_nodes"] = s.challenge_nodes;
  j["solution_nodes"] = s.solution_nodes;
  j["parent_nodes"] = s.parent_nodes;
  j["parent_of_edges"] = s.parent_of_edges;
  j["problem_challenge_edges"] = s.problem_challenge_edges;
  j["challenge_solution_edges"] = s.challenge_solution_edges;
  j["total_nodes"] = s.total_nodes;
  j["total_edges"] = s.total_edges;
  return j;
}

Json violation_json(const NamingViolation& v) {
  return Json{{"kind", to_string(v.kind)}, {"rule", v.rule}, {"name", v.name}, {"detail", v.detail}};
}

Json pass_report_json(const PassReport& r) {
  Json j;
  j["kind"] = to_string(r.kind);
  j["level"] = r.level;
  j["parents_created"] = r.parents_created;
  j["edges_created"] = r.edges_created;
  j["focal_sequence"] = r.focal_sequence;
  j["parent_ids"] = r.parent_ids;
  j["complete"] = r.complete;
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

}  // namespace

Engine::Engine(RunConfig config) : config_(std::move(config)) {
  config_.validate();

  if (config_.embedder.type == "hash") {
    embedder_ = std::make_shared<HashEmbedder>(config_.embedding_dim, config_.embedder.seed);
  } else {
    embedder_ = std::make_shared<HttpEmbedder>(config_.embedder.endpoint, config_.embedding_dim,
                                               config_.embedder.api_key_env, config_.embedder.retries,
                                               config_.embedder.timeout_seconds);
  }

  std::shared_ptr<LiteratureClient> base;
  if (config_.literature.type == "fixture") {
    base = std::make_shared<FixtureLiteratureClient>(
        FixtureLiteratureClient::load_records(config_.resolve(config_.literature.records)));
  } else {
    base = std::make_shared<HttpLiteratureClient>(config_.literature.endpoint,
                                                  config_.literature.api_key_env,
                                                  config_.literature.timeout_seconds);
  }
  std::string cache_dir = config_.literature.cache_dir.empty()
                              ? std::string{}
                              : config_.resolve(config_.literature.cache_dir);
  literature_ = std::make_shared<CachingLiteratureClient>(std::move(base), cache_dir);

  for (const auto& [role, p] : config_.providers) {
    if (p.type == "scripted") {
      providers_[role] = std::make_shared<ScriptedProvider>(load_script(config_.resolve(p.script)),
                                                            script_mode(p.mode));
    } else {
      providers_[role] = std::make_shared<HttpChatProvider>(
          p.profile.endpoint, p.profile.model, std::string{}, p.profile.timeout_seconds);
    }
  }

  load_state();
}

ChatEndpoint Engine::endpoint(const std::string& role) {
  auto it = providers_.find(role);
  // Merge decisions run under the extraction profile unless a dedicated
  // hierarchy provider is configured.
  if (it == providers_.end() && role == "hierarchy") it = providers_.find("extractor");
  if (it == providers_.end()) {
    throw ConfigError("no provider configured for role: " + role);
  }
  return ChatEndpoint{&gateway_, it->second, config_.providers.at(it->first).profile};
}

std::string Engine::run_path() const {
  return (fs::path(config_.resolve(config_.run_dir)) / config_.effective_run_id()).string();
}

void Engine::load_state() {
  std::string dir = config_.resolve(config_.graph_dir);
  if (fs::exists(fs::path(dir) / "nodes.jsonl")) {
    MotivGraph g = MotivGraph::load(dir);
    std::map<std::string, std::string> names;
    for (const MotivNode* n : g.nodes_sorted()) names[n->id] = n->name;
    fs::path emb = fs::path(dir) / "embeddings.jsonl";
    if (fs::exists(emb)) {
      index_.reset(EmbeddingIndex::load(emb.string(), config_.embedding_dim, names));
    } else {
      index_.reset(EmbeddingIndex(config_.embedding_dim));
    }
    graph_.reset(std::move(g));
  } else {
    index_.reset(EmbeddingIndex(config_.embedding_dim));
  }
}

void Engine::save_state() {
  std::string dir = config_.resolve(config_.graph_dir);
  fs::create_directories(dir);
  graph_.read([&](const MotivGraph& g) {
    g.save(dir);
    return 0;
  });
  index_.snapshot()->save((fs::path(dir) / "embeddings.jsonl").string());
}

void Engine::prepare_run_dir() {
  if (run_dir_ready_) return;
  fs::path run = run_path();
  fs::create_directories(run);
  write_file((run / "config.json").string(), config_.to_json().dump(2) + "\n");
  gateway_.set_log_path((run / "llm_log.jsonl").string());
  run_dir_ready_ = true;
}

Json Engine::build_graph(const std::string& corpus_dir) {
  std::string dir = config_.resolve(corpus_dir);
  if (!fs::is_directory(dir)) throw UsageError("corpus directory does not exist: " + dir);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw UsageError("corpus directory is empty: " + dir);

  if (config_.dry_run) {
    Json j;
    j["dry_run"] = true;
    j["command"] = "build-graph";
    j["papers"] = files.size();
    return j;
  }

  prepare_run_dir();
  ChatEndpoint extractor = endpoint("extractor");
  MinerOptions miner_options;
  miner_options.extraction_retries = config_.extraction_retries;

  Json papers = Json::array();
  std::size_t created = 0, merged = 0, edges = 0, violations = 0;
  for (const fs::path& file : files) {
    std::string paper_id = file.stem().string();
    IngestReport report =
        ingest_paper(read_file(file.string()), paper_id, extractor, graph_, index_,
                     *embedder_, miner_options);
    Json pj;
    pj["paper"] = report.paper;
    pj["triples"] = report.triples;
    pj["nodes_created"] = report.nodes_created;
    pj["nodes_merged"] = report.nodes_merged;
    pj["edges_created"] = report.edges_created;
    Json vj = Json::array();
    for (const NamingViolation& v : report.violations) vj.push_back(violation_json(v));
    pj["violations"] = std::move(vj);
    papers.push_back(std::move(pj));
    created += report.nodes_created;
    merged += report.nodes_merged;
    edges += report.edges_created;
    violations += report.violations.size();
  }
  save_state();

  Json summary;
  summary["command"] = "build-graph";
  summary["papers"] = papers.size();
  summary["nodes_created"] = created;
  summary["nodes_merged"] = merged;
  summary["edges_created"] = edges;
  summary["naming_violations"] = violations;
  summary["stats"] = graph_.read([](const MotivGraph& g) { return stats_json(g.stats()); });
  summary["per_paper"] = std::move(papers);
  write_file((fs::path(run_path()) / "build_graph_summary.json").string(),
             summary.dump(2) + "\n");
  return summary;
}

Json Engine::hierarchy(const std::string& kind_text) {
  std::vector<NodeKind> kinds;
  std::string k = to_lower(trim(kind_text));
  if (k == "problem") {
    kinds = {NodeKind::Problem};
  } else if (k == "challenge") {
    kinds = {NodeKind::Challenge};
  } else if (k == "both" || k.empty()) {
    kinds = {NodeKind::Problem, NodeKind::Challenge};
  } else if (k == "solution") {
    throw UsageError("solution nodes do not take parents");
  } else {
    throw UsageError("unknown kind: " + kind_text + " (expected problem, challenge, or both)");
  }

  if (config_.dry_run) {
    Json j;
    j["dry_run"] = true;
    j["command"] = "hierarchy";
    j["kind"] = k.empty() ? "both" : k;
    return j;
  }

  prepare_run_dir();
  ChatEndpoint llm = endpoint("hierarchy");
  HierarchyOptions options;
  options.k = config_.k;
  options.similarity_floor = config_.similarity_floor;
  options.max_levels = config_.max_levels;

  Json summary;
  summary["command"] = "hierarchy";
  summary["passes"] = Json::array();
  std::size_t parents = 0, edges = 0;
  bool complete = true;
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    std::vector<PassReport> reports = run_until_stable(
        graph_, index_, *embedder_, kinds[i], llm, mix_seed(*config_.seed, 100 + i), options);
    for (const PassReport& r : reports) {
      summary["passes"].push_back(pass_report_json(r));
      parents += r.parents_created;
      edges += r.edges_created;
      complete = complete && r.complete;
    }
  }
  save_state();
  summary["parents_created"] = parents;
  summary["parent_of_edges_created"] = edges;
  summary["complete"] = complete;
  summary["stats"] = graph_.read([](const MotivGraph& g) { return stats_json(g.stats()); });
  write_file((fs::path(run_path()) / ("hierarchy_" + (k.empty() ? "both" : k) + ".json")).string(),
             summary.dump(2) + "\n");
  if (!complete) {
    throw TransportError("hierarchy pass aborted on provider failure; partial results saved");
  }
  return summary;
}

Json Engine::ideate(const std::string& topics_file) {
  std::string path = config_.resolve(topics_file);
  if (!fs::exists(path)) throw UsageError("topics file does not exist: " + path);
  std::vector<std::string> topics;
  {
    std::string content = read_file(path);
    std::size_t start = 0;
    while (start <= content.size()) {
      std::size_t end = content.find('\n', start);
      std::string line = trim(content.substr(
          start, end == std::string::npos ? std::string::npos : end - start));
      if (!line.empty()) topics.push_back(line);
      if (end == std::string::npos) break;
      start = end + 1;
    }
  }
  if (topics.empty()) throw UsageError("topics file has no topics: " + path);

  if (config_.dry_run) {
    Json j;
    j["dry_run"] = true;
    j["command"] = "ideate";
    j["topics"] = topics.size();
    j["sessions"] = topics.size() * static_cast<std::size_t>(config_.ideas_per_topic);
    return j;
  }

  prepare_run_dir();
  fs::path run = run_path();
  fs::create_directories(run / "transcripts");
  fs::create_directories(run / "ideas");

  ChatEndpoint researcher = endpoint("researcher");
  ChatEndpoint mentor = endpoint("mentor");
  auto graph_snapshot = graph_.snapshot();
  auto index_snapshot = index_.snapshot();

  IdeatorOptions options;
  options.max_rounds = config_.max_rounds;
  options.tool_call_budget = config_.tool_call_budget;
  options.idea_reprompts = config_.idea_reprompts;
  options.current_time = config_.current_time;

  struct SessionOutcome {
    std::string verdict;
    bool failed = false;
    std::string error;
    std::exception_ptr exception;
  };
  std::vector<std::vector<SessionOutcome>> outcomes(topics.size());
  for (auto& v : outcomes) v.resize(static_cast<std::size_t>(config_.ideas_per_topic));

  // Sessions within a topic run sequentially (later ones see earlier
  // ideas); topics fan out across workers.
  auto run_topic = [&](std::size_t t) {
    std::string previous;
    for (int i = 0; i < config_.ideas_per_topic; ++i) {
      std::uint64_t session_seed = mix_seed(mix_seed(*config_.seed, t), static_cast<std::uint64_t>(i));
      DispatcherOptions dispatch_options;
      dispatch_options.top_k = config_.top_k;
      dispatch_options.literature_limit = config_.literature.limit;
      dispatch_options.rng_seed = session_seed;
      ToolDispatcher tools(graph_snapshot, index_snapshot, embedder_, literature_,
                           dispatch_options);
      IdeationSession session(topics[t], previous, researcher, mentor, tools, graph_snapshot,
                              options, session_seed);
      SessionOutcome& outcome = outcomes[t][static_cast<std::size_t>(i)];
      std::string stem = slugify(topics[t]) + "__" + std::to_string(i);
      try {
        DialogueTranscript transcript = session.run();
        outcome.verdict = transcript.verdict;
        write_file((run / "transcripts" / (stem + ".json")).string(),
                   transcript.to_json().dump(2) + "\n");
        if (transcript.accepted() && transcript.final_idea.has_value()) {
          const IdeaDocument& idea = *transcript.final_idea;
          Json out;
          out["topic"] = topics[t];
          out["session"] = i;
          out["revision"] = idea.revision;
          out["idea"] = idea.wire_json();
          Json gr = Json::array();
          for (const Grounding& g : idea.groundings) {
            gr.push_back({{"href", g.href}, {"node_id", g.node_id}});
          }
          out["groundings"] = std::move(gr);
          write_file((run / "ideas" / (stem + ".json")).string(), out.dump(2) + "\n");
        }
        if (session.current_idea().has_value()) {
          const IdeaDocument& idea = *session.current_idea();
          previous += "- " + idea.name + ": " + idea.title + "\n";
        }
      } catch (const Error&) {
        outcome.failed = true;
        outcome.exception = std::current_exception();
        try {
          std::rethrow_exception(outcome.exception);
        } catch (const Error& e) {
          outcome.error = e.what();
        }
        // The partial transcript still documents the failed session.
        write_file((run / "transcripts" / (stem + ".json")).string(),
                   session.transcript().to_json().dump(2) + "\n");
      }
    }
  };

  if (config_.workers <= 1 || topics.size() <= 1) {
    for (std::size_t t = 0; t < topics.size(); ++t) run_topic(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    int n = std::min<int>(config_.workers, static_cast<int>(topics.size()));
    for (int w = 0; w < n; ++w) {
      pool.emplace_back([&]() {
        while (true) {
          std::size_t t = next.fetch_add(1);
          if (t >= topics.size()) return;
          run_topic(t);
        }
      });
    }
    for (std::thread& th : pool) th.join();
  }

  Json summary;
  summary["command"] = "ideate";
  summary["topics"] = topics.size();
  std::size_t accepted = 0, rejected = 0, failed = 0;
  Json sessions = Json::array();
  std::exception_ptr first_failure;
  for (std::size_t t = 0; t < topics.size(); ++t) {
    for (int i = 0; i < config_.ideas_per_topic; ++i) {
      const SessionOutcome& o = outcomes[t][static_cast<std::size_t>(i)];
      Json sj;
      sj["topic"] = topics[t];
      sj["session"] = i;
      if (o.failed) {
        ++failed;
        sj["status"] = "failed";
        sj["error"] = o.error;
        if (!first_failure) first_failure = o.exception;
      } else {
        sj["status"] = o.verdict;
        if (o.verdict == "accept") {
          ++accepted;
        } else {
          ++rejected;  // reject and round_limit both stay out of the output set
        }
      }
      sessions.push_back(std::move(sj));
    }
  }
  summary["accepted"] = accepted;
  summary["rejected"] = rejected;
  summary["failed"] = failed;
  summary["sessions"] = std::move(sessions);
  write_file((fs::path(run_path()) / "ideate_summary.json").string(), summary.dump(2) + "\n");
  if (first_failure) std::rethrow_exception(first_failure);
  return summary;
}

namespace {

struct IdeaSet {
  // topic -> ideas in file order
  std::map<std::string, std::vector<IdeaDocument>> by_topic;
};

IdeaDocument idea_from_file_json(const Json& j) {
  const Json& w = j.contains("idea") ? j["idea"] : j;
  IdeaParseOutcome outcome = validate_idea_json("```json\n" + w.dump() + "\n```");
  if (!outcome.idea.has_value()) {
    std::string joined;
    for (const std::string& e : outcome.errors) joined += e + "; ";
    throw ValidationError("idea file does not satisfy the idea schema: " + joined);
  }
  IdeaDocument idea = std::move(*outcome.idea);
  idea.revision = j.value("revision", 0);
  return idea;
}

IdeaSet load_idea_set(const std::string& dir) {
  if (!fs::is_directory(dir)) throw UsageError("idea set directory does not exist: " + dir);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  IdeaSet set;
  for (const fs::path& file : files) {
    Json j = Json::parse(read_file(file.string()), nullptr, false);
    if (j.is_discarded()) throw ValidationError("idea file is not valid JSON: " + file.string());
    std::string topic = j.value("topic", std::string{"(unknown)"});
    set.by_topic[topic].push_back(idea_from_file_json(j));
  }
  if (set.by_topic.empty()) throw UsageError("idea set directory holds no idea files: " + dir);
  return set;
}

}  // namespace

Json Engine::evaluate(const std::map<std::string, std::string>& sets) {
  if (sets.empty()) throw UsageError("evaluate needs at least one --set name=dir");

  if (config_.dry_run) {
    Json j;
    j["dry_run"] = true;
    j["command"] = "evaluate";
    j["methods"] = sets.size();
    return j;
  }

  prepare_run_dir();
  std::map<std::string, IdeaSet> loaded;
  for (const auto& [method, dir] : sets) loaded[method] = load_idea_set(config_.resolve(dir));

  ChatEndpoint judge = endpoint("judge");

  Json report;
  report["command"] = "evaluate";

  // Diversity: per method x topic over that topic's idea list.
  Json diversity_json;
  for (const auto& [method, set] : loaded) {
    Json per_topic;
    for (const auto& [topic, ideas] : set.by_topic) {
      if (ideas.size() >= 2) {
        per_topic[topic] = diversity(ideas, *embedder_);
      } else {
        per_topic[topic] = nullptr;  // needs at least two ideas
      }
    }
    diversity_json[method] = std::move(per_topic);
  }
  report["diversity"] = std::move(diversity_json);

  // Direct scores: every idea, averaged per method.
  Json direct_json;
  for (const auto& [method, set] : loaded) {
    double nov = 0, exp = 0, mot = 0;
    std::size_t n = 0;
    for (const auto& [topic, ideas] : set.by_topic) {
      for (const IdeaDocument& idea : ideas) {
        DimensionScore s = direct_score(idea, judge);
        nov += s.novelty;
        exp += s.experiment;
        mot += s.motivation;
        ++n;
      }
    }
    Json m;
    m["ideas"] = n;
    m["novelty"] = n ? nov / static_cast<double>(n) : 0.0;
    m["experiment"] = n ? exp / static_cast<double>(n) : 0.0;
    m["motivation"] = n ? mot / static_cast<double>(n) : 0.0;
    direct_json[method] = std::move(m);
  }
  report["direct_scores"] = std::move(direct_json);

  // Swiss tournament over the union of topics; the first idea per topic
  // represents its method.
  if (loaded.size() >= 2) {
    std::set<std::string> topic_union;
    for (const auto& [method, set] : loaded) {
      for (const auto& [topic, ideas] : set.by_topic) topic_union.insert(topic);
    }
    std::vector<std::string> topics(topic_union.begin(), topic_union.end());
    std::map<std::string, std::vector<IdeaDocument>> entries;
    for (const auto& [method, set] : loaded) {
      std::vector<IdeaDocument> aligned;
      for (const std::string& topic : topics) {
        auto it = set.by_topic.find(topic);
        if (it == set.by_topic.end() || it->second.empty()) {
          throw SchedulingError("method " + method + " has no idea for scheduled topic: " + topic);
        }
        aligned.push_back(it->second.front());
      }
      entries[method] = std::move(aligned);
    }
    TournamentOptions options;
    options.rounds = config_.tournament_rounds;
    options.k_factor = config_.elo_k_factor;
    options.initial_rating = config_.elo_initial;
    RatingTable table = swiss_tournament(
        entries, topics, {Dimension::Novelty, Dimension::Experiment, Dimension::Motivation}, judge,
        mix_seed(*config_.seed, 999), options);
    report["elo"] = table.to_json();
    write_file((fs::path(run_path()) / "leaderboard.txt").string(), table.leaderboard_text());
  } else {
    report["elo"] = nullptr;
    report["notice"] = "tournament skipped: needs at least two methods";
  }

  write_file((fs::path(run_path()) / "evaluation.json").string(), report.dump(2) + "\n");
  return report;
}

Json Engine::validate_graph() {
  Json report;
  report["command"] = "validate-graph";
  std::vector<GraphViolation> violations =
      graph_.read([](const MotivGraph& g) { return g.validate(); });
  Json vj = Json::array();
  for (const GraphViolation& v : violations) {
    vj.push_back({{"check", v.check}, {"detail", v.detail}, {"ids", v.ids}});
  }
  report["violations"] = std::move(vj);
  report["ok"] = violations.empty();
  report["stats"] = graph_.read([](const MotivGraph& g) { return stats_json(g.stats()); });
  return report;
}

}  // namespace soiq
