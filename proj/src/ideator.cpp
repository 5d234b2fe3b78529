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

#include "soiq/ideator.hpp"

#include <algorithm>
#include <regex>

#include "soiq/errors.hpp"
#include "soiq/prompts.hpp"
#include "soiq/util.hpp"

namespace soiq {

using Json = nlohmann::ordered_json;

const std::array<std::string_view, 8> IdeaDocument::kFieldKeys = {
    "Name",   "Title",  "Motivation",       "Related Work",
    "Abstract", "Method", "Experiments plan", "Risk Factors and Limitations"};

namespace {

std::array<const std::string*, 8> field_slots(const IdeaDocument& idea) {
  return {&idea.name,   &idea.title,  &idea.motivation,       &idea.related_work,
          &idea.abstract_text, &idea.method, &idea.experiments_plan, &idea.risks_limitations};
}

std::array<std::string*, 8> field_slots(IdeaDocument& idea) {
  return {&idea.name,   &idea.title,  &idea.motivation,       &idea.related_work,
          &idea.abstract_text, &idea.method, &idea.experiments_plan, &idea.risks_limitations};
}

bool valid_idea_name(std::string_view name) {
  if (name.empty()) return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
  });
}

// Collects kg: hrefs from <a href="..."> tags; the HTML-escaped spelling
// (&lt;a href="...") that models sometimes emit counts too.
std::vector<std::string> grounding_hrefs(std::string_view text) {
  static const std::regex re(R"((<a|&lt;a)\s+href="([^"]*)\")", std::regex::icase);
  std::vector<std::string> out;
  auto begin = std::cregex_iterator(text.data(), text.data() + text.size(), re);
  for (auto it = begin; it != std::cregex_iterator(); ++it) {
    std::string href = (*it)[2].str();
    if (starts_with(to_lower(href), "kg:")) out.push_back(href);
  }
  return out;
}

}  // namespace

Json IdeaDocument::wire_json() const {
  Json j;
  auto slots = field_slots(*this);
  for (std::size_t i = 0; i < kFieldKeys.size(); ++i) {
    j[std::string(kFieldKeys[i])] = *slots[i];
  }
  return j;
}

std::string IdeaDocument::concatenated_text() const {
  std::string out;
  for (const std::string* slot : field_slots(*this)) {
    if (!out.empty()) out.push_back('\n');
    out += *slot;
  }
  return out;
}

IdeaParseOutcome validate_idea_json(std::string_view text) {
  IdeaParseOutcome outcome;

  std::optional<Json> doc;
  for (const FencedBlock& block : find_fenced_blocks(text)) {
    Json j = Json::parse(block.body, nullptr, false);
    bool labeled_json = to_lower(block.info).find("json") != std::string::npos;
    if (!j.is_discarded() && j.is_object()) {
      doc = std::move(j);
      break;
    }
    if (labeled_json) {
      outcome.errors.push_back("the fenced json block is not a valid JSON object");
      return outcome;
    }
  }
  if (!doc.has_value()) {
    outcome.errors.push_back("no fenced JSON block found");
    return outcome;
  }

  IdeaDocument idea;
  auto slots = field_slots(idea);
  for (std::size_t i = 0; i < IdeaDocument::kFieldKeys.size(); ++i) {
    std::string key(IdeaDocument::kFieldKeys[i]);
    if (!doc->contains(key)) {
      outcome.errors.push_back("missing key: " + key);
      continue;
    }
    const Json& value = (*doc)[key];
    if (!value.is_string() || trim(value.get<std::string>()).empty()) {
      outcome.errors.push_back("field " + key + " must be a non-empty string");
      continue;
    }
    *slots[i] = value.get<std::string>();
  }
  for (const auto& [key, value] : doc->items()) {
    bool known = std::any_of(IdeaDocument::kFieldKeys.begin(), IdeaDocument::kFieldKeys.end(),
                             [&](std::string_view k) { return k == key; });
    if (!known) outcome.errors.push_back("extra key: " + key);
  }
  if (outcome.errors.empty() && !valid_idea_name(idea.name)) {
    outcome.errors.push_back(
        "Name must contain only lowercase letters, digits, and underscores (no spaces)");
  }
  if (!outcome.errors.empty()) return outcome;

  for (const std::string* slot : field_slots(idea)) {
    for (std::string& href : grounding_hrefs(*slot)) {
      idea.groundings.push_back({std::move(href), std::string{}});
    }
  }
  outcome.idea = std::move(idea);
  return outcome;
}

void resolve_groundings(IdeaDocument& idea, const MotivGraph& graph) {
  for (Grounding& g : idea.groundings) {
    g.node_id.clear();
    std::string_view href = g.href;
    if (!starts_with(to_lower(href), "kg:")) continue;
    std::string_view rest = href.substr(3);
    std::size_t colon = rest.find(':');
    if (colon == std::string_view::npos) continue;
    auto kind = parse_node_kind(rest.substr(0, colon));
    if (!kind.has_value()) continue;
    std::string_view name = rest.substr(colon + 1);
    if (const MotivNode* node = graph.find_by_name(*kind, name)) g.node_id = node->id;
  }
}

std::string to_string(MentorAxis axis) {
  switch (axis) {
    case MentorAxis::Innovativeness: return "innovativeness";
    case MentorAxis::Rationality: return "rationality";
    case MentorAxis::Feasibility: return "feasibility";
  }
  return "innovativeness";
}

std::string to_string(MentorDecision decision) {
  switch (decision) {
    case MentorDecision::Continue: return "continue";
    case MentorDecision::Accept: return "accept";
    case MentorDecision::Reject: return "reject";
  }
  return "continue";
}

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Accept: return "accept";
    case Verdict::Reject: return "reject";
    case Verdict::RoundLimit: return "round_limit";
  }
  return "round_limit";
}

Json DialogueTranscript::to_json() const {
  Json j;
  j["topic"] = topic;
  j["seed"] = seed;
  j["verdict"] = verdict;
  j["accepted"] = accepted();
  j["rounds"] = Json::array();
  for (const RoundRecord& r : rounds) {
    j["rounds"].push_back({{"round", r.round},
                           {"axis", r.axis},
                           {"decision", r.decision},
                           {"question", r.question},
                           {"revision_after", r.revision_after}});
  }
  j["revisions"] = Json::array();
  for (const IdeaRevision& r : revisions) {
    Json rev;
    rev["revision"] = r.revision;
    rev["source_event"] = r.source_event;
    rev["idea"] = r.idea.wire_json();
    Json gr = Json::array();
    for (const Grounding& g : r.idea.groundings) {
      gr.push_back({{"href", g.href}, {"node_id", g.node_id}});
    }
    rev["groundings"] = gr;
    j["revisions"].push_back(std::move(rev));
  }
  j["events"] = Json::array();
  for (const TranscriptEvent& e : events) {
    j["events"].push_back(
        {{"origin", e.origin}, {"type", e.type}, {"round", e.round}, {"content", e.content}});
  }
  if (final_idea.has_value()) {
    j["final_idea"] = final_idea->wire_json();
    j["final_revision"] = final_idea->revision;
  } else {
    j["final_idea"] = nullptr;
  }
  return j;
}

std::vector<ChatMessage> trim_dialogue(std::vector<ChatMessage> messages, std::size_t budget_tokens) {
  auto total = [&]() {
    std::size_t sum = 0;
    for (const ChatMessage& m : messages) sum += estimate_tokens(m.text) + 4;
    return sum;
  };
  const std::string stub = "[earlier tool output elided]";
  // Protect the leading system/task block and the final message.
  std::size_t head = 0;
  while (head < messages.size() && messages[head].role != Role::Assistant) ++head;

  // Pass 1: elide tool observations, oldest first.
  for (std::size_t i = head; i + 1 < messages.size() && total() > budget_tokens; ++i) {
    if (messages[i].role == Role::User && starts_with(messages[i].text, "Observation:") &&
        messages[i].text != stub) {
      messages[i].text = stub;
    }
  }
  // Pass 2: drop the oldest exchange pairs.
  while (total() > budget_tokens && messages.size() > head + 1 && head + 2 < messages.size()) {
    messages.erase(messages.begin() + static_cast<long>(head),
                   messages.begin() + static_cast<long>(head) + 2);
  }
  return messages;
}

IdeationSession::IdeationSession(std::string topic, std::string previous_ideas,
                                 ChatEndpoint researcher, ChatEndpoint mentor,
                                 ToolDispatcher& tools, std::shared_ptr<const MotivGraph> graph,
                                 IdeatorOptions options, std::uint64_t seed)
    : topic_(std::move(topic)),
      previous_ideas_(std::move(previous_ideas)),
      researcher_(std::move(researcher)),
      mentor_(std::move(mentor)),
      tools_(tools),
      graph_(std::move(graph)),
      options_(options),
      seed_(seed) {
  transcript_.topic = topic_;
  transcript_.seed = seed_;
}

void IdeationSession::set_initial_idea(IdeaDocument idea) {
  idea.revision = 0;
  resolve_groundings(idea, *graph_);
  transcript_.events.push_back({"researcher", "idea", idea.wire_json().dump(), 0});
  transcript_.revisions.push_back({0, transcript_.events.size() - 1, idea});
  idea_ = std::move(idea);
}

IdeaDocument IdeationSession::researcher_loop(const std::string& tag, int round, bool is_revision) {
  if (options_.tool_call_budget < (is_revision ? 0 : 1)) {
    throw UsageError("the tool-call budget must allow at least one call during exploration");
  }
  int calls_used = 0;
  int reprompts = 0;
  const std::size_t trim_budget =
      researcher_.profile.context_budget > researcher_.profile.max_output
          ? researcher_.profile.context_budget - researcher_.profile.max_output
          : researcher_.profile.context_budget;

  while (true) {
    std::string reply =
        researcher_.complete(trim_dialogue(researcher_messages_, trim_budget), tag);
    transcript_.events.push_back({"researcher", "reply", reply, round});
    std::size_t reply_event = transcript_.events.size() - 1;

    std::optional<ToolCall> call;
    bool parse_failed = false;
    std::string parse_message;
    try {
      call = parse_tool_call(reply);
    } catch (const ParseError& e) {
      parse_failed = true;
      parse_message = e.what();
    }

    if (parse_failed) {
      if (++reprompts > options_.idea_reprompts) {
        throw ValidationError("researcher kept emitting unusable tool calls: " + parse_message);
      }
      transcript_.events.push_back({"system", "reprompt", parse_message, round});
      researcher_messages_.push_back({Role::Assistant, reply});
      researcher_messages_.push_back(
          {Role::User, "Your tool call could not be executed (" + parse_message +
                           "). Fix the call format, or output the final IDEA JSON."});
      continue;
    }

    if (call.has_value()) {
      if (calls_used >= options_.tool_call_budget) {
        throw ExplorationError("tool-call budget of " + std::to_string(options_.tool_call_budget) +
                               " exhausted before an idea was produced (" + tag + ")");
      }
      ToolResult result = tools_.dispatch(*call);
      ++calls_used;
      transcript_.events.push_back({"researcher", "tool_call", render_tool_call(*call), round});
      transcript_.events.push_back({"tool", "tool_result", result.rendered, round});
      researcher_messages_.push_back({Role::Assistant, reply});
      researcher_messages_.push_back({Role::User, "Observation:\n" + result.rendered});
      continue;
    }

    IdeaParseOutcome outcome = validate_idea_json(reply);
    if (outcome.idea.has_value()) {
      IdeaDocument idea = std::move(*outcome.idea);
      resolve_groundings(idea, *graph_);
      idea.revision = is_revision && idea_.has_value() ? idea_->revision + 1 : 0;
      researcher_messages_.push_back({Role::Assistant, reply});
      transcript_.revisions.push_back({idea.revision, reply_event, idea});
      idea_ = idea;
      return idea;
    }

    std::string joined;
    for (const std::string& e : outcome.errors) {
      if (!joined.empty()) joined += "; ";
      joined += e;
    }
    if (++reprompts > options_.idea_reprompts) {
      throw ValidationError("no valid IDEA JSON after " + std::to_string(options_.idea_reprompts) +
                            " re-prompt(s): " + joined);
    }
    transcript_.events.push_back({"system", "reprompt", joined, round});
    researcher_messages_.push_back({Role::Assistant, reply});
    researcher_messages_.push_back(
        {Role::User, "Your IDEA JSON is invalid: " + joined +
                         ". Output the complete IDEA JSON in the required fenced format with "
                         "exactly the eight required fields."});
  }
}

IdeaDocument IdeationSession::explore() {
  researcher_messages_.clear();
  researcher_messages_.push_back({Role::System, std::string(prompts::kResearcherSystem)});
  std::string task = prompts::fill(
      prompts::kResearcherTask,
      {{"TOOLS", std::string(prompts::kToolIntro)},
       {"TOPIC", topic_},
       {"PREVIOUS IDEAS", previous_ideas_.empty() ? std::string("(none)") : previous_ideas_}});
  researcher_messages_.push_back({Role::User, task});
  transcript_.events.push_back({"system", "prompt", task, 0});
  return researcher_loop("explore", 0, /*is_revision=*/false);
}

std::vector<ChatMessage> IdeationSession::mentor_messages(int round, bool forced) const {
  std::vector<ChatMessage> messages;
  std::string idea_json = idea_.has_value() ? idea_->wire_json().dump(2) : "(no idea)";
  messages.push_back({Role::System, prompts::fill(prompts::kMentorSystem,
                                                  {{"TIME", options_.current_time},
                                                   {"MAX_ROUND", std::to_string(options_.max_rounds)},
                                                   {"TOPIC", topic_},
                                                   {"IDEA", idea_json}})});
  for (const MentorExchange& ex : mentor_history_) {
    messages.push_back({Role::Assistant, ex.reply});
    messages.push_back({Role::User, "The student replied with this revised idea:\n" + ex.student_reply});
  }
  if (forced) {
    messages.push_back({Role::User, std::string(prompts::kForcedVerdict)});
  } else {
    messages.push_back({Role::User, "This is round " + std::to_string(round) + " of " +
                                        std::to_string(options_.max_rounds) +
                                        ". Question the idea, or give your final decision."});
  }
  const std::size_t trim_budget = mentor_.profile.context_budget > mentor_.profile.max_output
                                      ? mentor_.profile.context_budget - mentor_.profile.max_output
                                      : mentor_.profile.context_budget;
  return trim_dialogue(messages, trim_budget);
}

MentorTurn IdeationSession::parse_mentor_reply(const std::string& reply, int round) const {
  MentorTurn turn;
  turn.raw_reply = reply;
  bool has_accept = reply.find("<ACCEPT>") != std::string::npos;
  bool has_reject = reply.find("<REJECT>") != std::string::npos;
  if (has_accept && has_reject) {
    throw ParseError("ambiguous mentor verdict: reply contains both <ACCEPT> and <REJECT>");
  }
  if (has_accept) {
    turn.decision = MentorDecision::Accept;
    return turn;
  }
  if (has_reject) {
    turn.decision = MentorDecision::Reject;
    return turn;
  }
  turn.decision = MentorDecision::Continue;

  std::string lower = to_lower(reply);
  std::size_t q = lower.find("questions:");
  if (q == std::string::npos) q = lower.find("question:");
  if (q != std::string::npos) {
    std::size_t colon = reply.find(':', q);
    turn.question = trim(std::string_view(reply).substr(colon + 1));
  }
  if (turn.question.empty()) turn.question = trim(reply);

  // The axis the mentor announced; round-robin bookkeeping default when
  // the reply does not state one.
  std::size_t best = std::string::npos;
  MentorAxis axis = MentorAxis::Innovativeness;
  struct Probe {
    const char* token;
    MentorAxis value;
  };
  for (const Probe& p : {Probe{"innovat", MentorAxis::Innovativeness},
                         Probe{"rational", MentorAxis::Rationality},
                         Probe{"feasib", MentorAxis::Feasibility}}) {
    std::size_t pos = lower.find(p.token);
    if (pos != std::string::npos && pos < best) {
      best = pos;
      axis = p.value;
    }
  }
  if (best == std::string::npos) {
    static const MentorAxis round_robin[3] = {MentorAxis::Innovativeness, MentorAxis::Rationality,
                                              MentorAxis::Feasibility};
    axis = round_robin[(round - 1) % 3];
  }
  turn.axis = axis;
  return turn;
}

MentorTurn IdeationSession::mentor_turn(int round) {
  if (round > options_.max_rounds) throw UsageError("round exceeds max_rounds");
  std::string reply = mentor_.complete(mentor_messages(round, /*forced=*/false),
                                       "mentor:round" + std::to_string(round));
  transcript_.events.push_back({"mentor", "reply", reply, round});
  return parse_mentor_reply(reply, round);
}

IdeaDocument IdeationSession::researcher_revise(const std::string& question, int round) {
  researcher_messages_.push_back(
      {Role::User, prompts::fill(prompts::kReviseInstruction, {{"QUESTION", question}})});
  return researcher_loop("revise:round" + std::to_string(round), round, /*is_revision=*/true);
}

DialogueTranscript IdeationSession::deliberate() {
  if (!idea_.has_value()) throw UsageError("deliberate requires an initial idea");
  if (options_.max_rounds < 1) throw UsageError("max_rounds must be >= 1");

  std::optional<Verdict> verdict;
  for (int round = 1; round <= options_.max_rounds && !verdict.has_value(); ++round) {
    bool forced = round == options_.max_rounds;
    if (!forced) {
      MentorTurn turn = mentor_turn(round);
      if (turn.decision == MentorDecision::Accept) {
        verdict = Verdict::Accept;
        transcript_.rounds.push_back(
            {round, to_string(turn.axis), "accept", std::string{}, idea_->revision});
        break;
      }
      if (turn.decision == MentorDecision::Reject) {
        verdict = Verdict::Reject;
        transcript_.rounds.push_back(
            {round, to_string(turn.axis), "reject", std::string{}, idea_->revision});
        break;
      }
      IdeaDocument revised = researcher_revise(turn.question, round);
      mentor_history_.push_back({turn.raw_reply, revised.wire_json().dump(2)});
      transcript_.rounds.push_back(
          {round, to_string(turn.axis), "continue", turn.question, revised.revision});
    } else {
      // Forced-verdict turn at the round limit: one retry, then the
      // conservative outcome.
      MentorDecision decision = MentorDecision::Continue;
      for (int attempt = 0; attempt < 2 && decision == MentorDecision::Continue; ++attempt) {
        std::string reply = mentor_.complete(mentor_messages(round, /*forced=*/true),
                                             "mentor:verdict" + std::to_string(attempt));
        transcript_.events.push_back({"mentor", "reply", reply, round});
        MentorTurn turn = parse_mentor_reply(reply, round);
        decision = turn.decision;
      }
      switch (decision) {
        case MentorDecision::Accept: verdict = Verdict::Accept; break;
        case MentorDecision::Reject: verdict = Verdict::Reject; break;
        case MentorDecision::Continue: verdict = Verdict::RoundLimit; break;
      }
      transcript_.rounds.push_back({round, "verdict",
                                    verdict == Verdict::Accept ? "accept"
                                    : verdict == Verdict::Reject ? "reject"
                                                                 : "round_limit",
                                    std::string{}, idea_->revision});
    }
  }

  transcript_.verdict = to_string(verdict.value_or(Verdict::RoundLimit));
  transcript_.final_idea = idea_;
  return transcript_;
}

DialogueTranscript IdeationSession::run() {
  explore();
  return deliberate();
}

}  // namespace soiq
