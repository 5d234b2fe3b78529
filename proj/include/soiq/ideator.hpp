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

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "soiq/gateway.hpp"
#include "soiq/graph.hpp"
#include "soiq/tools.hpp"

namespace soiq {

// One <a href="kg:<kind>:<name>"> annotation found in idea text, with the
// graph node it resolves to (empty node_id = unresolved).
struct Grounding {
  std::string href;
  std::string node_id;

  friend bool operator==(const Grounding&, const Grounding&) = default;
};

// The eight-field idea record. Field order follows the wire schema.
struct IdeaDocument {
  std::string name;  // lowercase letters/digits/underscores only
  std::string title;
  std::string motivation;
  std::string related_work;
  std::string abstract_text;
  std::string method;
  std::string experiments_plan;
  std::string risks_limitations;
  std::vector<Grounding> groundings;
  int revision = 0;

  static const std::array<std::string_view, 8> kFieldKeys;

  nlohmann::ordered_json wire_json() const;  // exactly the eight keys
  // All eight field values joined with newlines in schema order; the text
  // the diversity metric embeds.
  std::string concatenated_text() const;
};

struct IdeaParseOutcome {
  std::optional<IdeaDocument> idea;
  std::vector<std::string> errors;  // non-empty iff idea is absent
};

// Extracts the first fenced JSON block and checks it against the idea
// schema: exactly the eight keys, non-empty string values, and the Name
// format (lowercase, no spaces, underscores allowed). Extra keys are
// rejected. Grounding hrefs are collected from every field, unresolved.
IdeaParseOutcome validate_idea_json(std::string_view text);

// Matches each kg:<kind>:<name> href against the graph by kind and
// normalized name. Idea text is never modified.
void resolve_groundings(IdeaDocument& idea, const MotivGraph& graph);

enum class MentorAxis { Innovativeness, Rationality, Feasibility };
enum class MentorDecision { Continue, Accept, Reject };
enum class Verdict { Accept, Reject, RoundLimit };

std::string to_string(MentorAxis axis);
std::string to_string(MentorDecision decision);
std::string to_string(Verdict verdict);

struct MentorTurn {
  MentorAxis axis = MentorAxis::Innovativeness;
  MentorDecision decision = MentorDecision::Continue;
  std::string question;
  std::string raw_reply;
};

struct TranscriptEvent {
  std::string origin;  // "system" | "researcher" | "mentor" | "tool"
  std::string type;    // "prompt" | "reply" | "tool_call" | "tool_result" | "idea" | "reprompt"
  std::string content;
  int round = 0;  // 0 = exploration phase
};

struct RoundRecord {
  int round = 0;
  std::string axis;
  std::string decision;
  std::string question;
  int revision_after = 0;
};

struct IdeaRevision {
  int revision = 0;
  std::size_t source_event = 0;  // index of the researcher reply that carried it
  IdeaDocument idea;
};

struct DialogueTranscript {
  std::string topic;
  std::uint64_t seed = 0;
  std::vector<TranscriptEvent> events;
  std::vector<RoundRecord> rounds;
  std::vector<IdeaRevision> revisions;
  std::string verdict;  // "accept" | "reject" | "round_limit"; empty while running
  std::optional<IdeaDocument> final_idea;

  bool accepted() const { return verdict == "accept"; }
  nlohmann::ordered_json to_json() const;
};

struct IdeatorOptions {
  int max_rounds = 5;
  int tool_call_budget = 12;
  int idea_reprompts = 2;
  std::string current_time = "1970-01-01T00:00:00Z";
};

// Deterministic context trimming: replace the oldest tool observations
// with an elision stub first, then drop the oldest exchange pairs. The
// leading system/task messages and the final message always survive.
std::vector<ChatMessage> trim_dialogue(std::vector<ChatMessage> messages,
                                       std::size_t budget_tokens);

// One topic x idea session: the exploration task loop producing revision
// 0, then the mentor/researcher deliberation recurrence. The mentor never
// contributes idea text by construction: only researcher replies are ever
// parsed into IdeaDocuments, and every revision records its source event.
class IdeationSession {
 public:
  IdeationSession(std::string topic, std::string previous_ideas, ChatEndpoint researcher,
                  ChatEndpoint mentor, ToolDispatcher& tools,
                  std::shared_ptr<const MotivGraph> graph, IdeatorOptions options,
                  std::uint64_t seed);

  // Task 1-3 loop until the researcher emits a valid IDEA JSON (revision 0).
  IdeaDocument explore();

  // One mentor question/verdict turn against the current idea.
  MentorTurn mentor_turn(int round);

  // Researcher answers a question: optional tool calls, then a full
  // revised IDEA JSON (revision incremented whether or not the text
  // changed). On persistent invalid output the current idea is kept.
  IdeaDocument researcher_revise(const std::string& question, int round);

  // The deliberation recurrence; requires an initial idea. Round
  // max_rounds is the forced-verdict turn: the mentor must emit a marker,
  // one retry allowed, otherwise the verdict is round_limit (not
  // accepted).
  DialogueTranscript deliberate();

  // explore() + deliberate().
  DialogueTranscript run();

  // Starts deliberation from an existing idea without an exploration phase.
  void set_initial_idea(IdeaDocument idea);

  const DialogueTranscript& transcript() const { return transcript_; }
  const std::optional<IdeaDocument>& current_idea() const { return idea_; }

 private:
  IdeaDocument researcher_loop(const std::string& tag, int round, bool is_revision);
  std::vector<ChatMessage> mentor_messages(int round, bool forced) const;
  MentorTurn parse_mentor_reply(const std::string& reply, int round) const;

  std::string topic_;
  std::string previous_ideas_;
  ChatEndpoint researcher_;
  ChatEndpoint mentor_;
  ToolDispatcher& tools_;
  std::shared_ptr<const MotivGraph> graph_;
  IdeatorOptions options_;
  std::uint64_t seed_;

  std::vector<ChatMessage> researcher_messages_;
  struct MentorExchange {
    std::string reply;          // mentor raw reply
    std::string student_reply;  // revised idea wire JSON
  };
  std::vector<MentorExchange> mentor_history_;
  std::optional<IdeaDocument> idea_;
  DialogueTranscript transcript_;
};

}  // namespace soiq
