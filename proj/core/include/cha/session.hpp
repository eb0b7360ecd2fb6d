#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cha/executor.hpp"
#include "cha/planner.hpp"
#include "cha/translation.hpp"

namespace cha {

/// One planner round inside a turn.
struct IterationTrace {
  std::vector<PromptExchange> exchanges;
  std::string status;  // "plan", "finished", "failed_step", "planning_failed"
  std::string decision;
  std::string final_text;
  std::string plan_source;
  std::string plan_canonical;
  std::vector<ActionRecord> records;
  std::string error;
};

/// Everything that happened while answering one query.
struct TurnTrace {
  std::size_t turn_id = 0;
  std::string query;
  std::string question;
  std::string source_language = "en";
  std::vector<IterationTrace> iterations;
  std::string thinker_prompt;
  std::string raw_answer;
  std::string answer;
  std::vector<std::string> tasks_used;  // chat names in execution order
  std::size_t planner_invocations = 0;
  std::string outcome;  // "answered", "iteration_limit", "explained", "planning_failed", "backend_error"

  // Every prompt sent to an LLM during the turn, in order.
  std::vector<std::string> all_prompts() const;
};

Json to_json(const IterationTrace& trace);
Json to_json(const TurnTrace& trace);
TurnTrace turn_trace_from_json(const Json& j);

struct ConversationTurn {
  std::size_t turn_id = 0;
  std::string query;      // as the user wrote it
  std::string question;   // English form used internally
  std::string answer;     // as returned to the user
  std::string answer_en;  // English form used in prompts
  std::string language = "en";
  std::vector<std::string> tasks_used;
  TurnTrace trace;
};

Json to_json(const ConversationTurn& turn);
ConversationTurn conversation_turn_from_json(const Json& j);

struct Session {
  std::string session_id;
  LanguageTag language;
  std::vector<ConversationTurn> history;
  std::vector<ActionRecord> previous_actions;
  std::vector<MetadataItem> metadata_items;

  std::size_t next_turn_id() const { return history.empty() ? 1 : history.back().turn_id + 1; }
};

Json to_json(const Session& session);
Session session_from_json(const Json& j);

// "USER: ..." / "CHA: ..." lines for every past turn, English side.
std::string render_history(const Session& session);

// Stable hash of the serialized history; equal across save/load.
std::string history_hash(const Session& session);

}  // namespace cha
