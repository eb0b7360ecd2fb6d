#pragma once

#include <optional>
#include <span>
#include <string>

#include "cha/datapipe.hpp"
#include "cha/executor.hpp"
#include "cha/llm.hpp"
#include "cha/planner.hpp"
#include "cha/prompts.hpp"
#include "cha/session.hpp"
#include "cha/task.hpp"
#include "cha/translation.hpp"

namespace cha {

struct OrchestratorConfig {
  int max_iterations = 3;
  LangMode lang_mode = LangMode::Translate;
  llm::CompletionParams planner_params{"", 0.0, 2048};
  llm::CompletionParams responder_params{"", 0.7, 2048};
  std::string response_prefix;
};

struct TurnResult {
  std::string answer;
  TurnTrace trace;
};

inline constexpr std::string_view kBackendFailureAnswer =
    "I'm sorry, I could not complete your request because the language model service is "
    "unavailable right now. Please try again later.";

inline constexpr std::string_view kApologyDirective =
    "The planner could not complete the plan for this question. Apologize to the user and "
    "answer only with what the Thinker provides";

/// Matches follow-ups such as "Name the tasks used" that are answered from
/// recorded actions instead of the LLM.
bool is_explainability_query(std::string_view question);

/// Drives planner and executor until the planner finishes or the
/// iteration bound is hit, then asks the response generator for the final
/// answer. All collaborators are borrowed and must outlive the object.
class Orchestrator {
 public:
  Orchestrator(const TaskRegistry& registry, DataPipe& pipe, const PlanningStrategy& strategy,
               llm::ChatBackend& planner_llm, llm::ChatBackend& responder_llm,
               TranslationClient* translator, SupportedLanguages supported,
               OrchestratorConfig config, PromptTemplates templates = PromptTemplates::defaults());

  /// Runs one turn and appends it to the session history.
  TurnResult orchestrate_turn(Session& session, const std::string& raw_query,
                              std::span<const MetadataItem> metadata,
                              std::optional<LanguageTag> language = std::nullopt) const;

  const OrchestratorConfig& config() const noexcept { return config_; }

 private:
  std::string to_user_language(const std::string& english, const PreparedInput& input) const;

  const TaskRegistry& registry_;
  DataPipe& pipe_;
  const PlanningStrategy& strategy_;
  llm::ChatBackend& planner_llm_;
  llm::ChatBackend& responder_llm_;
  TranslationClient* translator_;
  SupportedLanguages supported_;
  OrchestratorConfig config_;
  PromptTemplates templates_;
};

}  // namespace cha
