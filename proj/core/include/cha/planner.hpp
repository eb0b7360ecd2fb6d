#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cha/error.hpp"
#include "cha/llm.hpp"
#include "cha/plan.hpp"
#include "cha/prompts.hpp"
#include "cha/task.hpp"

namespace cha {

struct PlannerContext {
  const TaskRegistry* registry = nullptr;
  std::vector<std::string> metadata;  // one descriptor per item
  std::string history;
  std::string previous_actions;  // format_previous_actions() text
  std::string question;          // English when translation is on
};

/// One prompt sent to the planner LLM and what came back.
struct PromptExchange {
  std::string stage;  // "stage1", "stage2", "repair", "react"
  std::string prompt;
  std::string response;
};

struct PlannerOutcome {
  enum class Kind { PlanProduced, Finished };

  Kind kind = Kind::Finished;
  plan::Plan plan;         // validated when PlanProduced
  std::string decision;    // PlanProduced
  std::string final_text;  // Finished
  std::string raw_stage1;
  std::optional<std::string> raw_stage2;
  std::vector<PromptExchange> exchanges;
};

/// Planning gave up. Carries the exchanges made so far for the trace.
class PlanningFailure : public Error {
 public:
  PlanningFailure(Errc code, const std::string& message, std::vector<PromptExchange> exchanges)
      : Error(code, message), exchanges_(std::move(exchanges)) {}

  const std::vector<PromptExchange>& exchanges() const noexcept { return exchanges_; }

 private:
  std::vector<PromptExchange> exchanges_;
};

inline constexpr std::string_view kDecisionMarker = "Decision:";
inline constexpr std::string_view kFinishMarker = "Final Answer:";

std::string build_stage1_prompt(const PlannerContext& ctx,
                                const PromptTemplates& templates = PromptTemplates::defaults());

// Text after the last "Decision:" marker, trimmed. Throws MissingDecisionMarker.
std::string extract_decision(std::string_view stage1_output);

// Text after a line starting with "Final Answer:", when that line comes
// after the last decision marker.
std::optional<std::string> extract_final_answer(std::string_view output);

std::string build_stage2_prompt(std::string_view decision, const PlannerContext& ctx,
                                const PromptTemplates& templates = PromptTemplates::defaults());

std::string build_react_prompt(const PlannerContext& ctx,
                               const PromptTemplates& templates = PromptTemplates::defaults());

class PlanningStrategy {
 public:
  virtual ~PlanningStrategy() = default;
  virtual std::string_view name() const noexcept = 0;

  /// Either a validated plan or a finish signal. LLM failures propagate
  /// as Error; unusable planner output ends in PlanningFailure.
  virtual PlannerOutcome plan_turn(const PlannerContext& ctx, llm::ChatBackend& backend,
                                   const llm::CompletionParams& params) const = 0;
};

/// Two-stage planner: strategies and a decision first, then plan code for
/// the decision. A stage-2 reply that does not parse or validate gets
/// `repair_budget` re-prompts carrying the error.
class TreeOfThoughtPlanner final : public PlanningStrategy {
 public:
  explicit TreeOfThoughtPlanner(PromptTemplates templates = PromptTemplates::defaults(),
                                int repair_budget = 1);

  std::string_view name() const noexcept override { return "tot"; }
  PlannerOutcome plan_turn(const PlannerContext& ctx, llm::ChatBackend& backend,
                           const llm::CompletionParams& params) const override;

 private:
  PromptTemplates templates_;
  int repair_budget_;
};

/// Thought / Action / Action Input loop. Each call yields a one-step plan
/// or the finish signal.
class ReActPlanner final : public PlanningStrategy {
 public:
  explicit ReActPlanner(PromptTemplates templates = PromptTemplates::defaults(),
                        int repair_budget = 1);

  std::string_view name() const noexcept override { return "react"; }
  PlannerOutcome plan_turn(const PlannerContext& ctx, llm::ChatBackend& backend,
                           const llm::CompletionParams& params) const override;

 private:
  PromptTemplates templates_;
  int repair_budget_;
};

struct ReactStep {
  std::optional<std::string> final_answer;
  std::string action;
  std::vector<std::string> inputs;
};

// Throws PlanError(SyntaxError) when the reply has neither an action nor a final answer.
ReactStep parse_react_reply(std::string_view reply);

std::unique_ptr<PlanningStrategy> make_strategy(std::string_view name,
                                                const PromptTemplates& templates);

}  // namespace cha
