#include "cha/planner.hpp"

namespace cha {

namespace {

using Values = std::map<std::string, std::string, std::less<>>;

std::string tool_blocks(const TaskRegistry& registry, bool full) {
  std::vector<std::string> blocks;
  for (const auto& task : registry) {
    blocks.push_back(full ? render_task_full(task.spec) : render_task_brief(task.spec));
  }
  return join(blocks, "\n");
}

Values context_values(const PlannerContext& ctx) {
  return {{"metadata", join(ctx.metadata, "\n")},
          {"history", ctx.history},
          {"previous_actions", ctx.previous_actions},
          {"question", ctx.question}};
}

const TaskRegistry& registry_of(const PlannerContext& ctx) {
  if (!ctx.registry) throw Error(Errc::InvalidArgument, "planner context has no task registry");
  return *ctx.registry;
}

// Offset of the last line whose first non-blank text is `marker`.
std::optional<std::size_t> last_line_starting_with(std::string_view text, std::string_view marker) {
  std::optional<std::size_t> found;
  std::size_t line_start = 0;
  while (line_start <= text.size()) {
    auto line_end = text.find('\n', line_start);
    if (line_end == std::string_view::npos) line_end = text.size();
    auto first = text.find_first_not_of(" \t*", line_start);
    if (first != std::string_view::npos && first < line_end &&
        text.substr(first, marker.size()) == marker) {
      found = first;
    }
    line_start = line_end + 1;
  }
  return found;
}

std::string strip_quotes(std::string_view s) {
  s = trim(s);
  while (s.size() >= 2 && (s.front() == '`' || s.front() == '"' || s.front() == '\'') &&
         s.back() == s.front()) {
    s = trim(s.substr(1, s.size() - 2));
  }
  return std::string(s);
}

plan::Plan react_plan(const ReactStep& step) {
  plan::TaskCall call{step.action, {}};
  for (const auto& input : step.inputs) call.args.emplace_back(plan::StringLiteral{input});
  plan::Plan p;
  p.steps.push_back(plan::Step{"action_result", std::move(call), 1});
  p.source_text = plan::render_canonical(p);
  return p;
}

}  // namespace

std::string build_stage1_prompt(const PlannerContext& ctx, const PromptTemplates& templates) {
  Values values = context_values(ctx);
  values["tools"] = tool_blocks(registry_of(ctx), false);
  return fill(templates.get(PromptTemplates::kStage1), values);
}

std::string extract_decision(std::string_view stage1_output) {
  const auto pos = stage1_output.rfind(kDecisionMarker);
  if (pos == std::string_view::npos) {
    throw Error(Errc::MissingDecisionMarker, "planner output has no 'Decision:' marker");
  }
  const auto decision = trim(stage1_output.substr(pos + kDecisionMarker.size()));
  if (decision.empty()) {
    throw Error(Errc::MissingDecisionMarker, "planner output has an empty decision");
  }
  return std::string(decision);
}

std::optional<std::string> extract_final_answer(std::string_view output) {
  const auto finish = last_line_starting_with(output, kFinishMarker);
  if (!finish) return std::nullopt;
  const auto decision = output.rfind(kDecisionMarker);
  if (decision != std::string_view::npos && decision > *finish) return std::nullopt;
  return std::string(trim(output.substr(*finish + kFinishMarker.size())));
}

std::string build_stage2_prompt(std::string_view decision, const PlannerContext& ctx,
                                const PromptTemplates& templates) {
  Values values = context_values(ctx);
  values["decision"] = std::string(decision);
  values["tools"] = tool_blocks(registry_of(ctx), true);
  return fill(templates.get(PromptTemplates::kStage2), values);
}

std::string build_react_prompt(const PlannerContext& ctx, const PromptTemplates& templates) {
  const auto& registry = registry_of(ctx);
  Values values = context_values(ctx);
  values["tools"] = tool_blocks(registry, true);
  std::vector<std::string> names;
  for (const auto& task : registry) names.push_back(task.spec.name);
  values["tool_names"] = join(names, ", ");
  return fill(templates.get(PromptTemplates::kReact), values);
}

TreeOfThoughtPlanner::TreeOfThoughtPlanner(PromptTemplates templates, int repair_budget)
    : templates_(std::move(templates)), repair_budget_(std::max(0, repair_budget)) {}

PlannerOutcome TreeOfThoughtPlanner::plan_turn(const PlannerContext& ctx, llm::ChatBackend& backend,
                                               const llm::CompletionParams& params) const {
  if (trim(ctx.question).empty()) throw Error(Errc::InvalidArgument, "empty question");
  const auto& registry = registry_of(ctx);
  PlannerOutcome outcome;

  const std::string stage1_prompt = build_stage1_prompt(ctx, templates_);
  outcome.raw_stage1 = llm::complete_prompt(backend, stage1_prompt, params);
  outcome.exchanges.push_back({"stage1", stage1_prompt, outcome.raw_stage1});

  if (auto final_text = extract_final_answer(outcome.raw_stage1)) {
    outcome.kind = PlannerOutcome::Kind::Finished;
    outcome.final_text = std::move(*final_text);
    return outcome;
  }
  try {
    outcome.decision = extract_decision(outcome.raw_stage1);
  } catch (const Error& e) {
    throw PlanningFailure(e.code(), e.what(), outcome.exchanges);
  }

  const std::string stage2_prompt = build_stage2_prompt(outcome.decision, ctx, templates_);
  std::string prompt = stage2_prompt;
  std::string stage = "stage2";
  for (int attempt = 0;; ++attempt) {
    const std::string reply = llm::complete_prompt(backend, prompt, params);
    outcome.raw_stage2 = reply;
    outcome.exchanges.push_back({stage, prompt, reply});
    std::string code;
    try {
      code = plan::extract_code_block(reply);
      plan::Plan parsed = plan::validate_plan(plan::parse_plan(code), registry);
      if (parsed.steps.empty()) throw plan::PlanError(Errc::NoTaskCall, "the plan is empty");
      outcome.kind = PlannerOutcome::Kind::PlanProduced;
      outcome.plan = std::move(parsed);
      return outcome;
    } catch (const plan::PlanError& e) {
      if (attempt >= repair_budget_) {
        throw PlanningFailure(Errc::PlanParseFailed,
                              "plan code unusable after " + std::to_string(attempt + 1) +
                                  " attempt(s): " + e.what(),
                              outcome.exchanges);
      }
      prompt = fill(templates_.get(PromptTemplates::kRepair),
                    {{"stage2_prompt", stage2_prompt},
                     {"code", code.empty() ? std::string(trim(reply)) : code},
                     {"error", e.what()}});
      stage = "repair";
    }
  }
}

ReactStep parse_react_reply(std::string_view reply) {
  ReactStep step;
  if (auto final_text = extract_final_answer(reply)) {
    step.final_answer = std::move(final_text);
    return step;
  }
  const auto action_pos = last_line_starting_with(reply, "Action:");
  if (!action_pos) {
    throw plan::PlanError(Errc::SyntaxError, "reply has neither an 'Action:' nor a 'Final Answer:' line",
                          0, 0, "Action:");
  }
  const auto after_action = reply.substr(*action_pos + 7);
  const auto action_end = after_action.find('\n');
  step.action = strip_quotes(after_action.substr(0, action_end));

  const auto input_pos = last_line_starting_with(reply, "Action Input:");
  if (!input_pos || *input_pos < *action_pos) return step;
  auto input = reply.substr(*input_pos + 13);
  if (const auto obs = input.find("\nObservation:"); obs != std::string_view::npos) {
    input = input.substr(0, obs);
  }
  input = trim(input);
  if (input.empty()) return step;
  if (input.front() == '[') {
    Json parsed;
    try {
      parsed = Json::parse(input);
    } catch (const Json::parse_error&) {
      throw plan::PlanError(Errc::SyntaxError,
                            "Action Input is not a JSON list: " + std::string(input), 0, 0,
                            "JSON list of strings");
    }
    for (const auto& v : parsed) step.inputs.push_back(v.is_string() ? v.get<std::string>() : v.dump());
  } else {
    step.inputs.push_back(strip_quotes(input));
  }
  return step;
}

ReActPlanner::ReActPlanner(PromptTemplates templates, int repair_budget)
    : templates_(std::move(templates)), repair_budget_(std::max(0, repair_budget)) {}

PlannerOutcome ReActPlanner::plan_turn(const PlannerContext& ctx, llm::ChatBackend& backend,
                                       const llm::CompletionParams& params) const {
  if (trim(ctx.question).empty()) throw Error(Errc::InvalidArgument, "empty question");
  const auto& registry = registry_of(ctx);
  PlannerOutcome outcome;
  const std::string base_prompt = build_react_prompt(ctx, templates_);
  std::string prompt = base_prompt;
  for (int attempt = 0;; ++attempt) {
    const std::string reply = llm::complete_prompt(backend, prompt, params);
    outcome.exchanges.push_back({"react", prompt, reply});
    if (attempt == 0) outcome.raw_stage1 = reply;
    try {
      ReactStep step = parse_react_reply(reply);
      if (step.final_answer) {
        outcome.kind = PlannerOutcome::Kind::Finished;
        outcome.final_text = std::move(*step.final_answer);
        return outcome;
      }
      outcome.plan = plan::validate_plan(react_plan(step), registry);
      outcome.kind = PlannerOutcome::Kind::PlanProduced;
      outcome.decision = std::string(trim(reply));
      return outcome;
    } catch (const plan::PlanError& e) {
      if (attempt >= repair_budget_) {
        throw PlanningFailure(Errc::PlanParseFailed,
                              "ReAct reply unusable after " + std::to_string(attempt + 1) +
                                  " attempt(s): " + e.what(),
                              outcome.exchanges);
      }
      prompt = base_prompt + "\n\nYour previous reply could not be used.\nError: " + e.what() +
               "\nReply again following the format exactly.";
    }
  }
}

std::unique_ptr<PlanningStrategy> make_strategy(std::string_view name, const PromptTemplates& templates) {
  if (name == "tot") return std::make_unique<TreeOfThoughtPlanner>(templates);
  if (name == "react") return std::make_unique<ReActPlanner>(templates);
  throw Error(Errc::ConfigError, "unknown planner strategy '" + std::string(name) + "'");
}

}  // namespace cha
