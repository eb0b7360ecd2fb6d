#include "cha/orchestrator.hpp"

#include <array>

#include "cha/log.hpp"
#include "cha/response.hpp"

namespace cha {

namespace {

constexpr std::array<std::string_view, 8> kExplainPhrases = {
    "tasks used",          "tools used",          "tasks did you use", "tools did you use",
    "which tasks",         "which tools",         "what tasks",        "what tools"};

std::vector<std::string> chat_names(std::span<const ActionRecord> records) {
  std::vector<std::string> names;
  for (const auto& r : records) {
    if (!r.failed) names.push_back(r.chat_name.empty() ? r.task_name : r.chat_name);
  }
  return names;
}

std::string explain_previous_turn(const Session& session) {
  if (session.history.empty()) return "I have not answered any question in this conversation yet.";
  const auto& last = session.history.back();
  if (last.tasks_used.empty()) return "I did not use any tasks to answer your previous question.";
  return "To answer your previous question I used the following tasks, in this order: " +
         join(last.tasks_used, ", ") + ".";
}

}  // namespace

bool is_explainability_query(std::string_view question) {
  const std::string q = to_lower(question);
  for (auto phrase : kExplainPhrases) {
    if (q.find(phrase) != std::string::npos) return true;
  }
  return false;
}

Orchestrator::Orchestrator(const TaskRegistry& registry, DataPipe& pipe,
                           const PlanningStrategy& strategy, llm::ChatBackend& planner_llm,
                           llm::ChatBackend& responder_llm, TranslationClient* translator,
                           SupportedLanguages supported, OrchestratorConfig config,
                           PromptTemplates templates)
    : registry_(registry),
      pipe_(pipe),
      strategy_(strategy),
      planner_llm_(planner_llm),
      responder_llm_(responder_llm),
      translator_(translator),
      supported_(std::move(supported)),
      config_(std::move(config)),
      templates_(std::move(templates)) {
  if (config_.max_iterations < 1) throw Error(Errc::ConfigError, "max_iterations must be at least 1");
}

std::string Orchestrator::to_user_language(const std::string& english,
                                           const PreparedInput& input) const {
  if (config_.lang_mode != LangMode::Translate || input.source_language == LanguageTag::english() ||
      !translator_) {
    return english;
  }
  try {
    return sanitize_answer(
        translate(english, LanguageTag::english(), input.source_language, *translator_, supported_));
  } catch (const Error& e) {
    log::warn(std::string("TranslationFailure on the answer: ") + e.what());
    return english;
  }
}

TurnResult Orchestrator::orchestrate_turn(Session& session, const std::string& raw_query,
                                          std::span<const MetadataItem> metadata,
                                          std::optional<LanguageTag> language) const {
  for (const auto& item : metadata) {
    if (std::find(session.metadata_items.begin(), session.metadata_items.end(), item) ==
        session.metadata_items.end()) {
      session.metadata_items.push_back(item);
    }
  }
  const PreparedInput input = prepare_input(raw_query, session.metadata_items, config_.lang_mode,
                                            language, supported_, translator_);
  session.language = input.source_language;

  TurnTrace trace;
  trace.turn_id = session.next_turn_id();
  trace.query = raw_query;
  trace.question = input.question;
  trace.source_language = input.source_language.code();

  std::vector<ActionRecord> turn_records;
  std::string answer_en;
  bool planning_failed = false;

  auto finish_turn = [&](std::string answer_user) {
    trace.answer = sanitize_answer(answer_user);
    trace.tasks_used = chat_names(turn_records);
    ConversationTurn turn;
    turn.turn_id = trace.turn_id;
    turn.query = raw_query;
    turn.question = input.question;
    turn.answer = trace.answer;
    turn.answer_en = sanitize_answer(answer_en);
    turn.language = input.source_language.code();
    turn.tasks_used = trace.tasks_used;
    turn.trace = trace;
    session.history.push_back(std::move(turn));
    return TurnResult{trace.answer, trace};
  };

  if (is_explainability_query(input.question)) {
    answer_en = explain_previous_turn(session);
    trace.raw_answer = answer_en;
    trace.outcome = "explained";
    return finish_turn(to_user_language(answer_en, input));
  }

  const std::string history = render_history(session);
  trace.outcome = "iteration_limit";
  try {
    for (int iteration = 0; iteration < config_.max_iterations; ++iteration) {
      PlannerContext ctx{&registry_, input.metadata, history,
                         format_previous_actions(session.previous_actions), input.question};
      IterationTrace it;
      ++trace.planner_invocations;
      PlannerOutcome outcome;
      try {
        outcome = strategy_.plan_turn(ctx, planner_llm_, config_.planner_params);
      } catch (const PlanningFailure& e) {
        it.exchanges = e.exchanges();
        it.status = "planning_failed";
        it.error = e.what();
        trace.iterations.push_back(std::move(it));
        planning_failed = true;
        trace.outcome = "planning_failed";
        break;
      }
      it.exchanges = std::move(outcome.exchanges);
      if (outcome.kind == PlannerOutcome::Kind::Finished) {
        it.status = "finished";
        it.final_text = outcome.final_text;
        trace.iterations.push_back(std::move(it));
        trace.outcome = "answered";
        break;
      }
      it.decision = outcome.decision;
      it.plan_source = outcome.plan.source_text;
      it.plan_canonical = plan::render_canonical(outcome.plan);
      ExecutionOutcome exec = run_plan(outcome.plan, registry_, pipe_);
      if (exec.failure) {
        it.status = "failed_step";
        it.error = "step " + std::to_string(exec.failure->step_index) + ": " + exec.failure->message;
        // Non-task steps leave no record; surface the failure to the planner anyway.
        if (exec.records.empty() || !exec.records.back().failed) {
          ActionRecord note;
          note.task_name = "plan_step";
          note.rendered_inputs = {plan::render_step(outcome.plan.steps[exec.failure->step_index])};
          note.rendered_output = "FAILED: " + exec.failure->message;
          note.step_index = exec.records.size();
          note.failed = true;
          exec.records.push_back(std::move(note));
        }
      } else {
        it.status = "plan";
      }
      it.records = exec.records;
      session.previous_actions.insert(session.previous_actions.end(), exec.records.begin(),
                                      exec.records.end());
      turn_records.insert(turn_records.end(), exec.records.begin(), exec.records.end());
      trace.iterations.push_back(std::move(it));
    }

    ThinkerBundle bundle{join(input.metadata, "\n"), history,
                         format_previous_actions(turn_records), config_.response_prefix,
                         input.question};
    if (planning_failed) {
      bundle.prefix = config_.response_prefix.empty()
                          ? std::string(kApologyDirective)
                          : config_.response_prefix + " " + std::string(kApologyDirective);
    }
    trace.thinker_prompt = build_thinker_prompt(bundle, templates_);
    trace.raw_answer =
        llm::complete_prompt(responder_llm_, trace.thinker_prompt, config_.responder_params);
    answer_en = sanitize_answer(trace.raw_answer);
  } catch (const Error& e) {
    log::warn(std::string("BackendError: ") + e.what());
    trace.outcome = "backend_error: " + std::string(e.what());
    answer_en = std::string(kBackendFailureAnswer);
    return finish_turn(to_user_language(answer_en, input));
  }
  return finish_turn(to_user_language(answer_en, input));
}

}  // namespace cha
