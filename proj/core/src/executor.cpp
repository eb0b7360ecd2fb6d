#include "cha/executor.hpp"

#include "cha/log.hpp"

namespace cha {

namespace {

constexpr std::string_view kRecordRule = "------------------";

// A bound value plus how it is shown in prompts.
struct Bound {
  Json value;
  std::string display;
};

std::string display_of(const Json& value) { return render_value(value); }

Json field_of(const Json& container, const std::string& variable, const std::string& key,
              const DataPipe& pipe) {
  const Json* source = &container;
  Json resolved;
  if (container.is_string() && is_datapipe_reference(container.get_ref<const std::string&>())) {
    resolved = pipe.retrieve(container.get_ref<const std::string&>());
    source = &resolved;
  }
  if (!source->is_object() || !source->contains(key)) {
    throw Error(Errc::FieldMissing, "'" + variable + "' has no field '" + key + "'");
  }
  return source->at(key);
}

Bound bind_argument(const plan::Argument& arg, const std::map<std::string, Bound>& bound,
                    const DataPipe& pipe) {
  return std::visit(
      [&](const auto& a) -> Bound {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, plan::StringLiteral>) {
          return {a.value, a.value};
        } else if constexpr (std::is_same_v<T, plan::VariableRef>) {
          return bound.at(a.name);
        } else {
          const Bound& src = bound.at(a.variable);
          Json value = field_of(src.value, a.variable, a.key, pipe);
          // Keep data pipe payloads symbolic in anything shown to an LLM.
          std::string display = src.value.is_string() && is_datapipe_reference(src.display)
                                    ? src.display + "['" + a.key + "']"
                                    : display_of(value);
          return {std::move(value), std::move(display)};
        }
      },
      arg);
}

}  // namespace

std::string describe_metadata(const MetadataItem& item) {
  std::string out = (item.kind.empty() ? "file" : item.kind) + ": " + item.reference;
  if (!item.caption.empty()) out += " (" + item.caption + ")";
  return out;
}

Json to_json(const ActionRecord& record) {
  return Json{{"task_name", record.task_name},
              {"chat_name", record.chat_name},
              {"rendered_inputs", record.rendered_inputs},
              {"rendered_output", record.rendered_output},
              {"step_index", record.step_index},
              {"duration_us", record.duration.count()},
              {"failed", record.failed}};
}

ActionRecord action_record_from_json(const Json& j) {
  ActionRecord r;
  r.task_name = j.at("task_name").get<std::string>();
  r.chat_name = j.value("chat_name", std::string{});
  r.rendered_inputs = j.value("rendered_inputs", std::vector<std::string>{});
  r.rendered_output = j.value("rendered_output", std::string{});
  r.step_index = j.value("step_index", std::size_t{0});
  r.duration = std::chrono::microseconds(j.value("duration_us", std::int64_t{0}));
  r.failed = j.value("failed", false);
  return r;
}

ExecutionOutcome run_plan(const plan::Plan& plan, const TaskRegistry& registry, DataPipe& pipe) {
  ExecutionOutcome outcome;
  std::map<std::string, Bound> bound;
  std::size_t call_index = 0;

  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const plan::Step& step = plan.steps[i];
    const auto* call = std::get_if<plan::TaskCall>(&step.action);
    ActionRecord record;
    const auto started = std::chrono::steady_clock::now();
    try {
      if (call) {
        const RegisteredTask& task = registry.lookup(call->task);
        record.task_name = task.spec.name;
        record.chat_name = task.spec.chat_name;
        record.step_index = call_index++;
        std::vector<Json> args;
        for (const auto& arg : call->args) {
          Bound b = bind_argument(arg, bound, pipe);
          record.rendered_inputs.push_back(b.display);
          args.push_back(std::move(b.value));
        }
        const std::vector<Json> resolved = pipe.resolve_arguments(args);
        TaskOutput out = task.body(resolved);
        if (task.spec.output_type) {
          std::string ref = pipe.store(std::move(out.payload), task.spec.name);
          record.rendered_output = ref;
          bound[step.binding] = {Json(ref), ref};
        } else {
          record.rendered_output = display_of(out.payload);
          bound[step.binding] = {out.payload, record.rendered_output};
        }
        record.duration = std::chrono::duration_cast<std::chrono::microseconds>(
            std::chrono::steady_clock::now() - started);
        outcome.records.push_back(std::move(record));
      } else if (const auto* fx = std::get_if<plan::FieldExtract>(&step.action)) {
        const Bound& src = bound.at(fx->source);
        Json value = field_of(src.value, fx->source, fx->key, pipe);
        std::string display = is_datapipe_reference(src.display) ? src.display + "['" + fx->key + "']"
                                                                  : display_of(value);
        bound[step.binding] = {std::move(value), std::move(display)};
      } else if (const auto* lit = std::get_if<plan::LiteralBind>(&step.action)) {
        bound[step.binding] = {Json(lit->value), lit->value};
      } else if (const auto* alias = std::get_if<plan::AliasBind>(&step.action)) {
        bound[step.binding] = bound.at(alias->source);
      }
    } catch (const std::exception& e) {
      const auto* err = dynamic_cast<const Error*>(&e);
      const Errc code = err ? err->code() : Errc::InvalidArgument;
      std::string message = e.what();
      if (dynamic_cast<const std::out_of_range*>(&e)) {
        // Validated plans never hit this; unvalidated ones might.
        message = "unbound variable in step " + std::to_string(i);
      }
      if (call) {
        record.failed = true;
        record.rendered_output = "FAILED: " + message;
        record.duration = std::chrono::duration_cast<std::chrono::microseconds>(
            std::chrono::steady_clock::now() - started);
        outcome.records.push_back(std::move(record));
      }
      outcome.failure = StepFailure{i, code, message};
      break;
    }
  }
  for (auto& [name, b] : bound) outcome.bindings.emplace(name, std::move(b.value));
  return outcome;
}

std::string format_previous_actions(std::span<const ActionRecord> records) {
  std::string out;
  for (const auto& r : records) {
    std::vector<Json> inputs(r.rendered_inputs.begin(), r.rendered_inputs.end());
    out += kRecordRule;
    out += "\n\n";
    out += r.task_name + ": " + render_value_quoted(Json(inputs)) + "\n\n";
    out += r.rendered_output;
    out += "\n\n";
    out += kRecordRule;
    out += "\n\n";
  }
  return out;
}

LangMode parse_lang_mode(std::string_view text) {
  if (text == "retain") return LangMode::Retain;
  if (text == "translate") return LangMode::Translate;
  throw Error(Errc::ConfigError, "lang_mode must be 'retain' or 'translate', got '" + std::string(text) + "'");
}

std::string_view to_string(LangMode mode) noexcept {
  return mode == LangMode::Retain ? "retain" : "translate";
}

PreparedInput prepare_input(const std::string& raw_query, std::span<const MetadataItem> metadata,
                            LangMode mode, std::optional<LanguageTag> language,
                            const SupportedLanguages& supported, TranslationClient* client) {
  if (trim(raw_query).empty()) throw Error(Errc::InvalidArgument, "query is empty");
  PreparedInput input;
  input.question = std::string(trim(raw_query));
  if (language) {
    supported.require(*language);
    input.source_language = *language;
  } else {
    input.source_language = detect_language(raw_query, supported);
  }
  if (mode == LangMode::Translate && input.source_language != LanguageTag::english()) {
    if (!client) {
      log::warn("no translation client configured; planning in the source language");
    } else {
      try {
        input.question =
            translate(input.question, input.source_language, LanguageTag::english(), *client, supported);
        input.translated = true;
      } catch (const Error& e) {
        log::warn(std::string("TranslationFailure: ") + e.what() + "; planning in the source language");
      }
    }
  }
  for (const auto& item : metadata) input.metadata.push_back(describe_metadata(item));
  return input;
}

}  // namespace cha
