#pragma once

#include <chrono>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cha/datapipe.hpp"
#include "cha/plan.hpp"
#include "cha/planner.hpp"
#include "cha/task.hpp"
#include "cha/translation.hpp"

namespace cha {

/// A user-supplied file stored in the data pipe on upload.
struct MetadataItem {
  std::string kind;  // "image", "text", ...
  std::string reference;
  std::string caption;

  bool operator==(const MetadataItem&) const = default;
};

// "<kind>: <reference> (<caption>)" for the MetaData prompt section.
std::string describe_metadata(const MetadataItem& item);

/// One executed task call as it is shown to the planner, the response
/// generator and the trace panel. Outputs of data pipe tasks appear only
/// as their reference string.
struct ActionRecord {
  std::string task_name;
  std::string chat_name;
  std::vector<std::string> rendered_inputs;
  std::string rendered_output;
  std::size_t step_index = 0;
  std::chrono::microseconds duration{0};
  bool failed = false;

  bool operator==(const ActionRecord&) const = default;
};

Json to_json(const ActionRecord& record);
ActionRecord action_record_from_json(const Json& j);

struct StepFailure {
  std::size_t step_index = 0;
  Errc code = Errc::InvalidArgument;
  std::string message;
};

struct ExecutionOutcome {
  std::vector<ActionRecord> records;
  std::map<std::string, Json> bindings;
  std::optional<StepFailure> failure;

  bool completed() const noexcept { return !failure.has_value(); }
};

/// Runs a validated plan in order. Task errors, unknown keys and missing
/// fields stop the run and are reported in `failure`; they never escape.
ExecutionOutcome run_plan(const plan::Plan& plan, const TaskRegistry& registry, DataPipe& pipe);

// Dash-framed "<task>: [<inputs>]" / "<output>" blocks in order.
std::string format_previous_actions(std::span<const ActionRecord> records);

enum class LangMode { Retain, Translate };

LangMode parse_lang_mode(std::string_view text);
std::string_view to_string(LangMode mode) noexcept;

struct PreparedInput {
  std::string question;  // what the planner sees
  LanguageTag source_language;
  bool translated = false;
  std::vector<std::string> metadata;  // descriptors
};

/// Detects (or takes) the query language, translates it to English in
/// Translate mode and summarizes metadata. A failing translation client
/// degrades to Retain mode with a warning.
PreparedInput prepare_input(const std::string& raw_query, std::span<const MetadataItem> metadata,
                            LangMode mode, std::optional<LanguageTag> language,
                            const SupportedLanguages& supported, TranslationClient* client);

}  // namespace cha
