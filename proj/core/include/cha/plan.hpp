#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cha/error.hpp"

namespace cha {

class TaskRegistry;

namespace plan {

struct StringLiteral {
  std::string value;
  bool operator==(const StringLiteral&) const = default;
};

struct VariableRef {
  std::string name;
  bool operator==(const VariableRef&) const = default;
};

struct FieldRef {
  std::string variable;
  std::string key;
  bool operator==(const FieldRef&) const = default;
};

using Argument = std::variant<StringLiteral, VariableRef, FieldRef>;

/// `x = self.execute_task('task', [args...])`
struct TaskCall {
  std::string task;
  std::vector<Argument> args;
  bool operator==(const TaskCall&) const = default;
};

/// `x = y['key']`
struct FieldExtract {
  std::string source;
  std::string key;
  bool operator==(const FieldExtract&) const = default;
};

/// `x = 'text'`
struct LiteralBind {
  std::string value;
  bool operator==(const LiteralBind&) const = default;
};

/// `x = y`
struct AliasBind {
  std::string source;
  bool operator==(const AliasBind&) const = default;
};

using Action = std::variant<TaskCall, FieldExtract, LiteralBind, AliasBind>;

struct Step {
  std::string binding;
  Action action;
  int line = 0;  // 1-based source line; not part of structural equality

  bool operator==(const Step& other) const {
    return binding == other.binding && action == other.action;
  }
};

struct Plan {
  std::vector<Step> steps;
  std::string source_text;
  bool validated = false;

  // Structural equality: steps only.
  bool operator==(const Plan& other) const { return steps == other.steps; }

  std::size_t task_call_count() const;
};

/// Positioned plan failure. `line`/`column` are 1-based; 0 when unknown.
/// `step` is the plan step index for validation failures.
class PlanError : public Error {
 public:
  PlanError(Errc code, const std::string& message, int line = 0, int column = 0,
            std::string expected = {}, std::ptrdiff_t step = -1);

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }
  const std::string& expected() const noexcept { return expected_; }
  std::ptrdiff_t step() const noexcept { return step_; }

 private:
  int line_;
  int column_;
  std::string expected_;
  std::ptrdiff_t step_;
};

inline constexpr std::string_view kDefaultFenceTag = "python";

/// Contents of the first fenced block tagged `tag`. Falls back to the first
/// untagged fence, then to the whole text trimmed when there is no fence.
/// Throws PlanError(EmptyBlock) if the chosen fence holds only whitespace
/// or comments.
std::string extract_code_block(std::string_view llm_output,
                               std::string_view tag = kDefaultFenceTag);

/// Parses the restricted plan notation. Never evaluates anything.
Plan parse_plan(std::string_view code);

/// Checks task names and arity against the registry and re-checks
/// definition order. Returns the plan marked validated.
Plan validate_plan(Plan plan, const TaskRegistry& registry);

/// Canonical text; parse_plan(render_canonical(p)) == p.
std::string render_canonical(const Plan& plan);

std::string render_step(const Step& step);

}  // namespace plan
}  // namespace cha
