#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cha/text.hpp"

namespace cha {

/// Metadata the planner sees for one task. `name` is the join key between
/// prompts, plan code and execution; `chat_name` is for display only.
struct TaskSpec {
  std::string name;
  std::string chat_name;
  std::string description;
  std::vector<std::string> dependencies;  // rendered for the planner, never enforced
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  bool output_type = false;  // true: result goes to the data pipe

  bool operator==(const TaskSpec&) const = default;
};

struct TaskOutput {
  Json payload;
  std::vector<std::string> produced_metadata;  // data pipe references
};

/// Arguments arrive already resolved: plain strings stay JSON strings,
/// data pipe references are replaced by the stored payload.
using TaskBody = std::function<TaskOutput(std::span<const Json> args)>;

struct RegisteredTask {
  TaskSpec spec;
  TaskBody body;
};

// Throws Error(InvalidSpec) naming the first violated invariant.
void check_spec(const TaskSpec& spec);

Json to_json(const TaskSpec& spec);
TaskSpec spec_from_json(const Json& j);

/// Ordered registry. Iteration follows registration order so rendered
/// prompts are reproducible. Written once at startup, then read-only.
class TaskRegistry {
 public:
  using Handle = std::size_t;

  Handle register_task(TaskSpec spec, TaskBody body);

  const RegisteredTask& lookup(std::string_view name) const;
  const RegisteredTask* find(std::string_view name) const noexcept;
  bool contains(std::string_view name) const noexcept { return find(name) != nullptr; }

  // Every dependency must name a registered task.
  void check_dependencies() const;

  std::size_t size() const noexcept { return tasks_.size(); }
  auto begin() const noexcept { return tasks_.begin(); }
  auto end() const noexcept { return tasks_.end(); }

 private:
  std::vector<RegisteredTask> tasks_;
  std::unordered_map<std::string, std::size_t> index_;
};

inline constexpr std::string_view kTaskRule = "-----------------------------------";

// Stage-1 planner block: name, description, outputs.
std::string render_task_brief(const TaskSpec& spec);

// Stage-2 planner block: adds numbered inputs and the data pipe note.
std::string render_task_full(const TaskSpec& spec);

/// Loads task records from a JSON manifest and binds each to a body from
/// `bodies` by name. Records are registered in file order.
void load_task_manifest(const std::filesystem::path& path,
                        const std::map<std::string, TaskBody, std::less<>>& bodies,
                        TaskRegistry& registry);

}  // namespace cha
