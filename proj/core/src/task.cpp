#include "cha/task.hpp"

#include <fstream>
#include <regex>
#include <sstream>

#include "cha/error.hpp"

namespace cha {

namespace {

bool valid_name(std::string_view name) {
  static const std::regex pattern("[a-z][a-z0-9_]*");
  return std::regex_match(name.begin(), name.end(), pattern);
}

void check_list(const std::vector<std::string>& items, std::string_view what,
                const std::string& task) {
  if (items.empty()) {
    throw Error(Errc::InvalidSpec, "task '" + task + "': " + std::string(what) + " is empty");
  }
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (trim(items[i]).empty()) {
      throw Error(Errc::InvalidSpec, "task '" + task + "': " + std::string(what) + "[" +
                                         std::to_string(i) + "] is blank");
    }
  }
}

std::string dependency_line(const TaskSpec& spec) {
  if (spec.dependencies.empty()) return {};
  return "This tool depends on the following tools: " + join(spec.dependencies, ", ") + "\n";
}

}  // namespace

void check_spec(const TaskSpec& spec) {
  if (!valid_name(spec.name)) {
    throw Error(Errc::InvalidSpec, "task name '" + spec.name + "' must match [a-z][a-z0-9_]*");
  }
  check_list(spec.inputs, "inputs", spec.name);
  check_list(spec.outputs, "outputs", spec.name);
  for (const auto& dep : spec.dependencies) {
    if (!valid_name(dep)) {
      throw Error(Errc::InvalidSpec,
                  "task '" + spec.name + "': dependency '" + dep + "' is not a task name");
    }
  }
}

Json to_json(const TaskSpec& spec) {
  return Json{{"name", spec.name},
              {"chat_name", spec.chat_name},
              {"description", spec.description},
              {"dependencies", spec.dependencies},
              {"inputs", spec.inputs},
              {"outputs", spec.outputs},
              {"output_type", spec.output_type}};
}

TaskSpec spec_from_json(const Json& j) {
  try {
    TaskSpec spec;
    spec.name = j.at("name").get<std::string>();
    spec.chat_name = j.value("chat_name", std::string{});
    spec.description = j.value("description", std::string{});
    spec.dependencies = j.value("dependencies", std::vector<std::string>{});
    spec.inputs = j.at("inputs").get<std::vector<std::string>>();
    spec.outputs = j.at("outputs").get<std::vector<std::string>>();
    spec.output_type = j.value("output_type", false);
    return spec;
  } catch (const Json::exception& e) {
    throw Error(Errc::InvalidSpec, std::string("malformed task record: ") + e.what());
  }
}

TaskRegistry::Handle TaskRegistry::register_task(TaskSpec spec, TaskBody body) {
  check_spec(spec);
  if (!body) throw Error(Errc::InvalidSpec, "task '" + spec.name + "' has no body");
  if (index_.contains(spec.name)) throw Error(Errc::DuplicateName, spec.name);
  const Handle handle = tasks_.size();
  index_.emplace(spec.name, handle);
  tasks_.push_back(RegisteredTask{std::move(spec), std::move(body)});
  return handle;
}

const RegisteredTask* TaskRegistry::find(std::string_view name) const noexcept {
  const auto it = index_.find(std::string(name));
  return it == index_.end() ? nullptr : &tasks_[it->second];
}

const RegisteredTask& TaskRegistry::lookup(std::string_view name) const {
  if (const auto* task = find(name)) return *task;
  throw Error(Errc::UnknownTask, std::string(name));
}

void TaskRegistry::check_dependencies() const {
  for (const auto& task : tasks_) {
    for (const auto& dep : task.spec.dependencies) {
      if (!contains(dep)) {
        throw Error(Errc::InvalidSpec,
                    "task '" + task.spec.name + "' depends on unregistered task '" + dep + "'");
      }
    }
  }
}

std::string render_task_brief(const TaskSpec& spec) {
  std::string out = "**" + spec.name + "**: " + spec.description + "\n";
  out += dependency_line(spec);
  out += "This tool have the following outputs:\n\n";
  out += join(spec.outputs, "\n");
  out += "\n\n";
  out += kTaskRule;
  out += "\n";
  return out;
}

std::string render_task_full(const TaskSpec& spec) {
  std::string out = "**" + spec.name + "**: " + spec.description + "\n";
  out += dependency_line(spec);
  out += "\n  The input to this tool should be a list of data representing:\n  \n";
  for (std::size_t i = 0; i < spec.inputs.size(); ++i) {
    if (i) out += "\n\n";
    out += "   " + std::to_string(i + 1) + "-" + spec.inputs[i];
  }
  out += "\n\n   This tool will return the following data:\n   \n";
  for (std::size_t i = 0; i < spec.outputs.size(); ++i) {
    if (i) out += "\n\n";
    out += "- " + spec.outputs[i];
  }
  if (spec.output_type) out += "\n\n The result will be stored in the Data Pipe.";
  out += "\n\n";
  out += kTaskRule;
  out += "\n";
  return out;
}

void load_task_manifest(const std::filesystem::path& path,
                        const std::map<std::string, TaskBody, std::less<>>& bodies,
                        TaskRegistry& registry) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ConfigError, "cannot open task manifest " + path.string());
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(Errc::ConfigError, "task manifest " + path.string() + ": " + e.what());
  }
  const Json& records = doc.is_object() ? doc.at("tasks") : doc;
  if (!records.is_array()) throw Error(Errc::ConfigError, "task manifest must be a list");
  for (const auto& record : records) {
    TaskSpec spec = spec_from_json(record);
    const std::string body_name = record.value("body", spec.name);
    const auto it = bodies.find(body_name);
    if (it == bodies.end()) {
      throw Error(Errc::ConfigError,
                  "task '" + spec.name + "' binds to unknown body '" + body_name + "'");
    }
    registry.register_task(std::move(spec), it->second);
  }
}

}  // namespace cha
