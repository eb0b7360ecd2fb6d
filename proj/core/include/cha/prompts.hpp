#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace cha {

/// Named prompt templates with `{{placeholder}}` slots. Built-in defaults
/// can be overridden per deployment, one `<name>.txt` file per template.
class PromptTemplates {
 public:
  static constexpr std::string_view kStage1 = "planner_stage1";
  static constexpr std::string_view kStage2 = "planner_stage2";
  static constexpr std::string_view kRepair = "planner_repair";
  static constexpr std::string_view kReact = "planner_react";
  static constexpr std::string_view kThinker = "thinker";
  static constexpr std::string_view kThinkerDirective = "thinker_directive";

  static const PromptTemplates& defaults();

  // Copies defaults, then replaces any template with a matching file in `dir`.
  static PromptTemplates with_overrides(const std::filesystem::path& dir);

  const std::string& get(std::string_view name) const;
  void set(std::string name, std::string text);

 private:
  std::map<std::string, std::string, std::less<>> templates_;
};

/// Replaces each `{{key}}` with its value. Unknown placeholders are left as is.
std::string fill(std::string_view tmpl, const std::map<std::string, std::string, std::less<>>& values);

}  // namespace cha
