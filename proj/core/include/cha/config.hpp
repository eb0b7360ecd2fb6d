#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cha/executor.hpp"
#include "cha/health/web.hpp"
#include "cha/llm.hpp"

namespace cha {

struct BackendConfig {
  std::string kind = "scripted";  // scripted | remote
  std::filesystem::path fixture;  // scripted
  llm::RemoteConfig remote;       // remote
};

struct EngineConfig {
  std::string strategy = "tot";  // tot | react
  int max_iterations = 3;
  int repair_budget = 1;
  LangMode lang_mode = LangMode::Translate;
  std::vector<std::string> enabled_tasks;  // empty: every built-in task
  std::filesystem::path task_manifest;     // optional; replaces the built-in specs

  llm::CompletionParams planner_params{"", 0.0, 2048};
  llm::CompletionParams responder_params{"", 0.7, 2048};
  BackendConfig planner_backend;
  // Unset: the responder shares the planner backend instance.
  std::optional<BackendConfig> responder_backend;
  std::string response_prefix;
  std::filesystem::path prompts_dir;  // optional template overrides

  std::vector<std::string> languages{"en", "es"};
  std::string translator = "stub";  // stub | remote | none
  std::filesystem::path translation_dictionary;
  std::string translation_endpoint;
  std::string translation_api_key;

  std::filesystem::path data_dir;
  std::string search = "stub";  // stub | remote
  std::filesystem::path search_map;
  health::RemoteSearchConfig remote_search;
  std::string fetcher = "fixture";  // fixture | remote
  std::filesystem::path www_dir;
  std::size_t text_budget = health::kDefaultTextBudget;

  std::filesystem::path persistence_dir;  // empty: in memory only
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string auth_token;  // empty: no auth
};

/// Parses the JSON config document. Relative paths resolve against
/// `base_dir`. Throws ConfigError on malformed fields; semantic checks
/// happen in check_config.
EngineConfig engine_config_from_json(const Json& doc, const std::filesystem::path& base_dir);

/// Reads a config file, then applies environment overrides:
/// CHA_LLM_API_KEY, CHA_LLM_BASE_URL, CHA_SEARCH_API_KEY, CHA_SEARCH_ENGINE_ID,
/// CHA_TRANSLATE_API_KEY, CHA_AUTH_TOKEN.
EngineConfig load_engine_config(const std::filesystem::path& path);
void apply_env_overrides(EngineConfig& config);

// Static checks that need no I/O. Throws ConfigError.
void check_config(const EngineConfig& config);

}  // namespace cha
