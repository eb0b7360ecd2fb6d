#include "cha/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

#include "cha/error.hpp"

namespace cha {

namespace {

namespace fs = std::filesystem;

const std::set<std::string, std::less<>> kKnownKeys = {
    "strategy",        "max_iterations",   "repair_budget",        "lang_mode",
    "enabled_tasks",   "task_manifest",    "planner",              "responder",
    "response_prefix", "prompts_dir",      "languages",            "translator",
    "data_dir",        "search",           "fetcher",              "text_budget",
    "persistence_dir", "host",             "port",                 "auth_token"};

fs::path resolve(const Json& j, const char* key, const fs::path& base) {
  if (!j.contains(key) || j.at(key).get<std::string>().empty()) return {};
  fs::path p = j.at(key).get<std::string>();
  return p.is_absolute() ? p : (base / p).lexically_normal();
}

llm::CompletionParams params_from(const Json& j, llm::CompletionParams p) {
  p.model = j.value("model", p.model);
  p.temperature = j.value("temperature", p.temperature);
  p.max_tokens = j.value("max_tokens", p.max_tokens);
  return p;
}

BackendConfig backend_from(const Json& j, const fs::path& base) {
  BackendConfig b;
  b.kind = j.value("backend", b.kind);
  b.fixture = resolve(j, "fixture", base);
  b.remote.base_url = j.value("base_url", b.remote.base_url);
  b.remote.path = j.value("path", b.remote.path);
  b.remote.auth_header = j.value("auth_header", b.remote.auth_header);
  b.remote.auth_prefix = j.value("auth_prefix", b.remote.auth_prefix);
  b.remote.api_key = j.value("api_key", b.remote.api_key);
  b.remote.timeout = std::chrono::seconds(j.value("timeout_s", static_cast<int>(b.remote.timeout.count())));
  b.remote.retries = j.value("retries", b.remote.retries);
  return b;
}

void check_backend(const BackendConfig& b, std::string_view role) {
  if (b.kind == "scripted") {
    if (b.fixture.empty()) throw Error(Errc::ConfigError, std::string(role) + ": scripted backend needs a fixture");
  } else if (b.kind == "remote") {
    if (b.remote.base_url.empty()) throw Error(Errc::ConfigError, std::string(role) + ": remote backend needs base_url");
  } else {
    throw Error(Errc::ConfigError, std::string(role) + ": backend must be 'scripted' or 'remote', got '" + b.kind + "'");
  }
}

void set_from_env(const char* name, std::string& target) {
  if (const char* v = std::getenv(name); v && *v) target = v;
}

}  // namespace

EngineConfig engine_config_from_json(const Json& doc, const fs::path& base) {
  if (!doc.is_object()) throw Error(Errc::ConfigError, "config must be a JSON object");
  for (const auto& [key, _] : doc.items()) {
    if (!kKnownKeys.contains(key)) throw Error(Errc::ConfigError, "unknown config key '" + key + "'");
  }
  EngineConfig c;
  try {
    c.strategy = doc.value("strategy", c.strategy);
    c.max_iterations = doc.value("max_iterations", c.max_iterations);
    c.repair_budget = doc.value("repair_budget", c.repair_budget);
    if (doc.contains("lang_mode")) c.lang_mode = parse_lang_mode(doc.at("lang_mode").get<std::string>());
    c.enabled_tasks = doc.value("enabled_tasks", c.enabled_tasks);
    c.task_manifest = resolve(doc, "task_manifest", base);
    if (doc.contains("planner")) {
      const Json& p = doc.at("planner");
      c.planner_params = params_from(p, c.planner_params);
      c.planner_backend = backend_from(p, base);
    }
    if (doc.contains("responder")) {
      const Json& r = doc.at("responder");
      c.responder_params = params_from(r, c.responder_params);
      if (r.contains("backend")) c.responder_backend = backend_from(r, base);
    }
    c.response_prefix = doc.value("response_prefix", c.response_prefix);
    c.prompts_dir = resolve(doc, "prompts_dir", base);
    c.languages = doc.value("languages", c.languages);
    if (doc.contains("translator")) {
      const Json& t = doc.at("translator");
      c.translator = t.value("kind", c.translator);
      c.translation_dictionary = resolve(t, "dictionary", base);
      c.translation_endpoint = t.value("endpoint", c.translation_endpoint);
      c.translation_api_key = t.value("api_key", c.translation_api_key);
    }
    c.data_dir = resolve(doc, "data_dir", base);
    if (doc.contains("search")) {
      const Json& s = doc.at("search");
      c.search = s.value("kind", c.search);
      c.search_map = resolve(s, "map", base);
      c.remote_search.endpoint = s.value("endpoint", c.remote_search.endpoint);
      c.remote_search.api_key = s.value("api_key", c.remote_search.api_key);
      c.remote_search.engine_id = s.value("engine_id", c.remote_search.engine_id);
    }
    if (doc.contains("fetcher")) {
      const Json& f = doc.at("fetcher");
      c.fetcher = f.value("kind", c.fetcher);
      c.www_dir = resolve(f, "dir", base);
    }
    c.text_budget = doc.value("text_budget", c.text_budget);
    c.persistence_dir = resolve(doc, "persistence_dir", base);
    c.host = doc.value("host", c.host);
    c.port = doc.value("port", c.port);
    c.auth_token = doc.value("auth_token", c.auth_token);
  } catch (const Json::exception& e) {
    throw Error(Errc::ConfigError, std::string("config: ") + e.what());
  }
  return c;
}

void check_config(const EngineConfig& c) {
  if (c.strategy != "tot" && c.strategy != "react") {
    throw Error(Errc::ConfigError, "strategy must be 'tot' or 'react', got '" + c.strategy + "'");
  }
  if (c.max_iterations < 1) throw Error(Errc::ConfigError, "max_iterations must be at least 1");
  if (c.repair_budget < 0) throw Error(Errc::ConfigError, "repair_budget must be nonnegative");
  check_backend(c.planner_backend, "planner");
  if (c.responder_backend) check_backend(*c.responder_backend, "responder");
  if (c.translator != "stub" && c.translator != "remote" && c.translator != "none") {
    throw Error(Errc::ConfigError, "translator.kind must be stub, remote or none");
  }
  if (c.search != "stub" && c.search != "remote") throw Error(Errc::ConfigError, "search.kind must be stub or remote");
  if (c.fetcher != "fixture" && c.fetcher != "remote") {
    throw Error(Errc::ConfigError, "fetcher.kind must be fixture or remote");
  }
  if (c.port < 0 || c.port > 65535) throw Error(Errc::ConfigError, "port out of range");
}

void apply_env_overrides(EngineConfig& c) {
  set_from_env("CHA_LLM_API_KEY", c.planner_backend.remote.api_key);
  set_from_env("CHA_LLM_BASE_URL", c.planner_backend.remote.base_url);
  if (c.responder_backend) {
    set_from_env("CHA_LLM_API_KEY", c.responder_backend->remote.api_key);
    set_from_env("CHA_LLM_BASE_URL", c.responder_backend->remote.base_url);
  }
  set_from_env("CHA_SEARCH_API_KEY", c.remote_search.api_key);
  set_from_env("CHA_SEARCH_ENGINE_ID", c.remote_search.engine_id);
  set_from_env("CHA_TRANSLATE_API_KEY", c.translation_api_key);
  set_from_env("CHA_AUTH_TOKEN", c.auth_token);
}

EngineConfig load_engine_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ConfigError, "cannot open config " + path.string());
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(Errc::ConfigError, path.string() + ": " + e.what());
  }
  EngineConfig c = engine_config_from_json(doc, fs::absolute(path).parent_path());
  apply_env_overrides(c);
  check_config(c);
  return c;
}

}  // namespace cha
