#include "cha/llm.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "http_client.hpp"

namespace cha::llm {

namespace {

std::string_view kind_name(MatchKind kind) {
  switch (kind) {
    case MatchKind::Turn: return "turn";
    case MatchKind::Substring: return "substring";
    case MatchKind::Hash: return "hash";
  }
  return "?";
}

MatchKind parse_kind(const std::string& s, std::size_t index) {
  if (s == "turn") return MatchKind::Turn;
  if (s == "substring") return MatchKind::Substring;
  if (s == "hash") return MatchKind::Hash;
  throw Error(Errc::ParseError, "entry " + std::to_string(index) + ": unknown match_kind '" + s + "'");
}

std::size_t turn_index(const std::string& value) {
  std::size_t used = 0;
  unsigned long n = 0;
  try {
    n = std::stoul(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size() || value.empty()) {
    throw Error(Errc::ParseError, "turn matcher '" + value + "' is not a non-negative integer");
  }
  return n;
}

bool matches(const FixtureEntry& e, std::size_t turn, const std::string& prompt,
             const std::string& hash) {
  switch (e.kind) {
    case MatchKind::Turn: return turn_index(e.value) == turn;
    case MatchKind::Substring: return prompt.find(e.value) != std::string::npos;
    case MatchKind::Hash: return to_lower(e.value) == hash;
  }
  return false;
}

std::string excerpt(const std::string& body) {
  constexpr std::size_t kMax = 200;
  return body.size() <= kMax ? body : body.substr(0, kMax) + "...";
}

}  // namespace

std::string_view to_string(Role role) noexcept {
  switch (role) {
    case Role::System: return "system";
    case Role::User: return "user";
    case Role::Assistant: return "assistant";
  }
  return "user";
}

std::string complete_prompt(ChatBackend& backend, const std::string& prompt,
                            const CompletionParams& params) {
  return backend.complete({ChatMessage{Role::User, prompt}}, params);
}

std::string prompt_hash(std::string_view prompt) { return hex64(fnv1a64(collapse_whitespace(prompt))); }

ScriptedFixture fixture_from_json(const Json& doc) {
  const Json* list = &doc;
  if (doc.is_object()) {
    if (!doc.contains("entries")) throw Error(Errc::ParseError, "fixture object lacks 'entries'");
    list = &doc.at("entries");
  }
  if (!list->is_array()) throw Error(Errc::ParseError, "fixture entries must be a list");
  ScriptedFixture fixture;
  for (std::size_t i = 0; i < list->size(); ++i) {
    const Json& e = (*list)[i];
    if (!e.is_object() || !e.contains("match_kind") || !e.contains("match_value") ||
        !e.contains("response")) {
      throw Error(Errc::ParseError, "entry " + std::to_string(i) +
                                        " needs match_kind, match_value and response");
    }
    FixtureEntry entry;
    entry.kind = parse_kind(e.at("match_kind").get<std::string>(), i);
    const Json& value = e.at("match_value");
    entry.value = value.is_string() ? value.get<std::string>() : value.dump();
    if (entry.kind == MatchKind::Turn) turn_index(entry.value);
    const Json& response = e.at("response");
    // Multi-line responses may be written as a list of lines.
    if (response.is_array()) {
      entry.response = join(response.get<std::vector<std::string>>(), "\n");
    } else {
      entry.response = response.get<std::string>();
    }
    fixture.entries.push_back(std::move(entry));
  }
  return fixture;
}

Json to_json(const ScriptedFixture& fixture) {
  Json entries = Json::array();
  for (const auto& e : fixture.entries) {
    entries.push_back(
        {{"match_kind", kind_name(e.kind)}, {"match_value", e.value}, {"response", e.response}});
  }
  return Json{{"entries", std::move(entries)}};
}

void lint_fixture(const ScriptedFixture& fixture) {
  std::map<std::pair<MatchKind, std::string>, std::vector<std::size_t>> seen;
  for (std::size_t i = 0; i < fixture.entries.size(); ++i) {
    const auto& e = fixture.entries[i];
    std::string key = e.kind == MatchKind::Hash ? to_lower(e.value) : e.value;
    if (e.kind == MatchKind::Turn) key = std::to_string(turn_index(e.value));
    seen[{e.kind, key}].push_back(i);
  }
  for (const auto& [key, indices] : seen) {
    if (indices.size() > 1) {
      std::vector<std::string> ids;
      for (auto i : indices) ids.push_back(std::to_string(i));
      throw Error(Errc::AmbiguousMatchers, std::string(kind_name(key.first)) + " matcher '" +
                                               key.second + "' repeated at entries " +
                                               join(ids, ", "));
    }
  }
}

ScriptedFixture load_fixture(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ParseError, "cannot open fixture " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  if (trim(text).empty()) throw Error(Errc::ParseError, "fixture " + path.string() + " is empty");
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(Errc::ParseError, "fixture " + path.string() + ": " + e.what());
  }
  ScriptedFixture fixture = fixture_from_json(doc);
  lint_fixture(fixture);
  return fixture;
}

ScriptedBackend::ScriptedBackend(ScriptedFixture fixture) : fixture_(std::move(fixture)) {
  lint_fixture(fixture_);
}

std::string ScriptedBackend::complete(const std::vector<ChatMessage>& messages,
                                      const CompletionParams&) {
  std::vector<std::string> parts;
  for (const auto& m : messages) parts.push_back(m.content);
  std::string prompt = join(parts, "\n");
  const std::string hash = prompt_hash(prompt);

  std::lock_guard lock(mutex_);
  const std::size_t turn = prompts_.size();
  prompts_.push_back(prompt);
  for (const auto& entry : fixture_.entries) {
    if (matches(entry, turn, prompt, hash)) return entry.response;
  }
  throw Error(Errc::NoFixtureMatch, "call " + std::to_string(turn) + " (prompt hash " + hash +
                                        ") matches no fixture entry");
}

std::size_t ScriptedBackend::call_count() const {
  std::lock_guard lock(mutex_);
  return prompts_.size();
}

std::vector<std::string> ScriptedBackend::prompts() const {
  std::lock_guard lock(mutex_);
  return prompts_;
}

RemoteBackend::RemoteBackend(RemoteConfig config) : config_(std::move(config)) {
  if (config_.base_url.empty()) throw Error(Errc::ConfigError, "remote backend needs a base_url");
}

Json RemoteBackend::request_body(const std::vector<ChatMessage>& messages,
                                 const CompletionParams& params) {
  Json msgs = Json::array();
  for (const auto& m : messages) msgs.push_back({{"role", to_string(m.role)}, {"content", m.content}});
  Json body{{"messages", std::move(msgs)},
            {"temperature", params.temperature},
            {"max_tokens", params.max_tokens}};
  if (!params.model.empty()) body["model"] = params.model;
  return body;
}

std::string RemoteBackend::complete(const std::vector<ChatMessage>& messages,
                                    const CompletionParams& params) {
  http::Headers headers;
  if (!config_.api_key.empty()) {
    headers.emplace_back(config_.auth_header, config_.auth_prefix + config_.api_key);
  }
  const std::string body = request_body(messages, params).dump();
  const int attempts = 1 + std::max(0, config_.retries);
  for (int attempt = 1;; ++attempt) {
    try {
      const auto res =
          http::post(config_.base_url, config_.path, headers, body, "application/json", config_.timeout);
      const bool transient = res.status == 429 || res.status >= 500;
      if (transient && attempt < attempts) continue;
      if (res.status < 200 || res.status >= 300) {
        throw Error(Errc::RemoteError,
                    "status " + std::to_string(res.status) + ": " + excerpt(res.body));
      }
      try {
        const Json reply = Json::parse(res.body);
        return reply.at("choices").at(0).at("message").at("content").get<std::string>();
      } catch (const Json::exception& e) {
        throw Error(Errc::RemoteError, std::string("unexpected reply: ") + e.what() + ": " +
                                           excerpt(res.body));
      }
    } catch (const Error& e) {
      const bool transport = e.code() == Errc::Timeout || e.code() == Errc::ClientError;
      if (transport && attempt < attempts) continue;
      if (e.code() == Errc::ClientError) throw Error(Errc::RemoteError, e.what());
      throw;
    }
  }
}

}  // namespace cha::llm
