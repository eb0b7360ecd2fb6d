#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "cha/error.hpp"
#include "cha/text.hpp"

namespace cha::llm {

enum class Role { System, User, Assistant };

std::string_view to_string(Role role) noexcept;

struct ChatMessage {
  Role role = Role::User;
  std::string content;
};

struct CompletionParams {
  std::string model;
  double temperature = 0.0;
  int max_tokens = 2048;
};

/// Provider-neutral chat completion. Implementations are shareable across
/// sessions; ordering within a session is the caller's concern.
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual std::string complete(const std::vector<ChatMessage>& messages,
                               const CompletionParams& params) = 0;
};

std::string complete_prompt(ChatBackend& backend, const std::string& prompt,
                            const CompletionParams& params);

// ---------------------------------------------------------------------------
// Scripted backend

enum class MatchKind { Turn, Substring, Hash };

struct FixtureEntry {
  MatchKind kind = MatchKind::Substring;
  std::string value;  // turn index, substring, or 16-hex-digit hash
  std::string response;
};

struct ScriptedFixture {
  std::vector<FixtureEntry> entries;
};

// Stable 64-bit hash of the prompt with whitespace collapsed, as 16 hex digits.
std::string prompt_hash(std::string_view prompt);

ScriptedFixture fixture_from_json(const Json& doc);
Json to_json(const ScriptedFixture& fixture);
ScriptedFixture load_fixture(const std::filesystem::path& path);

// Throws AmbiguousMatchers listing the indices of duplicated matchers.
void lint_fixture(const ScriptedFixture& fixture);

/// Replays canned responses. The first entry whose matcher accepts the
/// prompt wins; a Turn matcher accepts the n-th call (0-based) on this
/// backend. The prompt is all message contents joined by newlines.
class ScriptedBackend final : public ChatBackend {
 public:
  explicit ScriptedBackend(ScriptedFixture fixture);

  std::string complete(const std::vector<ChatMessage>& messages,
                       const CompletionParams& params) override;

  std::size_t call_count() const;
  std::vector<std::string> prompts() const;

 private:
  ScriptedFixture fixture_;
  mutable std::mutex mutex_;
  std::vector<std::string> prompts_;
};

// ---------------------------------------------------------------------------
// Remote backend

struct RemoteConfig {
  std::string base_url;  // scheme://host[:port]
  std::string path = "/v1/chat/completions";
  std::string auth_header = "Authorization";
  std::string auth_prefix = "Bearer ";
  std::string api_key;
  std::chrono::seconds timeout{60};
  int retries = 2;
};

/// One JSON request/response cycle per attempt against a chat-completions
/// style endpoint: `{model, messages:[{role, content}], temperature,
/// max_tokens}` in, `choices[0].message.content` out. Transport failures
/// and 5xx/429 responses are retried up to `retries` times.
class RemoteBackend final : public ChatBackend {
 public:
  explicit RemoteBackend(RemoteConfig config);

  std::string complete(const std::vector<ChatMessage>& messages,
                       const CompletionParams& params) override;

  static Json request_body(const std::vector<ChatMessage>& messages,
                           const CompletionParams& params);

 private:
  RemoteConfig config_;
};

}  // namespace cha::llm
