#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cha/config.hpp"
#include "cha/session.hpp"

namespace cha {

/// One observable step of a turn, in the order it happened.
struct ReplayEvent {
  std::string kind;  // prompt | plan | answer
  std::string stage;  // prompt: planner stage or "thinker"
  std::string text;
  bool operator==(const ReplayEvent&) const = default;
};

struct ReplayTurn {
  std::string query;
  std::optional<std::string> language;
  std::vector<ReplayEvent> events;
};

/// A golden transcript: the queries to replay and what each turn produced.
struct Transcript {
  std::vector<ReplayTurn> turns;
};

Json to_json(const Transcript& t);
Transcript transcript_from_json(const Json& j);
// Throws FixtureError when the file is missing or malformed.
Transcript load_transcript(const std::filesystem::path& path);
void save_transcript(const Transcript& t, const std::filesystem::path& path);

std::vector<ReplayEvent> events_of(const TurnTrace& trace);

struct ReplayReport {
  bool passed = true;
  std::size_t turns_run = 0;
  // Filled on the first divergence only.
  std::size_t turn = 0;   // 0-based
  std::size_t event = 0;  // 0-based within the turn
  std::string kind;
  std::string detail;
  Transcript actual;

  std::string summary() const;
};

/// Runs every golden query through a fresh engine whose planner and
/// responder are a scripted backend over `fixture`, then compares the
/// produced events against the golden ones. `base` supplies everything
/// else (data dirs, tasks, strategy).
ReplayReport replay(const std::filesystem::path& fixture, const Transcript& golden, EngineConfig base);
ReplayReport replay(const std::filesystem::path& fixture, const std::filesystem::path& golden,
                    EngineConfig base);

}  // namespace cha
