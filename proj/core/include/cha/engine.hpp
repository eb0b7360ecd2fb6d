#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "cha/config.hpp"
#include "cha/health/library.hpp"
#include "cha/orchestrator.hpp"

namespace cha {

struct UploadedFile {
  std::string content;  // raw bytes
  std::string filename;
  std::string caption;
  std::string kind;  // image | audio | video | text | file
};

/// The deployable engine: registry, data pipe, backends and sessions built
/// from one EngineConfig. Turns are serialized per session; different
/// sessions run concurrently.
class Engine {
 public:
  explicit Engine(EngineConfig config);
  ~Engine();
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  std::string create_session();
  bool has_session(std::string_view id) const;
  // Copy of the session state. Throws NotFound.
  Session session(std::string_view id) const;
  std::vector<std::string> session_ids() const;

  /// Runs one turn. An empty or unknown session id creates the session.
  /// Throws EngineBusy when a turn for the same session is in flight,
  /// InvalidArgument on an empty query, NotFound on an unknown metadata
  /// reference, UnsupportedLanguage on a language outside the configured set.
  TurnResult respond(const std::string& session_id, const std::string& query,
                     const std::vector<std::string>& metadata_refs = {},
                     std::optional<std::string> language = std::nullopt);

  /// Stores an upload in the data pipe and returns its reference.
  std::string store_metadata(const UploadedFile& file);

  const EngineConfig& config() const noexcept { return config_; }
  const TaskRegistry& registry() const noexcept { return registry_; }
  DataPipe& pipe() noexcept { return *pipe_; }
  llm::ChatBackend& planner_backend() noexcept { return *planner_llm_; }
  llm::ChatBackend& responder_backend() noexcept { return *responder_llm_; }
  TranslationClient* translator() noexcept { return translator_.get(); }

 private:
  struct Slot {
    std::mutex turn;  // held for the duration of a turn
    mutable std::mutex state;
    Session session;
  };

  std::shared_ptr<Slot> slot(const std::string& id, bool create);
  void persist(const Session& s) const;
  void load_persisted();

  EngineConfig config_;
  TaskRegistry registry_;
  std::unique_ptr<DataPipe> pipe_;
  std::shared_ptr<llm::ChatBackend> planner_llm_;
  std::shared_ptr<llm::ChatBackend> responder_llm_;
  std::unique_ptr<TranslationClient> translator_;
  std::unique_ptr<PlanningStrategy> strategy_;
  std::unique_ptr<Orchestrator> orchestrator_;

  mutable std::mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Slot>, std::less<>> sessions_;
};

/// Builds the health task library a config describes.
health::HealthLibrary make_health_library(const EngineConfig& config);
std::unique_ptr<llm::ChatBackend> make_backend(const BackendConfig& config);

}  // namespace cha
