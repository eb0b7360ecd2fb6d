#pragma once

#include <memory>
#include <string>

#include "cha/engine.hpp"

namespace cha {

/// JSON-over-HTTP front end for an Engine.
///
///   POST /api/sessions                       -> {session_id}
///   POST /api/respond                        -> {answer, turn_id, tasks_used, language, outcome}
///   GET  /api/sessions/{id}/history          -> [turn...]
///   GET  /api/sessions/{id}/trace/{turn_id}  -> full trace
///   POST /api/metadata (multipart: file, caption, kind) -> {reference}
///   GET  /api/tasks                          -> [spec...]
///   GET  /healthz                            -> {"status":"ok"}
///
/// Errors come back as {"error": <code>, "message": <text>}.
class Service {
 public:
  Service(Engine& engine, std::string host, int port, std::string auth_token = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds the socket; port 0 picks an ephemeral port. Returns the bound
  /// port. Throws BindFailure.
  int bind();
  /// Serves until stop(). bind() must have succeeded.
  void run();
  /// Blocks until run() is accepting connections.
  void wait_until_ready() const;
  void stop();
  int port() const noexcept { return port_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::string host_;
  int port_;
};

// HTTP status for an error code; 500 for anything unexpected.
int http_status(Errc code) noexcept;

}  // namespace cha
