#include "cha/service.hpp"

#include <httplib.h>

#include "cha/log.hpp"

namespace cha {

namespace {

void send_json(httplib::Response& res, const Json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code, std::string_view message) {
  send_json(res, Json{{"error", code}, {"message", message}}, status);
}

template <typename F>
httplib::Server::Handler guarded(F fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const Error& e) {
      send_error(res, http_status(e.code()), to_string(e.code()), e.what());
    } catch (const Json::exception& e) {
      send_error(res, 400, "ParseError", e.what());
    } catch (const std::exception& e) {
      log::write(log::Level::Error, std::string("unhandled error: ") + e.what());
      send_error(res, 500, "InternalError", e.what());
    }
  };
}

Json parse_body(const httplib::Request& req) {
  Json body = Json::parse(req.body, nullptr, false);
  if (body.is_discarded() || !body.is_object()) throw Error(Errc::ParseError, "request body must be a JSON object");
  return body;
}

std::string optional_string(const Json& body, const char* key) {
  if (!body.contains(key) || body.at(key).is_null()) return {};
  if (!body.at(key).is_string()) throw Error(Errc::InvalidArgument, std::string(key) + " must be a string");
  return body.at(key).get<std::string>();
}

bool authorized(const httplib::Request& req, const std::string& token) {
  if (token.empty()) return true;
  if (req.get_header_value("X-CHA-Token") == token) return true;
  return req.get_header_value("Authorization") == "Bearer " + token;
}

}  // namespace

int http_status(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument:
    case Errc::ParseError:
    case Errc::UnsupportedLanguage:
    case Errc::BadDate:
    case Errc::MalformedKey:
    case Errc::EmptyInput:
    case Errc::UnknownMode:
      return 400;
    case Errc::NotFound:
    case Errc::UnknownKey:
    case Errc::UnknownTask:
    case Errc::UnknownPatient:
      return 404;
    case Errc::EngineBusy:
      return 409;
    case Errc::BackendError:
    case Errc::RemoteError:
    case Errc::Timeout:
      return 502;
    default:
      return 500;
  }
}

struct Service::Impl {
  httplib::Server server;
};

Service::Service(Engine& engine, std::string host, int port, std::string auth_token)
    : impl_(std::make_unique<Impl>()), host_(std::move(host)), port_(port) {
  auto& srv = impl_->server;
  // Plain SO_REUSEADDR: a port held by a live listener must fail to bind,
  // which SO_REUSEPORT (the library default) would allow.
  srv.set_socket_options([](socket_t sock) {
    int yes = 1;
    ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });

  srv.set_pre_routing_handler([token = std::move(auth_token)](const httplib::Request& req, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Access-Control-Allow-Headers", "Content-Type, Authorization, X-CHA-Token");
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    if (req.method == "OPTIONS") {
      res.status = 204;
      return httplib::Server::HandlerResponse::Handled;
    }
    if (req.path != "/healthz" && !authorized(req, token)) {
      send_error(res, 401, "Unauthorized", "missing or wrong auth token");
      return httplib::Server::HandlerResponse::Handled;
    }
    return httplib::Server::HandlerResponse::Unhandled;
  });

  srv.Get("/healthz", [](const httplib::Request&, httplib::Response& res) { send_json(res, {{"status", "ok"}}); });

  srv.Get("/api/tasks", guarded([&engine](const httplib::Request&, httplib::Response& res) {
            Json out = Json::array();
            for (const auto& t : engine.registry()) out.push_back(to_json(t.spec));
            send_json(res, out);
          }));

  srv.Post("/api/sessions", guarded([&engine](const httplib::Request&, httplib::Response& res) {
             send_json(res, {{"session_id", engine.create_session()}}, 201);
           }));

  srv.Post("/api/respond", guarded([&engine](const httplib::Request& req, httplib::Response& res) {
             const Json body = parse_body(req);
             if (!body.contains("query") || !body.at("query").is_string()) {
               throw Error(Errc::InvalidArgument, "query is required");
             }
             std::vector<std::string> refs;
             if (body.contains("metadata") && !body.at("metadata").is_null()) {
               refs = body.at("metadata").get<std::vector<std::string>>();
             }
             if (trim(body.at("query").get<std::string>()).empty()) {
               throw Error(Errc::InvalidArgument, "query is empty");
             }
             const std::string lang = optional_string(body, "language");
             std::string session_id = optional_string(body, "session_id");
             if (session_id.empty()) session_id = engine.create_session();
             const TurnResult r = engine.respond(session_id, body.at("query").get<std::string>(), refs,
                                                 lang.empty() ? std::nullopt : std::optional<std::string>(lang));
             Json out{{"answer", r.answer},
                      {"turn_id", r.trace.turn_id},
                      {"tasks_used", r.trace.tasks_used},
                      {"language", r.trace.source_language},
                      {"outcome", r.trace.outcome},
                      {"session_id", session_id}};
             if (r.trace.outcome.rfind("backend_error", 0) == 0) out["error"] = "BackendError";
             send_json(res, out);
           }));

  srv.Get(R"(/api/sessions/([^/]+)/history)", guarded([&engine](const httplib::Request& req, httplib::Response& res) {
            const Session s = engine.session(req.matches[1].str());
            Json out = Json::array();
            for (const auto& turn : s.history) {
              out.push_back({{"turn_id", turn.turn_id},
                             {"query", turn.query},
                             {"answer", turn.answer},
                             {"language", turn.language},
                             {"tasks_used", turn.tasks_used}});
            }
            send_json(res, out);
          }));

  srv.Get(R"(/api/sessions/([^/]+)/trace/(\d+))",
          guarded([&engine](const httplib::Request& req, httplib::Response& res) {
            const Session s = engine.session(req.matches[1].str());
            const auto turn_id = std::stoull(req.matches[2].str());
            for (const auto& turn : s.history) {
              if (turn.turn_id == turn_id) {
                send_json(res, to_json(turn.trace));
                return;
              }
            }
            throw Error(Errc::NotFound, "no turn " + std::to_string(turn_id));
          }));

  srv.Post("/api/metadata", guarded([&engine](const httplib::Request& req, httplib::Response& res) {
             if (!req.has_file("file")) throw Error(Errc::InvalidArgument, "multipart field 'file' is required");
             const auto file = req.get_file_value("file");
             UploadedFile up{file.content, file.filename, {}, {}};
             if (req.has_file("caption")) up.caption = req.get_file_value("caption").content;
             if (req.has_file("kind")) up.kind = req.get_file_value("kind").content;
             send_json(res, {{"reference", engine.store_metadata(up)}}, 201);
           }));
}

Service::~Service() { stop(); }

int Service::bind() {
  auto& srv = impl_->server;
  if (port_ == 0) {
    const int p = srv.bind_to_any_port(host_);
    if (p < 0) throw Error(Errc::BindFailure, "cannot bind " + host_ + " on any port");
    port_ = p;
  } else if (!srv.bind_to_port(host_, port_)) {
    throw Error(Errc::BindFailure, "cannot bind " + host_ + ":" + std::to_string(port_));
  }
  return port_;
}

void Service::run() { impl_->server.listen_after_bind(); }

void Service::wait_until_ready() const { impl_->server.wait_until_ready(); }

void Service::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace cha
