#include <doctest.h>

#include <httplib.h>

#include <thread>

#include "cha/service.hpp"
#include "test_support.hpp"

using namespace cha;
using cha::testing::errc_of;

namespace {

// Engine plus a service on an ephemeral port, torn down in reverse order.
struct Running {
  Engine engine;
  Service service;
  int port = 0;
  std::thread thread;

  explicit Running(std::string token = {})
      : engine(testing::demo_config(testing::fixtures_dir() / "llm" / "sleep_demo.json")),
        service(engine, "127.0.0.1", 0, std::move(token)) {
    port = service.bind();
    thread = std::thread([this] { service.run(); });
    service.wait_until_ready();
  }
  ~Running() {
    service.stop();
    thread.join();
  }

  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port);
    c.set_read_timeout(10, 0);
    return c;
  }
};

Json body_of(const httplib::Result& r) {
  REQUIRE(r);
  return Json::parse(r->body);
}

}  // namespace

TEST_SUITE("service") {
  TEST_CASE("health check on an ephemeral port") {
    Running run;
    CHECK(run.port > 0);
    auto c = run.client();
    const auto r = c.Get("/healthz");
    REQUIRE(r);
    CHECK(r->status == 200);
    CHECK(body_of(r) == Json{{"status", "ok"}});
  }

  TEST_CASE("a second bind on the same port fails") {
    Running run;
    Engine other(testing::demo_config(testing::fixtures_dir() / "llm" / "sleep_demo.json"));
    Service clash(other, "127.0.0.1", run.port);
    CHECK(errc_of([&] { clash.bind(); }) == Errc::BindFailure);
  }

  TEST_CASE("respond, follow-up, history and trace") {
    Running run;
    auto c = run.client();
    const Json session = body_of(c.Post("/api/sessions", "", "application/json"));
    const std::string id = session.at("session_id");

    const auto r1 = c.Post("/api/respond", Json{{"session_id", id}, {"query", "How to improve my sleep?"}}.dump(),
                           "application/json");
    REQUIRE(r1);
    CHECK(r1->status == 200);
    const Json a1 = body_of(r1);
    CHECK(a1.at("tasks_used") == Json::array({"GoogleSearch", "ExtractText"}));
    CHECK(a1.at("outcome") == "answered");
    CHECK(a1.at("answer").get<std::string>().find("Sleep tips") != std::string::npos);

    const Json a2 = body_of(
        c.Post("/api/respond", Json{{"session_id", id}, {"query", "Name the tasks used"}}.dump(), "application/json"));
    const std::string explained = a2.at("answer");
    CHECK(explained.find("GoogleSearch") != std::string::npos);
    CHECK(explained.find("ExtractText") != std::string::npos);

    const Json history = body_of(c.Get("/api/sessions/" + id + "/history"));
    REQUIRE(history.size() == 2);
    CHECK(history[0].at("query") == "How to improve my sleep?");

    const Json trace = body_of(c.Get("/api/sessions/" + id + "/trace/1"));
    CHECK(trace.at("planner_invocations") == 2);
    CHECK(c.Get("/api/sessions/" + id + "/trace/9")->status == 404);
    CHECK(c.Get("/api/sessions/nobody/history")->status == 404);
  }

  TEST_CASE("bad requests") {
    Running run;
    auto c = run.client();
    const auto empty = c.Post("/api/respond", Json{{"query", "  "}}.dump(), "application/json");
    REQUIRE(empty);
    CHECK(empty->status == 400);
    CHECK(body_of(empty).at("error") == "InvalidArgument");
    CHECK(c.Post("/api/respond", "{", "application/json")->status == 400);
    CHECK(c.Post("/api/respond", Json{{"q", "x"}}.dump(), "application/json")->status == 400);
    CHECK(c.Post("/api/respond", Json{{"query", "hola"}, {"language", "fr"}}.dump(), "application/json")->status ==
          400);
  }

  TEST_CASE("task listing and metadata upload") {
    Running run;
    auto c = run.client();
    const Json tasks = body_of(c.Get("/api/tasks"));
    CHECK(tasks.size() == 8);

    httplib::MultipartFormDataItems items = {{"file", "hello", "note.txt", "text/plain"},
                                             {"caption", "a note", "", ""},
                                             {"kind", "text", "", ""}};
    const auto up = c.Post("/api/metadata", items);
    REQUIRE(up);
    CHECK(up->status == 201);
    const std::string ref = body_of(up).at("reference");
    CHECK(run.engine.pipe().retrieve(ref).at("caption") == "a note");
    CHECK(c.Post("/api/metadata", httplib::MultipartFormDataItems{})->status == 400);
  }

  TEST_CASE("token auth") {
    Running run("s3cret");
    auto c = run.client();
    CHECK(c.Get("/api/tasks")->status == 401);
    CHECK(c.Get("/healthz")->status == 200);
    httplib::Headers bearer{{"Authorization", "Bearer s3cret"}};
    CHECK(c.Get("/api/tasks", bearer)->status == 200);
    httplib::Headers custom{{"X-CHA-Token", "s3cret"}};
    CHECK(c.Get("/api/tasks", custom)->status == 200);
  }

  TEST_CASE("status mapping") {
    CHECK(http_status(Errc::EngineBusy) == 409);
    CHECK(http_status(Errc::UnknownPatient) == 404);
    CHECK(http_status(Errc::RemoteError) == 502);
    CHECK(http_status(Errc::StorageFailure) == 500);
  }
}
