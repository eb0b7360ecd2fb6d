#include <doctest.h>

#include <httplib.h>

#include <atomic>
#include <fstream>
#include <thread>

#include "cha/llm.hpp"
#include "test_support.hpp"

using namespace cha;
using namespace cha::llm;

namespace {

std::string ask(ChatBackend& b, const std::string& prompt) { return complete_prompt(b, prompt, {}); }

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::InvalidArgument;
}

// Local chat-completions endpoint that fails `failures` times first.
struct FakeProvider {
  httplib::Server server;
  std::thread thread;
  std::atomic<int> calls{0};
  int failures = 0;
  int port = 0;
  Json last_body;
  std::string last_auth;

  explicit FakeProvider(int fail_first) : failures(fail_first) {
    server.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      const int n = ++calls;
      last_body = Json::parse(req.body);
      last_auth = req.get_header_value("Authorization");
      if (n <= failures) {
        res.status = 503;
        return;
      }
      res.set_content(Json{{"choices", {{{"message", {{"role", "assistant"}, {"content", "pong"}}}}}}}.dump(),
                      "application/json");
    });
    server.Post("/bad", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("{\"unexpected\": true}", "application/json");
    });
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~FakeProvider() {
    server.stop();
    thread.join();
  }
  std::string base() const { return "http://127.0.0.1:" + std::to_string(port); }
};

}  // namespace

TEST_SUITE("llm") {
  TEST_CASE("first matching entry wins") {
    ScriptedBackend b(testing::scripted({{MatchKind::Substring, "alpha", "A"},
                                         {MatchKind::Turn, "1", "second call"},
                                         {MatchKind::Substring, "a", "generic"}}));
    CHECK(ask(b, "xx alpha yy") == "A");
    CHECK(ask(b, "alpha again") == "A");  // substring beats the turn matcher listed after it
    CHECK(ask(b, "banana") == "generic");
    CHECK(b.call_count() == 3);
    CHECK(code_of([&] { ask(b, "zzz"); }) == Errc::NoFixtureMatch);
    CHECK(b.prompts().back() == "zzz");
  }

  TEST_CASE("turn and hash matchers") {
    const std::string prompt = "hello   world\n";
    ScriptedBackend b(testing::scripted({{MatchKind::Hash, prompt_hash("hello world"), "by hash"},
                                         {MatchKind::Turn, "1", "turn one"}}));
    CHECK(prompt_hash(prompt) == prompt_hash(" hello world "));
    CHECK(prompt_hash("a").size() == 16);
    CHECK(ask(b, prompt) == "by hash");
    CHECK(ask(b, "other") == "turn one");
  }

  TEST_CASE("duplicate matchers are rejected") {
    CHECK(code_of([] {
            ScriptedBackend b(testing::scripted({{MatchKind::Substring, "x", "1"}, {MatchKind::Substring, "x", "2"}}));
          }) == Errc::AmbiguousMatchers);
    CHECK(code_of([] {
            ScriptedBackend b(testing::scripted({{MatchKind::Turn, "2", "1"}, {MatchKind::Turn, "02", "2"}}));
          }) == Errc::AmbiguousMatchers);
  }

  TEST_CASE("fixture files") {
    const auto f = load_fixture(testing::fixtures_dir() / "llm" / "sleep_demo.json");
    CHECK(f.entries.size() == 4);
    CHECK(fixture_from_json(to_json(f)).entries.size() == 4);

    testing::TempDir dir;
    std::ofstream(dir.path() / "lines.json")
        << R"([{"match_kind":"turn","match_value":0,"response":["a","b"]}])";
    CHECK(load_fixture(dir.path() / "lines.json").entries[0].response == "a\nb");
    std::ofstream(dir.path() / "empty.json") << "  ";
    CHECK(code_of([&] { load_fixture(dir.path() / "empty.json"); }) == Errc::ParseError);
    std::ofstream(dir.path() / "kind.json") << R"([{"match_kind":"regex","match_value":"x","response":"y"}])";
    CHECK(code_of([&] { load_fixture(dir.path() / "kind.json"); }) == Errc::ParseError);
    CHECK(code_of([&] { load_fixture(dir.path() / "absent.json"); }) == Errc::ParseError);
  }

  TEST_CASE("remote request body") {
    const Json body = RemoteBackend::request_body({{Role::System, "s"}, {Role::User, "u"}}, {"m", 0.5, 64});
    CHECK(body.at("model") == "m");
    CHECK(body.at("messages").size() == 2);
    CHECK(body.at("messages")[0].at("role") == "system");
    CHECK(body.at("max_tokens") == 64);
    CHECK_FALSE(RemoteBackend::request_body({}, {}).contains("model"));
  }

  TEST_CASE("remote backend retries transient failures") {
    FakeProvider provider(2);
    RemoteConfig cfg;
    cfg.base_url = provider.base();
    cfg.api_key = "secret";
    cfg.retries = 2;
    RemoteBackend b(cfg);
    CHECK(ask(b, "ping") == "pong");
    CHECK(provider.calls == 3);
    CHECK(provider.last_auth == "Bearer secret");
    CHECK(provider.last_body.at("messages")[0].at("content") == "ping");
  }

  TEST_CASE("remote backend gives up after the retry budget") {
    FakeProvider provider(5);
    RemoteConfig cfg;
    cfg.base_url = provider.base();
    cfg.retries = 1;
    RemoteBackend b(cfg);
    CHECK(code_of([&] { ask(b, "ping"); }) == Errc::RemoteError);
    CHECK(provider.calls == 2);

    cfg.path = "/bad";
    RemoteBackend bad(cfg);
    CHECK(code_of([&] { ask(bad, "ping"); }) == Errc::RemoteError);

    RemoteConfig nowhere;
    nowhere.base_url = "http://127.0.0.1:1";
    nowhere.retries = 0;
    nowhere.timeout = std::chrono::seconds(2);
    RemoteBackend down(nowhere);
    CHECK(code_of([&] { ask(down, "ping"); }) == Errc::RemoteError);
    CHECK(code_of([] { RemoteBackend none(RemoteConfig{}); }) == Errc::ConfigError);
  }
}
