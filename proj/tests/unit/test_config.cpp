#include <doctest.h>

#include <cstdlib>
#include <fstream>

#include "cha/config.hpp"
#include "test_support.hpp"

using namespace cha;
using cha::testing::errc_of;

TEST_SUITE("config") {
  TEST_CASE("bundled demo config") {
    const auto c = load_engine_config(testing::source_dir() / "configs" / "demo.json");
    CHECK(c.strategy == "tot");
    CHECK(c.max_iterations == 3);
    CHECK(c.lang_mode == LangMode::Translate);
    CHECK(c.planner_backend.kind == "scripted");
    CHECK(c.planner_backend.fixture.filename() == "sleep_demo.json");
    CHECK(std::filesystem::exists(c.planner_backend.fixture));
    CHECK(std::filesystem::exists(c.data_dir / "par_5"));
    CHECK(c.responder_params.temperature == 0.7);
    CHECK_FALSE(c.responder_backend.has_value());
    CHECK(c.languages == std::vector<std::string>{"en", "es"});
  }

  TEST_CASE("relative paths follow the config file") {
    const Json doc{{"planner", {{"backend", "scripted"}, {"fixture", "f.json"}}}, {"data_dir", "/abs/data"}};
    const auto c = engine_config_from_json(doc, "/etc/cha");
    CHECK(c.planner_backend.fixture == std::filesystem::path("/etc/cha/f.json"));
    CHECK(c.data_dir == std::filesystem::path("/abs/data"));
  }

  TEST_CASE("malformed documents") {
    CHECK(errc_of([] { engine_config_from_json(Json::array(), "."); }) == Errc::ConfigError);
    CHECK(errc_of([] { engine_config_from_json(Json{{"max_iteration", 3}}, "."); }) == Errc::ConfigError);
    CHECK(errc_of([] { engine_config_from_json(Json{{"max_iterations", "three"}}, "."); }) == Errc::ConfigError);
    CHECK(errc_of([] { engine_config_from_json(Json{{"lang_mode", "shout"}}, "."); }).has_value());
    CHECK(errc_of([] { load_engine_config("/nonexistent/cha.json"); }) == Errc::ConfigError);

    testing::TempDir dir;
    std::ofstream(dir.path() / "bad.json") << "{ not json";
    CHECK(errc_of([&] { load_engine_config(dir.path() / "bad.json"); }) == Errc::ConfigError);
  }

  TEST_CASE("semantic checks") {
    EngineConfig c = testing::demo_config(testing::fixtures_dir() / "llm" / "sleep_demo.json");
    CHECK_NOTHROW(check_config(c));
    auto bad = [&](auto mutate) {
      EngineConfig copy = c;
      mutate(copy);
      return errc_of([&] { check_config(copy); });
    };
    CHECK(bad([](EngineConfig& x) { x.strategy = "mcts"; }) == Errc::ConfigError);
    CHECK(bad([](EngineConfig& x) { x.max_iterations = 0; }) == Errc::ConfigError);
    CHECK(bad([](EngineConfig& x) { x.repair_budget = -1; }) == Errc::ConfigError);
    CHECK(bad([](EngineConfig& x) { x.planner_backend.fixture.clear(); }) == Errc::ConfigError);
    CHECK(bad([](EngineConfig& x) { x.planner_backend.kind = "remote"; }) == Errc::ConfigError);
    CHECK(bad([](EngineConfig& x) { x.planner_backend.kind = "oracle"; }) == Errc::ConfigError);
    CHECK(bad([](EngineConfig& x) { x.translator = "babelfish"; }) == Errc::ConfigError);
    CHECK(bad([](EngineConfig& x) { x.port = 70000; }) == Errc::ConfigError);
  }

  TEST_CASE("environment overrides") {
    EngineConfig c;
    c.planner_backend.kind = "remote";
    ::setenv("CHA_LLM_BASE_URL", "http://127.0.0.1:9", 1);
    ::setenv("CHA_AUTH_TOKEN", "secret", 1);
    apply_env_overrides(c);
    ::unsetenv("CHA_LLM_BASE_URL");
    ::unsetenv("CHA_AUTH_TOKEN");
    CHECK(c.planner_backend.remote.base_url == "http://127.0.0.1:9");
    CHECK(c.auth_token == "secret");
  }
}
