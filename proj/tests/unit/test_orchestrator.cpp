#include <doctest.h>

#include "cha/orchestrator.hpp"
#include "test_support.hpp"

using namespace cha;

namespace {

const std::string kPageStart = "Sleep tips: 6 steps to better sleep";

// Demo registry whose bodies also log the arguments they receive.
struct SpyRegistry {
  std::vector<std::pair<std::string, std::vector<Json>>> calls;
  TaskRegistry registry;

  SpyRegistry() {
    const auto lib = testing::demo_library();
    const auto bodies = health::health_task_bodies(lib);
    for (const auto& spec : health::health_task_specs()) {
      TaskBody inner = bodies.at(spec.name);
      registry.register_task(spec, [this, name = spec.name, inner](std::span<const Json> args) {
        calls.emplace_back(name, std::vector<Json>(args.begin(), args.end()));
        return inner(args);
      });
    }
  }
};

struct Harness {
  SpyRegistry spy;
  DataPipe pipe;
  llm::ScriptedBackend backend;
  std::unique_ptr<StubDictionaryClient> translator =
      StubDictionaryClient::from_file(testing::fixtures_dir() / "translations.tsv");
  TreeOfThoughtPlanner strategy;
  Orchestrator orchestrator;

  explicit Harness(llm::ScriptedFixture fixture, OrchestratorConfig config = {})
      : backend(std::move(fixture)),
        orchestrator(spy.registry, pipe, strategy, backend, backend, translator.get(), SupportedLanguages(),
                     config) {}

  TurnResult ask(Session& s, const std::string& q, std::optional<LanguageTag> lang = std::nullopt) {
    return orchestrator.orchestrate_turn(s, q, {}, lang);
  }
};

llm::ScriptedFixture sleep_fixture() { return llm::load_fixture(testing::fixtures_dir() / "llm" / "sleep_demo.json"); }

}  // namespace

TEST_SUITE("orchestrator") {
  TEST_CASE("sleep question end to end") {
    Harness h(sleep_fixture());
    Session s;
    const auto r = h.ask(s, "How to improve my sleep?");
    CHECK(r.trace.outcome == "answered");
    CHECK(r.trace.planner_invocations == 2);
    REQUIRE(r.trace.iterations.size() == 2);
    CHECK(r.trace.iterations[0].status == "plan");
    CHECK(r.trace.iterations[1].status == "finished");
    REQUIRE(h.spy.calls.size() == 2);
    CHECK(h.spy.calls[0].first == "google_search");
    CHECK(h.spy.calls[0].second == std::vector<Json>{Json("tips to improve sleep")});
    CHECK(r.answer.find(kPageStart) != std::string::npos);
    CHECK(r.answer.find("datapipe:") == std::string::npos);
    CHECK(r.trace.tasks_used == std::vector<std::string>{"GoogleSearch", "ExtractText"});
    CHECK(r.trace.thinker_prompt.find("extract_text: ['https://www.mayoclinic.org/") != std::string::npos);
    CHECK(s.history.size() == 1);
    CHECK(s.history[0].turn_id == 1);
  }

  TEST_CASE("explainability follow-up lists chat names") {
    Harness h(sleep_fixture());
    Session s;
    const auto first = h.ask(s, "Name the tasks used");
    CHECK(first.answer.find("not answered any question") != std::string::npos);
    h.ask(s, "How to improve my sleep?");
    const std::size_t calls = h.backend.call_count();
    const auto r = h.ask(s, "Name the tasks used");
    CHECK(r.trace.outcome == "explained");
    CHECK(r.answer.find("GoogleSearch, ExtractText") != std::string::npos);
    CHECK(h.backend.call_count() == calls);
    CHECK(is_explainability_query("Which tools did you use?"));
    CHECK_FALSE(is_explainability_query("How to improve my sleep?"));
  }

  TEST_CASE("never-finishing planner is bounded") {
    const std::string code = "```python\nr = self.execute_task('google_search', ['tips to improve sleep'])\n```";
    for (int max_iter : {1, 2, 3, 5}) {
      OrchestratorConfig cfg;
      cfg.max_iterations = max_iter;
      Harness h(testing::scripted({{llm::MatchKind::Substring, "===========Thinker:", "best effort"},
                                   {llm::MatchKind::Substring, "skilled Python", code},
                                   {llm::MatchKind::Substring, "creative strategies", "Decision: search again"}}),
                cfg);
      Session s;
      const auto r = h.ask(s, "How to improve my sleep?");
      CHECK(r.trace.planner_invocations <= static_cast<std::size_t>(max_iter) + 1);
      CHECK(r.trace.planner_invocations == static_cast<std::size_t>(max_iter));
      CHECK(r.trace.outcome == "iteration_limit");
      CHECK(r.answer == "best effort");
      CHECK(h.spy.calls.size() == static_cast<std::size_t>(max_iter));
    }
  }

  TEST_CASE("piped payloads never reach a prompt") {
    Harness h(llm::load_fixture(testing::fixtures_dir() / "llm" / "stress_chain.json"));
    Session s;
    const auto r = h.ask(s, "What is the stress level of patient 5 in August 2020?");
    REQUIRE(r.trace.iterations.at(0).records.size() == 3);
    CHECK(h.pipe.size() == 2);
    const auto prompts = r.trace.all_prompts();
    REQUIRE_FALSE(prompts.empty());
    for (const auto& rec : r.trace.iterations[0].records) {
      if (!is_datapipe_reference(rec.rendered_output)) continue;
      const std::string payload = render_value(h.pipe.retrieve(rec.rendered_output));
      const std::string excerpt = payload.substr(0, 48);
      for (const auto& p : prompts) {
        CHECK(p.find(excerpt) == std::string::npos);
        CHECK(p.find("'ppg':") == std::string::npos);
        CHECK(p.find("'rmssd':") == std::string::npos);
      }
    }
    CHECK(r.answer.find("3 of 4 (high)") != std::string::npos);
  }

  TEST_CASE("spanish query round trips through the dictionary") {
    Harness h(sleep_fixture());
    Session s;
    const auto r = h.ask(s, "¿Cómo puedo mejorar mi sueño?");
    CHECK(r.trace.source_language == "es");
    CHECK(r.trace.question == "How to improve my sleep?");
    CHECK(r.answer.rfind("Según Mayo Clinic", 0) == 0);
    CHECK(s.history[0].answer_en.rfind("According to Mayo Clinic", 0) == 0);
    CHECK(h.translator->call_count() == 2);
  }

  TEST_CASE("retain mode never calls the translator") {
    OrchestratorConfig cfg;
    cfg.lang_mode = LangMode::Retain;
    Harness h(sleep_fixture(), cfg);
    Session s;
    const auto r = h.ask(s, "¿Cómo puedo mejorar mi sueño?");
    CHECK(r.trace.question == "¿Cómo puedo mejorar mi sueño?");
    CHECK(h.translator->call_count() == 0);
  }

  TEST_CASE("planning failure still produces an apologetic answer") {
    Harness h(testing::scripted({{llm::MatchKind::Substring, "===========Thinker:", "Sorry."},
                                 {llm::MatchKind::Substring, "creative strategies", "no decision here"}}));
    Session s;
    const auto r = h.ask(s, "How to improve my sleep?");
    CHECK(r.trace.outcome == "planning_failed");
    CHECK(r.trace.thinker_prompt.find(std::string(kApologyDirective)) != std::string::npos);
    CHECK(r.answer == "Sorry.");
  }

  TEST_CASE("backend failure yields the fixed apology") {
    Harness h(testing::scripted({{llm::MatchKind::Substring, "never matches", "x"}}));
    Session s;
    const auto r = h.ask(s, "How to improve my sleep?");
    CHECK(r.trace.outcome.rfind("backend_error", 0) == 0);
    CHECK(r.answer == kBackendFailureAnswer);
    CHECK(s.history.size() == 1);
  }

  TEST_CASE("a failed step is shown to the next planner round") {
    Harness h(testing::scripted(
        {{llm::MatchKind::Substring, "===========Thinker:", "No data for that patient."},
         {llm::MatchKind::Substring, "FAILED: UnknownPatient", "Final Answer: patient does not exist"},
         {llm::MatchKind::Substring, "skilled Python",
          "```python\nd = self.execute_task('affect_sleep_get', ['par_99', '2020-08-01', ''])\n```"},
         {llm::MatchKind::Substring, "creative strategies", "Decision: fetch sleep"}}));
    Session s;
    const auto r = h.ask(s, "How did par_99 sleep?");
    REQUIRE(r.trace.iterations.size() == 2);
    CHECK(r.trace.iterations[0].status == "failed_step");
    CHECK(r.trace.iterations[1].status == "finished");
    CHECK(r.trace.tasks_used.empty());
  }

  TEST_CASE("config guard") {
    OrchestratorConfig cfg;
    cfg.max_iterations = 0;
    CHECK_THROWS_AS(Harness(sleep_fixture(), cfg), Error);
  }
}
