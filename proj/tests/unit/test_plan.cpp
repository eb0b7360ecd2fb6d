#include <doctest.h>

#include <random>

#include "cha/plan.hpp"
#include "test_support.hpp"

using namespace cha;
using namespace cha::plan;

namespace {

PlanError plan_error(std::string_view code) {
  try {
    (void)parse_plan(code);
  } catch (const PlanError& e) {
    return e;
  }
  FAIL("expected a PlanError for: " << code);
  return PlanError(Errc::SyntaxError, "");
}

}  // namespace

TEST_SUITE("plan") {
  TEST_CASE("sleep sample parses to four bindings") {
    const Plan p = parse_plan(testing::kSleepPlanCode);
    REQUIRE(p.steps.size() == 4);
    CHECK(p.steps[0] == Step{"search_query", LiteralBind{"tips to improve sleep"}});
    CHECK(p.steps[1] == Step{"search_result", TaskCall{"google_search", {VariableRef{"search_query"}}}});
    CHECK(p.steps[2] == Step{"url", FieldExtract{"search_result", "url"}});
    CHECK(p.steps[3] == Step{"sleep_tips_text", TaskCall{"extract_text", {VariableRef{"url"}}}});
    CHECK(p.steps[3].line == 9);
    CHECK(p.task_call_count() == 2);
  }

  TEST_CASE("stress sample parses and validates against the demo registry") {
    const auto registry = testing::demo_registry();
    const Plan p = validate_plan(parse_plan(testing::kStressPlanCode), registry);
    CHECK(p.validated);
    REQUIRE(p.steps.size() == 3);
    const auto& first = std::get<TaskCall>(p.steps[0].action);
    CHECK(first.args == std::vector<Argument>{StringLiteral{"par_5"}, StringLiteral{"2020-08-01"},
                                              StringLiteral{"2020-08-31"}});
  }

  TEST_CASE("canonical rendering") {
    const Plan p = parse_plan(testing::kSleepPlanCode);
    CHECK(render_canonical(p) ==
          "search_query = 'tips to improve sleep'\n"
          "search_result = self.execute_task('google_search', [search_query])\n"
          "url = search_result['url']\n"
          "sleep_tips_text = self.execute_task('extract_text', [url])\n");
    CHECK(render_step(Step{"q", LiteralBind{"it's"}}) == "q = \"it's\"");
  }

  TEST_CASE("grammar extras") {
    const Plan p = parse_plan("a = 'x\\ty'\nb = a\nc = self.execute_task('t', [a, b['k'],\n 'z',])\n");
    REQUIRE(p.steps.size() == 3);
    CHECK(std::get<LiteralBind>(p.steps[0].action).value == "x\ty");
    CHECK(std::get<AliasBind>(p.steps[1].action).source == "a");
    CHECK(std::get<TaskCall>(p.steps[2].action).args.size() == 3);
    CHECK(parse_plan("").steps.empty());
  }

  TEST_CASE("positioned syntax errors") {
    auto e = plan_error("x = self.execute_task('t', 'not a list')");
    CHECK(e.code() == Errc::SyntaxError);
    CHECK(e.line() == 1);
    CHECK(e.column() == 28);

    e = plan_error("a = 'ok'\nimport os");
    CHECK(e.code() == Errc::SyntaxError);
    CHECK(e.line() == 2);

    CHECK(plan_error("x = 'open").code() == Errc::SyntaxError);
    CHECK(plan_error("x = 1 + 2").code() == Errc::SyntaxError);
    CHECK(plan_error("x = y").code() == Errc::UseBeforeDefine);
    CHECK(plan_error("x = self.run('t', [])").code() == Errc::SyntaxError);
    CHECK(plan_error("for = 'x'").code() == Errc::SyntaxError);
    CHECK(plan_error("x = eval('1')").code() == Errc::SyntaxError);
  }

  TEST_CASE("validation against the registry") {
    const auto registry = testing::demo_registry({"google_search", "extract_text"});
    auto code_of = [&](std::string_view code) {
      try {
        (void)validate_plan(parse_plan(code), registry);
      } catch (const PlanError& e) {
        return e.code();
      }
      return Errc::InvalidArgument;
    };
    CHECK(code_of("r = self.execute_task('nope', ['x'])") == Errc::UnknownTask);
    CHECK(code_of("r = self.execute_task('google_search', ['x', 'y'])") == Errc::ArityMismatch);
    CHECK(code_of("a = 'x'\nb = a") == Errc::NoTaskCall);
    try {
      (void)validate_plan(parse_plan("a = 'q'\nr = self.execute_task('google_search', [])"), registry);
    } catch (const PlanError& e) {
      CHECK(e.step() == 1);
    }
  }

  TEST_CASE("code block extraction") {
    CHECK(extract_code_block("text\n```python\nx = 'a'\n```\nmore") == "x = 'a'");
    CHECK(extract_code_block("```\ny = 'b'\n```") == "y = 'b'");
    CHECK(extract_code_block("```json\n{}\n```\n```python\nz = 'c'\n```") == "z = 'c'");
    CHECK(extract_code_block("  w = 'd'  ") == "w = 'd'");
    CHECK_THROWS_AS(extract_code_block("```python\n# only a comment\n```"), PlanError);
  }

  TEST_CASE("round trip over random plans") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 300; ++i) {
      const Plan p = testing::random_plan(rng);
      const std::string text = render_canonical(p);
      const Plan back = parse_plan(text);
      REQUIRE_MESSAGE(back == p, text);
      CHECK(render_canonical(back) == text);
    }
  }

  TEST_CASE("random noise only ever raises plan errors") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 5000; ++i) {
      const std::string noise = testing::random_plan_noise(rng, 80);
      try {
        (void)parse_plan(noise);
        (void)extract_code_block(noise);
      } catch (const PlanError&) {
      }
    }
  }
}
