#include <doctest.h>

#include "cha/executor.hpp"
#include "test_support.hpp"

using namespace cha;

namespace {

TaskSpec spec(std::string name, std::size_t inputs, bool to_pipe) {
  return TaskSpec{name, name + "_chat", "d", {}, std::vector<std::string>(inputs, "in"), {"out"}, to_pipe};
}

}  // namespace

TEST_SUITE("executor") {
  TEST_CASE("sleep plan runs against the offline search and pages") {
    const auto registry = testing::demo_registry({"google_search", "extract_text"});
    DataPipe pipe;
    const auto p = plan::validate_plan(plan::parse_plan(testing::kSleepPlanCode), registry);
    const auto out = run_plan(p, registry, pipe);
    REQUIRE(out.completed());
    REQUIRE(out.records.size() == 2);
    CHECK(out.records[0].task_name == "google_search");
    CHECK(out.records[0].chat_name == "GoogleSearch");
    CHECK(out.records[0].rendered_inputs == std::vector<std::string>{"tips to improve sleep"});
    CHECK(out.records[0].rendered_output ==
          "{'url': 'https://www.mayoclinic.org/healthy-lifestyle/adult-health/in-depth/sleep/art-20048379'}");
    CHECK(out.records[1].rendered_output.rfind("Sleep tips: 6 steps to better sleep", 0) == 0);
    CHECK(out.records[1].step_index == 1);
    CHECK(out.bindings.at("url") ==
          "https://www.mayoclinic.org/healthy-lifestyle/adult-health/in-depth/sleep/art-20048379");
    CHECK(pipe.size() == 0);
  }

  TEST_CASE("stress chain keeps intermediate payloads in the pipe") {
    const auto registry = testing::demo_registry();
    DataPipe pipe;
    const auto p = plan::validate_plan(plan::parse_plan(testing::kStressPlanCode), registry);
    const auto out = run_plan(p, registry, pipe);
    REQUIRE(out.completed());
    REQUIRE(out.records.size() == 3);
    CHECK(is_datapipe_reference(out.records[0].rendered_output));
    CHECK(is_datapipe_reference(out.records[1].rendered_output));
    CHECK(out.records[1].rendered_inputs == std::vector<std::string>{out.records[0].rendered_output});
    CHECK_FALSE(is_datapipe_reference(out.records[2].rendered_output));
    CHECK(pipe.size() == 2);
    const Json stress = out.bindings.at("stress_level_result");
    CHECK(stress.at("level").get<int>() >= 0);
    CHECK(stress.at("level").get<int>() <= 4);
  }

  TEST_CASE("a failing task stops the run and is recorded") {
    TaskRegistry registry;
    int calls = 0;
    registry.register_task(spec("ok", 1, false), [&](std::span<const Json> a) {
      ++calls;
      return TaskOutput{a[0], {}};
    });
    registry.register_task(spec("boom", 1, false), [](std::span<const Json>) -> TaskOutput {
      throw Error(Errc::EmptyInput, "nothing there");
    });
    DataPipe pipe;
    const auto p = plan::validate_plan(
        plan::parse_plan("a = self.execute_task('ok', ['x'])\n"
                         "b = self.execute_task('boom', [a])\n"
                         "c = self.execute_task('ok', [b])"),
        registry);
    const auto out = run_plan(p, registry, pipe);
    REQUIRE_FALSE(out.completed());
    CHECK(out.failure->step_index == 1);
    CHECK(out.failure->code == Errc::EmptyInput);
    REQUIRE(out.records.size() == 2);
    CHECK(out.records[1].failed);
    CHECK(calls == 1);
  }

  TEST_CASE("missing fields are reported, not thrown") {
    TaskRegistry registry;
    registry.register_task(spec("t", 1, false), [](std::span<const Json>) { return TaskOutput{Json{{"a", 1}}, {}}; });
    DataPipe pipe;
    const auto p = plan::validate_plan(
        plan::parse_plan("r = self.execute_task('t', ['x'])\nv = r['missing']"), registry);
    const auto out = run_plan(p, registry, pipe);
    REQUIRE(out.failure);
    CHECK(out.failure->code == Errc::FieldMissing);
    CHECK(out.failure->step_index == 1);
  }

  TEST_CASE("fields of piped payloads stay symbolic in records") {
    TaskRegistry registry;
    registry.register_task(spec("produce", 1, true),
                           [](std::span<const Json>) { return TaskOutput{Json{{"secret", "s3cr3t"}}, {}}; });
    registry.register_task(spec("consume", 1, false),
                           [](std::span<const Json> a) { return TaskOutput{Json(a[0].get<std::string>().size()), {}}; });
    DataPipe pipe;
    const auto p = plan::validate_plan(
        plan::parse_plan("r = self.execute_task('produce', ['x'])\n"
                         "n = self.execute_task('consume', [r['secret']])"),
        registry);
    const auto out = run_plan(p, registry, pipe);
    REQUIRE(out.completed());
    CHECK(out.records[1].rendered_inputs[0] == out.records[0].rendered_output + "['secret']");
    CHECK(out.records[1].rendered_output == "6");
    for (const auto& r : out.records) {
      CHECK(r.rendered_output.find("s3cr3t") == std::string::npos);
      for (const auto& in : r.rendered_inputs) CHECK(in.find("s3cr3t") == std::string::npos);
    }
  }

  TEST_CASE("previous actions text for a three record chain") {
    const std::vector<ActionRecord> records = {
        {"affect_ppg_get", "AffectPPGGet", {"par_5", "2020-08-01", "2020-08-31"},
         "datapipe:11111111-1111-4111-8111-111111111111", 0, {}, false},
        {"affect_ppg_analysis", "AffectPPGAnalysis", {"datapipe:11111111-1111-4111-8111-111111111111"},
         "datapipe:22222222-2222-4222-8222-222222222222", 1, {}, false},
        {"affect_stress_analysis", "AffectStressAnalysis", {"datapipe:22222222-2222-4222-8222-222222222222"},
         "{'level': 3}", 2, {}, false},
    };
    // Written out by hand from the response-generator table layout.
    const std::string expected =
        "------------------\n\n"
        "affect_ppg_get: ['par_5', '2020-08-01', '2020-08-31']\n\n"
        "datapipe:11111111-1111-4111-8111-111111111111\n\n"
        "------------------\n\n"
        "------------------\n\n"
        "affect_ppg_analysis: ['datapipe:11111111-1111-4111-8111-111111111111']\n\n"
        "datapipe:22222222-2222-4222-8222-222222222222\n\n"
        "------------------\n\n"
        "------------------\n\n"
        "affect_stress_analysis: ['datapipe:22222222-2222-4222-8222-222222222222']\n\n"
        "{'level': 3}\n\n"
        "------------------\n\n";
    CHECK(format_previous_actions(records) == expected);
    CHECK(format_previous_actions({}).empty());
  }

  TEST_CASE("action record JSON round trip") {
    ActionRecord r{"t", "T", {"a"}, "o", 4, std::chrono::microseconds(12), true};
    CHECK(action_record_from_json(to_json(r)) == r);
  }

  TEST_CASE("metadata descriptors") {
    CHECK(describe_metadata({"image", "datapipe:x", "a cat"}) == "image: datapipe:x (a cat)");
    CHECK(describe_metadata({"", "datapipe:x", ""}) == "file: datapipe:x");
  }
}
