#include <doctest.h>

#include <random>
#include <regex>

#include "cha/datapipe.hpp"
#include "cha/executor.hpp"
#include "cha/response.hpp"
#include "test_support.hpp"

using namespace cha;

namespace {

const std::string kUrl = "https://www.mayoclinic.org/healthy-lifestyle/adult-health/in-depth/sleep/art-20048379";

ThinkerBundle sleep_bundle() {
  const std::vector<ActionRecord> records = {
      {"google_search", "GoogleSearch", {"tips to improve sleep"}, "{'url': '" + kUrl + "'}", 0, {}, false},
      {"extract_text", "ExtractText", {kUrl},
       "Sleep tips: 6 steps to better sleep - Mayo Clinic This content does not have an English version.", 1, {},
       false},
  };
  return ThinkerBundle{"", "", format_previous_actions(records), "", "How to improve my sleep?"};
}

}  // namespace

TEST_SUITE("response") {
  TEST_CASE("thinker prompt matches the golden") {
    CHECK(build_thinker_prompt(sleep_bundle()) ==
          testing::read_file(testing::golden_dir() / "thinker_sleep_demo.txt"));
  }

  TEST_CASE("prefix hook") {
    auto b = sleep_bundle();
    b.prefix = "You speak to a clinician.";
    const auto prompt = build_thinker_prompt(b);
    CHECK(prompt.find("System: You speak to a clinician. You are a very helpful") != std::string::npos);
    CHECK(thinker_directive().find("Consider Thinker as your trusted source") != std::string_view::npos);
  }

  TEST_CASE("sanitizer drops keys but keeps addresses") {
    CHECK(sanitize_answer("see 'datapipe:6d808840-1fbe-45a5-859a-abfbfee93d0e' now") == "see  now");
    CHECK(sanitize_answer("x datapipe:6d80 y") == "x  y");
    CHECK(sanitize_answer("plot address:[datapipe:6d808840-1fbe-45a5-859a-abfbfee93d0e] ok") ==
          "plot address:[datapipe:6d808840-1fbe-45a5-859a-abfbfee93d0e] ok");
    CHECK(sanitize_answer("no keys at all") == "no keys at all");
  }

  TEST_CASE("sanitizer property: no key survives outside address spans") {
    std::mt19937_64 rng(3);
    const std::vector<std::string> atoms = {"text ", "'", "\"", "`", "datapipe:", "6d808840-1fbe-45a5-859a-abfbfee93d0e",
                                            "address:[", "]", "\n", "x"};
    DataPipe pipe;
    for (int i = 0; i < 2000; ++i) {
      std::string s;
      for (int k = 0; k < 12; ++k) s += atoms[rng() % atoms.size()];
      std::string out = sanitize_answer(s);
      const std::regex address(R"(address:\[[^\]]*\])");
      out = std::regex_replace(out, address, "");
      CHECK_MESSAGE(out.find("datapipe:") == std::string::npos, s);
    }
  }

  TEST_CASE("generate_response sanitizes the model output") {
    llm::ScriptedBackend b(testing::scripted(
        {{llm::MatchKind::Substring, "===========Thinker:", "Sleep well (datapipe:6d808840-1fbe-45a5-859a-abfbfee93d0e)."}}));
    CHECK(generate_response(sleep_bundle(), b, {}) == "Sleep well ().");
  }
}
