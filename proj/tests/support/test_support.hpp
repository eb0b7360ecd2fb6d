#pragma once

#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "cha/config.hpp"
#include "cha/error.hpp"
#include "cha/health/library.hpp"
#include "cha/llm.hpp"
#include "cha/plan.hpp"
#include "cha/task.hpp"

namespace cha::testing {

// Plan code as printed in the sample-prompt tables: the sleep search and
// the PPG stress chain.
inline constexpr std::string_view kSleepPlanCode =
    "# Step 1: Use google_search to find the top websites with tips to improve sleep.\n"
    "\n"
    "search_query = \"tips to improve sleep\"\n"
    "search_result = self.execute_task('google_search', [search_query])\n"
    "\n"
    "# Step 2: Use extract_text to extract the relevant information about improving sleep from the webpage.\n"
    "url = search_result['url']\n"
    "\n"
    "sleep_tips_text = self.execute_task('extract_text', [url])";

inline constexpr std::string_view kStressPlanCode =
    "# Step 1: Get PPG data for patient 5 for the entire month of August 2020\n"
    "\n"
    "ppg_data_result = self.execute_task('affect_ppg_get', ['par_5', '2020-08-01', '2020-08-31'])\n"
    "\n"
    "# Step 2: Analyze the HRV parameters from the obtained PPG data\n"
    "\n"
    "hrv_analysis_result = self.execute_task('affect_ppg_analysis', [ppg_data_result])\n"
    "\n"
    "# Step 3: Estimate the stress level for patient 5 during August 2020 using the HRV analysis results\n"
    "\n"
    "stress_level_result = self.execute_task('affect_stress_analysis', [hrv_analysis_result])";

// Code of the cha::Error thrown by `fn`, or nullopt when it returns normally.
template <class F>
std::optional<Errc> errc_of(F&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

std::filesystem::path source_dir();
std::filesystem::path data_dir();
std::filesystem::path fixtures_dir();
std::filesystem::path golden_dir();

std::string read_file(const std::filesystem::path& path);

// Health library over the bundled offline data, search map and pages.
health::HealthLibrary demo_library();

// Registry holding the named demo tasks (all of them when empty).
TaskRegistry demo_registry(const std::vector<std::string>& names = {});

// Offline engine config: scripted planner over `fixture`, stub translator,
// bundled data. No persistence, no auth.
EngineConfig demo_config(const std::filesystem::path& fixture);

llm::ScriptedFixture scripted(std::vector<llm::FixtureEntry> entries);

// Random well-formed plan: 1..12 steps, every reference defined earlier,
// string literals drawn from a hostile alphabet (quotes, backslashes,
// newlines, UTF-8).
plan::Plan random_plan(std::mt19937_64& rng);

// Random bytes biased toward plan-notation tokens.
std::string random_plan_noise(std::mt19937_64& rng, std::size_t max_len);

// Textbook HRV statistics computed directly from their definitions, in
// long double, as an independent oracle for the production code.
struct BruteHrv {
  double mean_nn, sdnn, rmssd, pnn50, mean_hr;
};
BruteHrv brute_hrv(const std::vector<double>& nn_ms);

// Gaussian pulses (width 40 ms) at the given beat times, sampled at `fs`
// from t = 0 for `seconds`, timestamps starting at `t0_ms`.
std::vector<health::PpgSample> synth_ppg(const std::vector<double>& beat_times_s, double fs, double seconds,
                                         std::int64_t t0_ms = 1596276000000);

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace cha::testing
