#include <benchmark/benchmark.h>

#include <random>

#include "cha/datapipe.hpp"
#include "cha/health/hrv.hpp"
#include "cha/health/library.hpp"
#include "cha/health/records.hpp"
#include "cha/plan.hpp"
#include "cha/planner.hpp"

namespace {

constexpr const char* kStressPlan =
    "# Step 1: Get PPG data for patient 5 for the entire month of August 2020\n"
    "ppg_data_result = self.execute_task('affect_ppg_get', ['par_5', '2020-08-01', '2020-08-31'])\n"
    "hrv_analysis_result = self.execute_task('affect_ppg_analysis', [ppg_data_result])\n"
    "stress_level_result = self.execute_task('affect_stress_analysis', [hrv_analysis_result])\n";

std::vector<double> random_nn(std::size_t n) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> d(820.0, 40.0);
  std::vector<double> nn(n);
  for (double& v : nn) v = d(rng);
  return nn;
}

void BM_ParsePlan(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(cha::plan::parse_plan(kStressPlan));
}
BENCHMARK(BM_ParsePlan);

void BM_RenderCanonical(benchmark::State& state) {
  const auto plan = cha::plan::parse_plan(kStressPlan);
  for (auto _ : state) benchmark::DoNotOptimize(cha::plan::render_canonical(plan));
}
BENCHMARK(BM_RenderCanonical);

void BM_DataPipeStoreRetrieve(benchmark::State& state) {
  cha::DataPipe pipe;
  const cha::Json payload{{"rmssd", 10.8}, {"sdnn", 20.1}};
  for (auto _ : state) {
    const auto ref = pipe.store(payload, "bench");
    benchmark::DoNotOptimize(pipe.retrieve(ref));
  }
}
BENCHMARK(BM_DataPipeStoreRetrieve);

void BM_HrvFeatures(benchmark::State& state) {
  const auto nn = random_nn(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(cha::health::hrv_features(nn));
}
BENCHMARK(BM_HrvFeatures)->Arg(64)->Arg(256)->Arg(1000);

void BM_LfHfPower(benchmark::State& state) {
  const auto nn = random_nn(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(cha::health::lf_hf_power(nn));
}
BENCHMARK(BM_LfHfPower)->Arg(75)->Arg(300);

void BM_AnalyzeOneDayOfPpg(benchmark::State& state) {
  const cha::health::HealthDataset data(std::filesystem::path(CHA_SOURCE_DIR) / "data");
  const auto samples = data.ppg("par_5", cha::health::parse_range("2020-08-29", ""));
  for (auto _ : state) benchmark::DoNotOptimize(cha::health::analyze_ppg(samples));
}
BENCHMARK(BM_AnalyzeOneDayOfPpg);

void BM_Stage1Prompt(benchmark::State& state) {
  cha::health::HealthLibrary lib;
  lib.dataset = std::make_shared<cha::health::HealthDataset>(".");
  cha::TaskRegistry registry;
  const std::vector<std::string> names{"affect_sleep_get", "affect_activity_get", "affect_analysis",
                                       "affect_ppg_get", "affect_ppg_analysis", "affect_stress_analysis"};
  cha::health::register_health_tasks(registry, lib, names);
  cha::PlannerContext ctx;
  ctx.registry = &registry;
  ctx.question = "What is the stress level of patient 5 in August 2020?";
  ctx.history = "USER: hi\nCHA: hello";
  for (auto _ : state) benchmark::DoNotOptimize(cha::build_stage1_prompt(ctx));
}
BENCHMARK(BM_Stage1Prompt);

}  // namespace

BENCHMARK_MAIN();
