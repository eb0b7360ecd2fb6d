#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "cha/health/records.hpp"
#include "cha/health/stress.hpp"
#include "cha/health/web.hpp"
#include "cha/task.hpp"

namespace cha::health {

/// Everything the demo task bodies close over. Any pointer may be null if
/// the tasks that need it are not registered.
struct HealthLibrary {
  std::shared_ptr<const HealthDataset> dataset;
  std::shared_ptr<SearchClient> search;
  std::shared_ptr<PageFetcher> fetcher;
  std::size_t text_budget = kDefaultTextBudget;
  StressModel stress = StressModel::fixture_default();
};

// Specs in canonical registration order.
TaskSpec google_search_spec();
TaskSpec extract_text_spec();
TaskSpec affect_sleep_get_spec();
TaskSpec affect_activity_get_spec();
TaskSpec affect_analysis_spec();
TaskSpec affect_ppg_get_spec();
TaskSpec affect_ppg_analysis_spec();
TaskSpec affect_stress_analysis_spec();

std::vector<TaskSpec> health_task_specs();

/// Bodies keyed by task name, for load_task_manifest.
std::map<std::string, TaskBody, std::less<>> health_task_bodies(const HealthLibrary& lib);

/// Registers the named tasks (all eight when `names` is empty) in canonical
/// order. Throws ConfigError when a needed collaborator is missing.
void register_health_tasks(TaskRegistry& registry, const HealthLibrary& lib,
                           std::span<const std::string> names = {});

}  // namespace cha::health
