#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cha/text.hpp"

namespace cha::health {

struct SleepRecord {
  std::chrono::sys_days date;
  double total_sleep_min = 0;
  double rem_min = 0;
  double deep_min = 0;
  double light_min = 0;
  double efficiency = 0;  // 0..1
};

struct ActivityRecord {
  std::chrono::sys_days date;
  double steps = 0;
  double active_min = 0;
};

struct PpgSample {
  std::int64_t date_ms = 0;  // epoch milliseconds
  double ppg = 0;
  double hr = 0;  // beats per minute, 0 when absent
};

// Strict "%Y-%m-%d". Throws BadDate.
std::chrono::sys_days parse_date(std::string_view text);
std::string format_date(std::chrono::sys_days day);

struct DateRange {
  std::chrono::sys_days first;
  std::chrono::sys_days last;  // inclusive
};

// Empty `end` means the single day `start`. Throws BadDate.
DateRange parse_range(std::string_view start, std::string_view end);

Json to_json(const SleepRecord& r);
Json to_json(const ActivityRecord& r);
Json to_json(const PpgSample& s);
PpgSample ppg_sample_from_json(const Json& j);

/// Per-patient CSV files under `<root>/<patient_id>/{sleep,activity,ppg}.csv`,
/// each with a header row. Files are read once and cached.
class HealthDataset {
 public:
  explicit HealthDataset(std::filesystem::path root);

  std::vector<SleepRecord> sleep(std::string_view patient, const DateRange& range) const;
  std::vector<ActivityRecord> activity(std::string_view patient, const DateRange& range) const;
  std::vector<PpgSample> ppg(std::string_view patient, const DateRange& range) const;

  const std::filesystem::path& root() const noexcept { return root_; }

 private:
  struct PatientData {
    std::vector<SleepRecord> sleep;
    std::vector<ActivityRecord> activity;
    std::vector<PpgSample> ppg;
  };

  const PatientData& patient(std::string_view id) const;

  std::filesystem::path root_;
  mutable std::mutex mutex_;
  mutable std::map<std::string, PatientData, std::less<>> cache_;
};

}  // namespace cha::health
