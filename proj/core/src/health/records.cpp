#include "cha/health/records.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <regex>

#include "cha/error.hpp"

namespace cha::health {

namespace {

using namespace std::chrono;

int digits(std::string_view s, std::string_view whole) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw Error(Errc::BadDate, "'" + std::string(whole) + "' is not in %Y-%m-%d format");
  }
  return value;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? comma : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double number(std::string_view field, const std::filesystem::path& file, int lineno) {
  field = trim(field);
  double value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw Error(Errc::StorageFailure, file.string() + ":" + std::to_string(lineno) +
                                          ": bad number '" + std::string(field) + "'");
  }
  return value;
}

// Calls `row` for every data line (header skipped) with its fields.
template <typename F>
void read_csv(const std::filesystem::path& file, std::size_t columns, F row) {
  std::ifstream in(file);
  if (!in) return;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1 || trim(line).empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != columns) {
      throw Error(Errc::StorageFailure, file.string() + ":" + std::to_string(lineno) + ": expected " +
                                            std::to_string(columns) + " columns");
    }
    row(fields, lineno);
  }
}

template <typename T>
std::vector<T> in_range(const std::vector<T>& rows, const DateRange& range) {
  std::vector<T> out;
  for (const auto& r : rows) {
    if (r.date >= range.first && r.date <= range.last) out.push_back(r);
  }
  return out;
}

}  // namespace

sys_days parse_date(std::string_view text) {
  const auto t = trim(text);
  if (t.size() != 10 || t[4] != '-' || t[7] != '-') {
    throw Error(Errc::BadDate, "'" + std::string(text) + "' is not in %Y-%m-%d format");
  }
  const year_month_day ymd{year{digits(t.substr(0, 4), text)},
                           month{static_cast<unsigned>(digits(t.substr(5, 2), text))},
                           day{static_cast<unsigned>(digits(t.substr(8, 2), text))}};
  if (!ymd.ok()) throw Error(Errc::BadDate, "'" + std::string(text) + "' is not a calendar date");
  return sys_days{ymd};
}

std::string format_date(sys_days d) {
  const year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

DateRange parse_range(std::string_view start, std::string_view end) {
  const auto first = parse_date(start);
  if (trim(end).empty()) return {first, first};
  const auto last = parse_date(end);
  if (last < first) {
    throw Error(Errc::BadDate, "end date " + std::string(end) + " precedes start " + std::string(start));
  }
  return {first, last};
}

Json to_json(const SleepRecord& r) {
  return Json{{"date", format_date(r.date)},         {"total_sleep_min", r.total_sleep_min},
              {"rem_min", r.rem_min},                {"deep_min", r.deep_min},
              {"light_min", r.light_min},            {"efficiency", r.efficiency}};
}

Json to_json(const ActivityRecord& r) {
  return Json{{"date", format_date(r.date)}, {"steps", r.steps}, {"active_min", r.active_min}};
}

Json to_json(const PpgSample& s) { return Json{{"date", s.date_ms}, {"ppg", s.ppg}, {"hr", s.hr}}; }

PpgSample ppg_sample_from_json(const Json& j) {
  return PpgSample{j.at("date").get<std::int64_t>(), j.at("ppg").get<double>(), j.value("hr", 0.0)};
}

HealthDataset::HealthDataset(std::filesystem::path root) : root_(std::move(root)) {}

const HealthDataset::PatientData& HealthDataset::patient(std::string_view id) const {
  static const std::regex pattern("par_[0-9]+");
  if (!std::regex_match(id.begin(), id.end(), pattern)) {
    throw Error(Errc::UnknownPatient, "'" + std::string(id) + "' is not of the form par_<number>");
  }
  std::lock_guard lock(mutex_);
  if (const auto it = cache_.find(id); it != cache_.end()) return it->second;

  const auto dir = root_ / std::string(id);
  if (!std::filesystem::is_directory(dir)) throw Error(Errc::UnknownPatient, std::string(id));

  PatientData data;
  read_csv(dir / "sleep.csv", 6, [&](const auto& f, int n) {
    data.sleep.push_back({parse_date(f[0]), number(f[1], dir, n), number(f[2], dir, n),
                          number(f[3], dir, n), number(f[4], dir, n), number(f[5], dir, n)});
  });
  read_csv(dir / "activity.csv", 3, [&](const auto& f, int n) {
    data.activity.push_back({parse_date(f[0]), number(f[1], dir, n), number(f[2], dir, n)});
  });
  read_csv(dir / "ppg.csv", 3, [&](const auto& f, int n) {
    data.ppg.push_back({static_cast<std::int64_t>(number(f[0], dir, n)), number(f[1], dir, n),
                        number(f[2], dir, n)});
  });
  std::sort(data.ppg.begin(), data.ppg.end(),
            [](const PpgSample& a, const PpgSample& b) { return a.date_ms < b.date_ms; });
  return cache_.emplace(std::string(id), std::move(data)).first->second;
}

std::vector<SleepRecord> HealthDataset::sleep(std::string_view id, const DateRange& range) const {
  return in_range(patient(id).sleep, range);
}

std::vector<ActivityRecord> HealthDataset::activity(std::string_view id, const DateRange& range) const {
  return in_range(patient(id).activity, range);
}

std::vector<PpgSample> HealthDataset::ppg(std::string_view id, const DateRange& range) const {
  const auto& rows = patient(id).ppg;
  const auto from = duration_cast<milliseconds>(range.first.time_since_epoch()).count();
  const auto to = duration_cast<milliseconds>((range.last + days{1}).time_since_epoch()).count();
  const auto lo = std::lower_bound(rows.begin(), rows.end(), from,
                                   [](const PpgSample& s, std::int64_t t) { return s.date_ms < t; });
  const auto hi = std::lower_bound(lo, rows.end(), to,
                                   [](const PpgSample& s, std::int64_t t) { return s.date_ms < t; });
  return {lo, hi};
}

}  // namespace cha::health
