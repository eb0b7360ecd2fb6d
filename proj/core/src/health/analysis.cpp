#include "cha/health/analysis.hpp"

#include <cmath>
#include <map>
#include <span>
#include <vector>

#include "cha/error.hpp"
#include "cha/health/records.hpp"

namespace cha::health {

namespace {

double day_of(const Json& row, std::size_t index) {
  if (!row.contains("date")) return static_cast<double>(index);
  const Json& d = row.at("date");
  if (d.is_string()) return static_cast<double>(parse_date(d.get<std::string>()).time_since_epoch().count());
  if (d.is_number()) return d.get<double>() / 86'400'000.0;
  return static_cast<double>(index);
}

Json as_record_list(const Json& records) {
  if (records.is_string()) {
    Json parsed = Json::parse(records.get<std::string>(), nullptr, false);
    if (parsed.is_discarded()) throw Error(Errc::InvalidArgument, "records must be a list of records");
    return as_record_list(parsed);
  }
  if (records.is_object()) return Json::array({records});
  if (!records.is_array()) throw Error(Errc::InvalidArgument, "records must be a list of records");
  return records;
}

}  // namespace

AnalysisMode parse_analysis_mode(std::string_view text) {
  const std::string mode = to_lower(trim(text));
  if (mode == "average" || mode == "mean") return AnalysisMode::Average;
  if (mode == "sum" || mode == "total") return AnalysisMode::Sum;
  if (mode == "trend") return AnalysisMode::Trend;
  throw Error(Errc::UnknownMode, "mode must be average, sum or trend, got '" + std::string(text) + "'");
}

Trend fit_trend(std::span<const double> x, std::span<const double> y) {
  if (x.empty() || x.size() != y.size()) throw Error(Errc::EmptyInput, "trend needs at least one point");
  const double n = static_cast<double>(x.size());
  double xm = 0, ym = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xm += x[i];
    ym += y[i];
  }
  xm /= n;
  ym /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - xm) * (y[i] - ym);
    sxx += (x[i] - xm) * (x[i] - xm);
  }
  Trend t;
  t.slope_per_day = sxx > 0 ? sxy / sxx : 0.0;
  t.direction = std::abs(t.slope_per_day) <= kFlatEpsilon ? "flat"
                : t.slope_per_day > 0                     ? "increasing"
                                                          : "decreasing";
  return t;
}

Json analyze_records(const Json& input, AnalysisMode mode) {
  const Json records = as_record_list(input);
  if (records.empty() && mode != AnalysisMode::Sum) {
    throw Error(Errc::EmptyInput, "no records to analyse");
  }

  // Field order follows first appearance so output is stable.
  std::vector<std::string> order;
  std::map<std::string, std::vector<std::pair<double, double>>> series;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const Json& row = records[i];
    if (!row.is_object()) throw Error(Errc::InvalidArgument, "record " + std::to_string(i) + " is not an object");
    const double x = mode == AnalysisMode::Trend ? day_of(row, i) : 0.0;
    for (const auto& [key, value] : row.items()) {
      if (key == "date" || !value.is_number()) continue;
      auto [it, fresh] = series.try_emplace(key);
      if (fresh) order.push_back(key);
      it->second.emplace_back(x, value.get<double>());
    }
  }

  Json fields = Json::object();
  for (const auto& key : order) {
    const auto& points = series.at(key);
    if (mode == AnalysisMode::Trend) {
      std::vector<double> xs, ys;
      for (const auto& [x, y] : points) {
        xs.push_back(x);
        ys.push_back(y);
      }
      const Trend t = fit_trend(xs, ys);
      fields[key] = {{"slope_per_day", t.slope_per_day}, {"direction", t.direction}};
      continue;
    }
    double sum = 0;
    for (const auto& p : points) sum += p.second;
    fields[key] = mode == AnalysisMode::Sum ? sum : sum / static_cast<double>(points.size());
  }
  const char* name = mode == AnalysisMode::Average ? "average" : mode == AnalysisMode::Sum ? "sum" : "trend";
  Json out{{"mode", name}, {"count", records.size()}, {"fields", std::move(fields)}};
  if (!records.empty() && records.front().contains("date") && records.front().at("date").is_string()) {
    out["from"] = records.front().at("date");
    out["to"] = records.back().at("date");
  }
  return out;
}

}  // namespace cha::health
