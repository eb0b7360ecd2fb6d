#pragma once

#include <span>
#include <string>
#include <string_view>

#include "cha/text.hpp"

namespace cha::health {

enum class AnalysisMode { Average, Sum, Trend };

// Throws UnknownMode.
AnalysisMode parse_analysis_mode(std::string_view text);

// A slope whose magnitude is at most this (units per day) is labelled "flat".
inline constexpr double kFlatEpsilon = 1e-3;

struct Trend {
  double slope_per_day = 0;
  std::string direction;  // increasing | decreasing | flat
};

/// Least-squares slope of y over x. Throws EmptyInput on no points.
Trend fit_trend(std::span<const double> x, std::span<const double> y);

/// Per-field statistics over a list of flat records. Every numeric field is
/// analysed; a "date" field (either "%Y-%m-%d" or epoch ms) is the trend axis,
/// falling back to the row index. A JSON string holding such a list is accepted.
/// Throws EmptyInput (average/trend on no records), UnknownMode, InvalidArgument.
Json analyze_records(const Json& records, AnalysisMode mode);

}  // namespace cha::health
