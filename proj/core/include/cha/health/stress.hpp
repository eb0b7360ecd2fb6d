#pragma once

#include <array>
#include <string>

#include "cha/health/hrv.hpp"

namespace cha::health {

inline constexpr std::array<std::string_view, 5> kStressLabels = {"very low", "low", "moderate", "high",
                                                                  "very high"};

struct StressModel {
  struct Norm {
    double mean;
    double std;
  };
  // Order: rmssd, sdnn, lf_hf.
  std::array<double, 3> weights{-0.4, -0.3, 0.3};
  std::array<Norm, 3> norms{};
  // score < edges[0] -> level 0, ..., score >= edges[3] -> level 4.
  std::array<double, 4> edges{-1.0, -0.35, 0.35, 1.0};
  double z_clip = 3.0;

  /// Constants fitted to the bundled synthetic fixture corpus
  /// (tools/gen_fixtures.py prints them).
  static StressModel fixture_default();
};

struct StressResult {
  int level = 0;
  std::string label;
  double score = 0;
  std::string dominant_feature;
  std::string rationale;
};

Json to_json(const StressResult& r);

/// Total over finite nonnegative features with hf > 0. Throws MissingFeature otherwise.
StressResult classify_stress(const HrvFeatures& f, const StressModel& model = StressModel::fixture_default());

}  // namespace cha::health
