#include "cha/health/stress.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "cha/error.hpp"

namespace cha::health {

namespace {

constexpr std::array<const char*, 3> kFeatureNames = {"rmssd", "sdnn", "lf_hf"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

StressModel StressModel::fixture_default() {
  StressModel m;
  // Pooled over the bundled recordings by `cha hrv-survey --data data`.
  m.norms = {Norm{22.5441, 13.9325}, Norm{21.5301, 6.73709}, Norm{6.18589, 9.35457}};
  return m;
}

Json to_json(const StressResult& r) {
  return Json{{"level", r.level},
              {"label", r.label},
              {"score", r.score},
              {"dominant_feature", r.dominant_feature},
              {"rationale", r.rationale}};
}

StressResult classify_stress(const HrvFeatures& f, const StressModel& model) {
  const std::array<double, 3> values{f.rmssd, f.sdnn, f.lf_hf};
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]) || values[i] < 0) {
      throw Error(Errc::MissingFeature, std::string(kFeatureNames[i]) + " is not a finite nonnegative value");
    }
  }
  if (!(f.hf > 0)) throw Error(Errc::MissingFeature, "hf power is 0, so lf_hf is undefined");

  StressResult r;
  std::size_t dominant = 0;
  double dominant_mag = -1;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto& norm = model.norms[i];
    const double z = norm.std > 0 ? std::clamp((values[i] - norm.mean) / norm.std, -model.z_clip, model.z_clip) : 0.0;
    const double contribution = model.weights[i] * z;
    r.score += contribution;
    if (std::abs(contribution) > dominant_mag) {
      dominant_mag = std::abs(contribution);
      dominant = i;
    }
  }
  r.level = static_cast<int>(std::upper_bound(model.edges.begin(), model.edges.end(), r.score) - model.edges.begin());
  r.label = std::string(kStressLabels[static_cast<std::size_t>(r.level)]);
  r.dominant_feature = kFeatureNames[dominant];

  const bool high = values[dominant] > model.norms[dominant].mean;
  r.rationale = "Stress level " + std::to_string(r.level) + " of 4 (" + r.label + "). Dominant feature: " +
                (high ? "high " : "low ") + r.dominant_feature + " (" + fmt(values[dominant]) +
                (dominant == 2 ? "" : " ms") + ").";
  return r;
}

}  // namespace cha::health
