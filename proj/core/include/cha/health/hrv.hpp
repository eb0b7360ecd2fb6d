#pragma once

#include <span>
#include <utility>
#include <vector>

#include "cha/health/records.hpp"

namespace cha::health {

struct HrvFeatures {
  double mean_nn = 0;  // ms
  double sdnn = 0;     // ms, population standard deviation
  double rmssd = 0;    // ms
  double pnn50 = 0;    // fraction of successive differences above 50 ms
  double mean_hr = 0;  // bpm
  double lf = 0;       // ms^2, 0.04-0.15 Hz
  double hf = 0;       // ms^2, 0.15-0.40 Hz
  double lf_hf = 0;    // lf / hf, 0 when hf is 0
  std::size_t beats = 0;

  friend bool operator==(const HrvFeatures&, const HrvFeatures&) = default;
};

Json to_json(const HrvFeatures& f);
// Throws MissingFeature when a field is absent or not a number.
HrvFeatures hrv_features_from_json(const Json& j);

struct PeakDetectorOptions {
  double detrend_window_s = 1.0;
  double threshold_window_s = 10.0;
  double threshold_k = 0.5;
  double min_gap_s = 0.3;
};

/// Peak times in seconds relative to t[0] for one evenly sampled segment.
/// `fs` is the sampling rate in Hz.
std::vector<double> detect_peaks(std::span<const double> signal, double fs,
                                 const PeakDetectorOptions& opts = {});

/// One-sided periodogram density (units^2/Hz) at frequencies k*fs/n, k = 0..n/2.
std::vector<std::pair<double, double>> periodogram(std::span<const double> x, double fs);

/// Band powers of an NN series (ms) after linear resampling at `resample_hz`.
/// Returns {lf, hf}; both 0 when the series is too short to resample.
std::pair<double, double> lf_hf_power(std::span<const double> nn_ms, double resample_hz = 4.0);

/// Features over NN segments. Successive differences never cross segments.
/// Throws NoPeaks when there is no NN interval at all.
HrvFeatures hrv_features(const std::vector<std::vector<double>>& nn_segments);
HrvFeatures hrv_features(std::span<const double> nn_ms);

/// Full pipeline over a PPG series: split at gaps, detrend, detect peaks,
/// NN intervals, features. Throws TooShort or NoPeaks.
HrvFeatures analyze_ppg(std::span<const PpgSample> samples, const PeakDetectorOptions& opts = {});

}  // namespace cha::health
