#include "cha/health/hrv.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "cha/error.hpp"

namespace cha::health {

namespace {

constexpr double kLfLow = 0.04;
constexpr double kLfHigh = 0.15;
constexpr double kHfHigh = 0.40;

// Segments shorter than this carry too few beats to be worth analysing.
constexpr double kMinSegmentSeconds = 3.0;
constexpr double kMinTotalSeconds = 10.0;

double feature(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key) || !j.at(key).is_number()) {
    throw Error(Errc::MissingFeature, std::string("HRV feature '") + key + "' is missing");
  }
  return j.at(key).get<double>();
}

std::vector<double> moving_mean(std::span<const double> x, std::size_t window) {
  const std::size_t n = x.size();
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + x[i];
  std::vector<double> out(n);
  const std::size_t half = window / 2;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(n, lo + window);
    out[i] = (prefix[hi] - prefix[lo]) / static_cast<double>(hi - lo);
  }
  return out;
}

std::vector<double> adaptive_threshold(std::span<const double> d, std::size_t window, double k) {
  const std::size_t n = d.size();
  std::vector<double> thr(n);
  std::size_t start = 0;
  while (start < n) {
    std::size_t end = std::min(n, start + window);
    // Fold a short tail into the window before it.
    if (n - end < window / 2) end = n;
    double mean = 0;
    for (std::size_t i = start; i < end; ++i) mean += d[i];
    mean /= static_cast<double>(end - start);
    double var = 0;
    for (std::size_t i = start; i < end; ++i) var += (d[i] - mean) * (d[i] - mean);
    var /= static_cast<double>(end - start);
    std::fill(thr.begin() + static_cast<std::ptrdiff_t>(start), thr.begin() + static_cast<std::ptrdiff_t>(end),
              mean + k * std::sqrt(var));
    start = end;
  }
  return thr;
}

// Vertex offset of the parabola through three samples, in samples.
double vertex_offset(double a, double b, double c) {
  const double denom = a - 2 * b + c;
  if (denom >= 0) return 0;
  return std::clamp(0.5 * (a - c) / denom, -1.0, 1.0);
}

void check_nonnegative(const HrvFeatures& f) {
  for (double v : {f.mean_nn, f.sdnn, f.rmssd, f.pnn50, f.mean_hr, f.lf, f.hf, f.lf_hf}) {
    if (!std::isfinite(v) || v < 0) throw Error(Errc::MissingFeature, "HRV feature out of domain");
  }
}

}  // namespace

Json to_json(const HrvFeatures& f) {
  return Json{{"mean_nn", f.mean_nn}, {"sdnn", f.sdnn}, {"rmssd", f.rmssd},
              {"pnn50", f.pnn50},     {"mean_hr", f.mean_hr}, {"lf", f.lf},
              {"hf", f.hf},           {"lf_hf", f.lf_hf},     {"beats", f.beats}};
}

HrvFeatures hrv_features_from_json(const Json& j) {
  HrvFeatures f;
  f.mean_nn = feature(j, "mean_nn");
  f.sdnn = feature(j, "sdnn");
  f.rmssd = feature(j, "rmssd");
  f.pnn50 = feature(j, "pnn50");
  f.mean_hr = feature(j, "mean_hr");
  f.lf = feature(j, "lf");
  f.hf = feature(j, "hf");
  f.lf_hf = feature(j, "lf_hf");
  f.beats = j.value("beats", std::size_t{0});
  check_nonnegative(f);
  return f;
}

std::vector<double> detect_peaks(std::span<const double> x, double fs, const PeakDetectorOptions& opts) {
  const std::size_t n = x.size();
  if (n < 3 || fs <= 0) return {};
  const auto trend =
      moving_mean(x, std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(opts.detrend_window_s * fs))));
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = x[i] - trend[i];
  const auto thr = adaptive_threshold(
      d, std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(opts.threshold_window_s * fs))),
      opts.threshold_k);

  std::vector<std::size_t> kept;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(d[i] > d[i - 1] && d[i] >= d[i + 1] && d[i] > thr[i])) continue;
    if (!kept.empty() && static_cast<double>(i - kept.back()) / fs < opts.min_gap_s) {
      if (d[i] > d[kept.back()]) kept.back() = i;
      continue;
    }
    kept.push_back(i);
  }

  // Sub-sample refinement on the raw signal, where pulse shape is undistorted by the detrend.
  std::vector<double> times;
  times.reserve(kept.size());
  for (std::size_t i : kept) {
    times.push_back((static_cast<double>(i) + vertex_offset(x[i - 1], x[i], x[i + 1])) / fs);
  }
  return times;
}

namespace {

// One-sided density for bins 0..last_k of an n-point DFT.
std::vector<std::pair<double, double>> density_bins(std::span<const double> x, double fs, std::size_t last_k) {
  const std::size_t n = x.size();
  std::vector<std::pair<double, double>> out;
  const double scale = 1.0 / (fs * static_cast<double>(n));
  const double w = -2.0 * std::numbers::pi / static_cast<double>(n);
  for (std::size_t k = 0; k <= last_k; ++k) {
    double re = 0, im = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const double phase = w * static_cast<double>((j * k) % n);
      re += x[j] * std::cos(phase);
      im += x[j] * std::sin(phase);
    }
    double p = (re * re + im * im) * scale;
    const bool self_conjugate = k == 0 || (n % 2 == 0 && k == n / 2);
    if (!self_conjugate) p *= 2;
    out.emplace_back(static_cast<double>(k) * fs / static_cast<double>(n), p);
  }
  return out;
}

}  // namespace

std::vector<std::pair<double, double>> periodogram(std::span<const double> x, double fs) {
  if (x.empty()) return {};
  return density_bins(x, fs, x.size() / 2);
}

std::pair<double, double> lf_hf_power(std::span<const double> nn_ms, double resample_hz) {
  if (nn_ms.size() < 2 || resample_hz <= 0) return {0, 0};
  std::vector<double> t(nn_ms.size());
  double acc = 0;
  for (std::size_t i = 0; i < nn_ms.size(); ++i) {
    acc += nn_ms[i] / 1000.0;
    t[i] = acc;
  }
  std::vector<double> grid;
  std::size_t seg = 0;
  for (double ti = t.front(); ti <= t.back(); ti = t.front() + static_cast<double>(grid.size()) / resample_hz) {
    while (seg + 1 < t.size() - 1 && t[seg + 1] < ti) ++seg;
    const double span = t[seg + 1] - t[seg];
    const double u = span > 0 ? (ti - t[seg]) / span : 0;
    grid.push_back(nn_ms[seg] + u * (nn_ms[seg + 1] - nn_ms[seg]));
  }
  if (grid.size() < 2) return {0, 0};
  const double mean = std::accumulate(grid.begin(), grid.end(), 0.0) / static_cast<double>(grid.size());
  for (double& v : grid) v -= mean;

  const double df = resample_hz / static_cast<double>(grid.size());
  const auto last_k = std::min(grid.size() / 2, static_cast<std::size_t>(kHfHigh / df));
  const auto spectrum = density_bins(grid, resample_hz, last_k);
  double lf = 0, hf = 0;
  for (const auto& [f, p] : spectrum) {
    if (f >= kLfLow && f < kLfHigh) lf += p * df;
    else if (f >= kLfHigh && f < kHfHigh) hf += p * df;
  }
  return {lf, hf};
}

HrvFeatures hrv_features(const std::vector<std::vector<double>>& segments) {
  std::size_t count = 0;
  double sum = 0;
  for (const auto& s : segments) {
    count += s.size();
    for (double v : s) sum += v;
  }
  if (count == 0) throw Error(Errc::NoPeaks, "no NN intervals");

  HrvFeatures f;
  f.mean_nn = sum / static_cast<double>(count);
  double ss = 0, sq_diff = 0;
  std::size_t diffs = 0, over50 = 0;
  double lf_weighted = 0, hf_weighted = 0, weight = 0;
  for (const auto& s : segments) {
    for (double v : s) ss += (v - f.mean_nn) * (v - f.mean_nn);
    for (std::size_t i = 1; i < s.size(); ++i) {
      const double dnn = s[i] - s[i - 1];
      sq_diff += dnn * dnn;
      if (std::abs(dnn) > 50.0) ++over50;
      ++diffs;
    }
    const auto [lf, hf] = lf_hf_power(s);
    const double w = std::accumulate(s.begin(), s.end(), 0.0);
    lf_weighted += lf * w;
    hf_weighted += hf * w;
    weight += w;
    if (!s.empty()) f.beats += s.size() + 1;
  }
  f.sdnn = std::sqrt(ss / static_cast<double>(count));
  f.rmssd = diffs ? std::sqrt(sq_diff / static_cast<double>(diffs)) : 0.0;
  f.pnn50 = diffs ? static_cast<double>(over50) / static_cast<double>(diffs) : 0.0;
  f.mean_hr = 60000.0 / f.mean_nn;
  if (weight > 0) {
    f.lf = lf_weighted / weight;
    f.hf = hf_weighted / weight;
  }
  f.lf_hf = f.hf > 0 ? f.lf / f.hf : 0.0;
  return f;
}

HrvFeatures hrv_features(std::span<const double> nn_ms) {
  return hrv_features(std::vector<std::vector<double>>{{nn_ms.begin(), nn_ms.end()}});
}

HrvFeatures analyze_ppg(std::span<const PpgSample> samples, const PeakDetectorOptions& opts) {
  if (samples.size() < 2) throw Error(Errc::TooShort, "PPG series has fewer than 2 samples");
  std::vector<double> dt;
  dt.reserve(samples.size() - 1);
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const auto step = samples[i].date_ms - samples[i - 1].date_ms;
    if (step <= 0) throw Error(Errc::InvalidArgument, "PPG timestamps must be strictly increasing");
    dt.push_back(static_cast<double>(step));
  }
  auto sorted = dt;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2), sorted.end());
  const double period_ms = sorted[sorted.size() / 2];
  const double fs = 1000.0 / period_ms;

  // Split wherever the spacing jumps well beyond the nominal period.
  std::vector<std::pair<std::size_t, std::size_t>> segments;
  std::size_t start = 0;
  for (std::size_t i = 0; i < dt.size(); ++i) {
    if (dt[i] > 1.5 * period_ms) {
      segments.emplace_back(start, i + 1);
      start = i + 1;
    }
  }
  segments.emplace_back(start, samples.size());

  double total_s = 0;
  for (const auto& [b, e] : segments) total_s += static_cast<double>(e - b) * period_ms / 1000.0;
  if (total_s < kMinTotalSeconds) {
    throw Error(Errc::TooShort, "PPG series covers " + std::to_string(total_s) + " s; need at least 10 s");
  }

  std::vector<std::vector<double>> nn_segments;
  for (const auto& [b, e] : segments) {
    if (static_cast<double>(e - b) * period_ms / 1000.0 < kMinSegmentSeconds) continue;
    std::vector<double> x;
    x.reserve(e - b);
    for (std::size_t i = b; i < e; ++i) x.push_back(samples[i].ppg);
    const auto peaks = detect_peaks(x, fs, opts);
    if (peaks.size() < 2) continue;
    std::vector<double> nn;
    for (std::size_t i = 1; i < peaks.size(); ++i) nn.push_back((peaks[i] - peaks[i - 1]) * 1000.0);
    nn_segments.push_back(std::move(nn));
  }
  if (nn_segments.empty()) throw Error(Errc::NoPeaks, "no pulse peaks found in the PPG series");
  return hrv_features(nn_segments);
}

}  // namespace cha::health
