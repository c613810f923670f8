#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "stochtopo/simulation.hpp"

namespace stochtopo {

// Moments are accumulated as offsets from the first sample. Adding a
// constant to a series then leaves every offset, and hence every
// shift-invariant statistic, bit-for-bit unchanged whenever the offsets
// themselves are exact.
namespace stats {

inline double offset_mean(std::span<const double> x, double ref) {
  double s = 0.0;
  for (double v : x) s += v - ref;
  return s / static_cast<double>(x.size());
}

inline double mean(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("mean of empty sequence");
  return x[0] + offset_mean(x, x[0]);
}

// Population variance (denominator n).
inline double variance(std::span<const double> x, double ref) {
  if (x.empty()) throw std::invalid_argument("variance of empty sequence");
  const double mu = offset_mean(x, ref);
  double s = 0.0;
  for (double v : x) {
    const double dev = (v - ref) - mu;
    s += dev * dev;
  }
  return s / static_cast<double>(x.size());
}

inline double variance(std::span<const double> x) {
  return x.empty() ? variance(x, 0.0) : variance(x, x[0]);
}

inline double stddev(std::span<const double> x) { return std::sqrt(variance(x)); }

}  // namespace stats

struct StatFeatureVector {
  double mean = 0.0;
  double variance = 0.0;
  double spectral_entropy = 0.0;
  double lumpiness = 0.0;
  double stability = 0.0;
  double hurst = 0.0;
  double std_first_derivative = 0.0;
  double linearity = 0.0;
  double binarize_mean = 0.0;
  double kpss_stat = 0.0;
  double histogram_mode = 0.0;

  static constexpr std::size_t kSize = 11;
  static constexpr std::array<std::string_view, kSize> kNames = {
      "mean", "variance", "spectral_entropy", "lumpiness", "stability", "hurst",
      "std_first_derivative", "linearity", "binarize_mean", "kpss_stat",
      "histogram_mode"};

  std::array<double, kSize> values() const {
    return {mean, variance, spectral_entropy, lumpiness, stability, hurst,
            std_first_derivative, linearity, binarize_mean, kpss_stat, histogram_mode};
  }

  friend bool operator==(const StatFeatureVector&, const StatFeatureVector&) = default;
};

/// Rescaled-range estimate: least-squares slope of log(mean R/S) against
/// log(window) for dyadic windows 16, 32, ... up to n/2.
inline double hurst_exponent(std::span<const double> x) {
  if (x.size() < 100) throw std::invalid_argument("hurst_exponent needs >= 100 samples");
  std::vector<double> log_w, log_rs;
  for (std::size_t w = 16; w <= x.size() / 2; w *= 2) {
    double rs_sum = 0.0;
    std::size_t used = 0;
    for (std::size_t start = 0; start + w <= x.size(); start += w) {
      const auto chunk = x.subspan(start, w);
      const double ref = chunk[0];
      const double mu = stats::offset_mean(chunk, ref);
      double cum = 0.0, hi = 0.0, lo = 0.0, ss = 0.0;
      for (double v : chunk) {
        const double dev = (v - ref) - mu;
        cum += dev;
        hi = std::max(hi, cum);
        lo = std::min(lo, cum);
        ss += dev * dev;
      }
      const double s = std::sqrt(ss / static_cast<double>(w));
      if (s > 0.0) {
        rs_sum += (hi - lo) / s;
        ++used;
      }
    }
    if (used > 0 && rs_sum > 0.0) {
      log_w.push_back(std::log(static_cast<double>(w)));
      log_rs.push_back(std::log(rs_sum / static_cast<double>(used)));
    }
  }
  if (log_w.size() < 2) return 0.5;
  const double mx = stats::mean(log_w), my = stats::mean(log_rs);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < log_w.size(); ++i) {
    sxy += (log_w[i] - mx) * (log_rs[i] - my);
    sxx += (log_w[i] - mx) * (log_w[i] - mx);
  }
  return sxy / sxx;
}

/// Level-stationarity KPSS statistic with a Bartlett-kernel Newey-West
/// long-run variance, lag floor(4 (n/100)^(1/4)).
inline double kpss_statistic(std::span<const double> x) {
  if (x.size() < 10) throw std::invalid_argument("kpss_statistic needs >= 10 samples");
  const std::size_t n = x.size();
  const double ref = x[0];
  const double mu = stats::offset_mean(x, ref);
  std::vector<double> e(n);
  for (std::size_t t = 0; t < n; ++t) e[t] = (x[t] - ref) - mu;

  const double nd = static_cast<double>(n);
  double gamma0 = 0.0;
  for (double v : e) gamma0 += v * v;
  gamma0 /= nd;
  if (!(gamma0 > 0.0)) return 0.0;

  const auto lags = static_cast<std::size_t>(std::floor(4.0 * std::pow(nd / 100.0, 0.25)));
  double lr_var = gamma0;
  for (std::size_t l = 1; l <= lags && l < n; ++l) {
    double g = 0.0;
    for (std::size_t t = l; t < n; ++t) g += e[t] * e[t - l];
    lr_var += 2.0 * (1.0 - static_cast<double>(l) / static_cast<double>(lags + 1)) * g / nd;
  }
  if (!(lr_var > 0.0)) return 0.0;

  double partial = 0.0, sum_sq = 0.0;
  for (double v : e) {
    partial += v;
    sum_sq += partial * partial;
  }
  return sum_sq / (nd * nd * lr_var);
}

/// Shannon entropy of the normalised periodogram over the positive
/// frequencies 1..floor(n/2), divided by log of the bin count. Direct DFT.
inline double spectral_entropy(std::span<const double> x) {
  if (x.size() < 8) throw std::invalid_argument("spectral_entropy needs >= 8 samples");
  const std::size_t n = x.size();
  const double ref = x[0];
  const double mu = stats::offset_mean(x, ref);
  std::vector<double> e(n);
  for (std::size_t t = 0; t < n; ++t) e[t] = (x[t] - ref) - mu;

  std::vector<double> cos_table(n), sin_table(n);
  for (std::size_t m = 0; m < n; ++m) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(n);
    cos_table[m] = std::cos(angle);
    sin_table[m] = std::sin(angle);
  }
  const std::size_t bins = n / 2;
  std::vector<double> power(bins);
  double total = 0.0;
  for (std::size_t k = 1; k <= bins; ++k) {
    double re = 0.0, im = 0.0;
    std::size_t idx = 0;
    for (std::size_t t = 0; t < n; ++t) {
      re += e[t] * cos_table[idx];
      im -= e[t] * sin_table[idx];
      idx += k;
      if (idx >= n) idx -= n;
    }
    power[k - 1] = re * re + im * im;
    total += power[k - 1];
  }
  if (!(total > 0.0) || bins < 2) return 0.0;
  double h = 0.0;
  for (double p : power) {
    if (p <= 0.0) continue;
    const double q = p / total;
    h -= q * std::log(q);
  }
  return std::clamp(h / std::log(static_cast<double>(bins)), 0.0, 1.0);
}

/// The eleven statistical features. `window` is the tile length used for
/// lumpiness (variance of tile variances) and stability (variance of tile
/// means); trailing samples that do not fill a tile are ignored.
inline StatFeatureVector stat_feature_vector(std::span<const double> x,
                                             std::size_t window = 50) {
  if (window == 0) throw std::invalid_argument("window must be positive");
  if (x.size() < 2 * window || x.size() < 100)
    throw std::invalid_argument("series too short for statistical features");
  const std::size_t n = x.size();
  const double ref = x[0];
  const double mu = stats::offset_mean(x, ref);

  StatFeatureVector f;
  f.mean = ref + mu;
  f.variance = stats::variance(x, ref);
  f.spectral_entropy = spectral_entropy(x);

  std::vector<double> tile_means, tile_vars;
  for (std::size_t start = 0; start + window <= n; start += window) {
    const auto tile = x.subspan(start, window);
    tile_means.push_back(stats::offset_mean(tile, ref));
    tile_vars.push_back(stats::variance(tile, ref));
  }
  f.lumpiness = stats::variance(tile_vars);
  f.stability = stats::variance(tile_means);
  f.hurst = hurst_exponent(x);

  std::vector<double> diffs(n - 1);
  for (std::size_t t = 0; t + 1 < n; ++t) diffs[t] = x[t + 1] - x[t];
  f.std_first_derivative = stats::stddev(diffs);

  // R^2 of x on t, from centred cross products.
  std::vector<double> time(n);
  for (std::size_t t = 0; t < n; ++t) time[t] = static_cast<double>(t);
  const double t_mu = stats::offset_mean(time, 0.0);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double dt = time[t] - t_mu;
    const double dy = (x[t] - ref) - mu;
    sxy += dt * dy;
    sxx += dt * dt;
    syy += dy * dy;
  }
  f.linearity = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;

  std::size_t above = 0;
  for (double v : x)
    if (v - ref > mu) ++above;
  f.binarize_mean = static_cast<double>(above) / static_cast<double>(n);

  f.kpss_stat = kpss_statistic(x);

  const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
  const double lo = *lo_it, range = *hi_it - *lo_it;
  if (range > 0.0) {
    constexpr std::size_t kBins = 10;
    const double width = range / kBins;
    std::array<std::size_t, kBins> counts{};
    for (double v : x)
      ++counts[std::min(static_cast<std::size_t>((v - lo) / width), kBins - 1)];
    const auto best = static_cast<std::size_t>(
        std::max_element(counts.begin(), counts.end()) - counts.begin());
    f.histogram_mode = lo + (static_cast<double>(best) + 0.5) * width;
  } else {
    f.histogram_mode = lo;
  }
  return f;
}

inline StatFeatureVector stat_feature_vector(const TimeSeries& series,
                                             std::size_t window = 50) {
  return stat_feature_vector(std::span<const double>(series.values), window);
}

}  // namespace stochtopo
