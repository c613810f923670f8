#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "stochtopo/rng.hpp"

namespace stochtopo {

enum class ProcessKind { Wiener = 0, Cauchy = 1 };

inline std::string_view to_string(ProcessKind kind) {
  return kind == ProcessKind::Wiener ? "Wiener" : "Cauchy";
}

inline ProcessKind parse_process_kind(std::string_view name) {
  if (name == "Wiener" || name == "wiener") return ProcessKind::Wiener;
  if (name == "Cauchy" || name == "cauchy") return ProcessKind::Cauchy;
  throw std::invalid_argument("unknown process kind: " + std::string(name));
}

/// A uniformly sampled path on [0, t_max].
struct TimeSeries {
  std::vector<double> values;
  double t_max = 1.0;
  double dt = 1.0;
  std::optional<ProcessKind> label;
  std::uint64_t seed = 0;

  std::size_t size() const noexcept { return values.size(); }

  // Wraps plain values, e.g. fixtures or externally loaded data.
  static TimeSeries from_values(std::vector<double> values, double t_max = 0.0) {
    TimeSeries ts;
    const std::size_t n = values.size();
    ts.values = std::move(values);
    ts.t_max = t_max > 0.0 ? t_max : static_cast<double>(n > 1 ? n - 1 : 1);
    ts.dt = n > 1 ? ts.t_max / static_cast<double>(n - 1) : ts.t_max;
    return ts;
  }
};

struct LabeledDataset {
  std::vector<TimeSeries> series;
  std::map<ProcessKind, std::size_t> class_counts;
  std::uint64_t master_seed = 0;
  std::size_t n_steps = 0;
  double t_max = 0.0;
};

namespace detail {

inline void check_path_args(std::size_t n_steps, double t_max) {
  if (n_steps < 2) throw std::invalid_argument("n_steps must be at least 2");
  if (!(t_max > 0.0) || !std::isfinite(t_max))
    throw std::invalid_argument("t_max must be positive and finite");
}

inline TimeSeries empty_path(std::size_t n_steps, double t_max,
                             std::uint64_t seed, ProcessKind kind) {
  TimeSeries ts;
  ts.values.assign(n_steps, 0.0);
  ts.t_max = t_max;
  ts.dt = t_max / static_cast<double>(n_steps - 1);
  ts.label = kind;
  ts.seed = seed;
  return ts;
}

}  // namespace detail

/// Brownian path: X_0 = 0 and independent N(0, dt) increments.
inline TimeSeries sample_wiener(std::size_t n_steps, double t_max,
                                std::uint64_t seed) {
  detail::check_path_args(n_steps, t_max);
  TimeSeries ts = detail::empty_path(n_steps, t_max, seed, ProcessKind::Wiener);
  Rng rng(seed);
  const double step_scale = std::sqrt(ts.dt);
  for (std::size_t k = 1; k < n_steps; ++k)
    ts.values[k] = ts.values[k - 1] + step_scale * rng.normal();
  return ts;
}

/// Cauchy process path: X_0 = 0 and each increment over a step of length dt
/// is Cauchy with location 0 and scale dt, i.e. density
/// (1/pi) * dt / (dt^2 + x^2).
///
/// The scale is linear in the step length. A scale of t^2/2 is sometimes
/// quoted for the subordinated-Brownian construction; it does not match the
/// density above and is not used here.
inline TimeSeries sample_cauchy(std::size_t n_steps, double t_max,
                                std::uint64_t seed) {
  detail::check_path_args(n_steps, t_max);
  TimeSeries ts = detail::empty_path(n_steps, t_max, seed, ProcessKind::Cauchy);
  Rng rng(seed);
  for (std::size_t k = 1; k < n_steps; ++k)
    ts.values[k] = ts.values[k - 1] + ts.dt * rng.cauchy();
  return ts;
}

inline TimeSeries sample_process(ProcessKind kind, std::size_t n_steps,
                                 double t_max, std::uint64_t seed) {
  return kind == ProcessKind::Wiener ? sample_wiener(n_steps, t_max, seed)
                                     : sample_cauchy(n_steps, t_max, seed);
}

// seed = mix(master, label, index); distinct labels use distinct streams.
inline std::uint64_t series_seed(std::uint64_t master_seed, ProcessKind kind,
                                 std::size_t index) {
  return derive_seed(master_seed, 0x5eed0000ULL + static_cast<std::uint64_t>(kind),
                     index);
}

/// All Wiener series first, then all Cauchy series.
inline LabeledDataset generate_dataset(
    const std::map<ProcessKind, std::size_t>& n_per_class, std::size_t n_steps,
    double t_max, std::uint64_t master_seed) {
  detail::check_path_args(n_steps, t_max);
  if (n_per_class.empty())
    throw std::invalid_argument("dataset needs at least one class");
  for (const auto& [kind, count] : n_per_class)
    if (count < 1) throw std::invalid_argument("class counts must be >= 1");

  LabeledDataset ds;
  ds.class_counts = n_per_class;
  ds.master_seed = master_seed;
  ds.n_steps = n_steps;
  ds.t_max = t_max;
  for (const auto& [kind, count] : n_per_class)  // std::map: Wiener < Cauchy
    for (std::size_t i = 0; i < count; ++i)
      ds.series.push_back(
          sample_process(kind, n_steps, t_max, series_seed(master_seed, kind, i)));
  return ds;
}

}  // namespace stochtopo
