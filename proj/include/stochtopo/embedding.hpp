#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "stochtopo/simulation.hpp"

namespace stochtopo {

struct EmbeddingParams {
  std::size_t tau = 1;
  std::size_t dim = 2;

  friend bool operator==(const EmbeddingParams&, const EmbeddingParams&) = default;
};

/// Points stored row-major in one contiguous buffer.
class PointCloud {
 public:
  PointCloud() = default;
  PointCloud(std::size_t dim, std::vector<double> coords)
      : dim_(dim), coords_(std::move(coords)) {
    if (dim_ == 0) throw std::invalid_argument("point dimension must be positive");
    if (coords_.size() % dim_ != 0)
      throw std::invalid_argument("coordinate count is not a multiple of dim");
  }

  static PointCloud from_points(const std::vector<std::vector<double>>& points) {
    if (points.empty()) return {};
    const std::size_t dim = points.front().size();
    std::vector<double> coords;
    coords.reserve(points.size() * dim);
    for (const auto& p : points) {
      if (p.size() != dim) throw std::invalid_argument("ragged point list");
      coords.insert(coords.end(), p.begin(), p.end());
    }
    return PointCloud(dim, std::move(coords));
  }

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  bool empty() const noexcept { return size() == 0; }

  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  const std::vector<double>& coords() const noexcept { return coords_; }

 private:
  std::size_t dim_ = 0;
  std::vector<double> coords_;
};

inline std::size_t embedded_point_count(std::size_t length, EmbeddingParams params) {
  const std::size_t span = (params.dim - 1) * params.tau;
  return span < length ? length - span : 0;
}

/// Delay coordinates v_i = (x_i, x_{i+tau}, ..., x_{i+(dim-1)tau}).
inline PointCloud delay_embed(std::span<const double> x, EmbeddingParams params) {
  if (params.tau == 0 || params.dim == 0)
    throw std::invalid_argument("tau and dim must be positive");
  if ((params.dim - 1) * params.tau >= x.size())
    throw std::invalid_argument("embedding window exceeds series length");
  const std::size_t count = embedded_point_count(x.size(), params);
  std::vector<double> coords;
  coords.reserve(count * params.dim);
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t c = 0; c < params.dim; ++c) coords.push_back(x[i + c * params.tau]);
  return PointCloud(params.dim, std::move(coords));
}

inline PointCloud delay_embed(const TimeSeries& series, EmbeddingParams params) {
  return delay_embed(std::span<const double>(series.values), params);
}

namespace detail {

inline std::size_t bin_of(double v, double lo, double width, std::size_t n_bins) {
  const auto b = static_cast<std::size_t>((v - lo) / width);
  return std::min(b, n_bins - 1);
}

// Sum of non-negative-index terms in sorted order, so that any permutation of
// the same terms gives the identical floating-point result.
inline double canonical_sum(std::vector<double> terms) {
  std::sort(terms.begin(), terms.end());
  double s = 0.0;
  for (double t : terms) s += t;
  return s;
}

}  // namespace detail

/// Histogram estimate (nats) of the mutual information between x_t and
/// x_{t+tau}, using n_bins equal-width bins per axis over [min x, max x].
inline double mutual_information(std::span<const double> x, std::size_t tau,
                                 std::size_t n_bins = 16) {
  if (n_bins == 0) throw std::invalid_argument("n_bins must be positive");
  if (tau >= x.size()) throw std::invalid_argument("tau must be < series length");
  const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
  const double lo = *lo_it;
  const double range = *hi_it - lo;
  if (!(range > 0.0)) return 0.0;
  const double width = range / static_cast<double>(n_bins);

  const std::size_t pairs = x.size() - tau;
  std::vector<double> joint(n_bins * n_bins, 0.0);
  std::vector<double> first(n_bins, 0.0), second(n_bins, 0.0);
  for (std::size_t t = 0; t < pairs; ++t) {
    const std::size_t a = detail::bin_of(x[t], lo, width, n_bins);
    const std::size_t b = detail::bin_of(x[t + tau], lo, width, n_bins);
    joint[a * n_bins + b] += 1.0;
    first[a] += 1.0;
    second[b] += 1.0;
  }
  const double n = static_cast<double>(pairs);
  std::vector<double> terms;
  for (std::size_t a = 0; a < n_bins; ++a)
    for (std::size_t b = 0; b < n_bins; ++b) {
      const double c = joint[a * n_bins + b];
      if (c == 0.0) continue;
      terms.push_back(c / n * std::log(c * n / (first[a] * second[b])));
    }
  return std::max(0.0, detail::canonical_sum(std::move(terms)));
}

/// First strict local minimum of MI over tau in [2, tau_max]; if there is none,
/// the smallest argmin over [1, tau_max].
inline std::size_t optimal_delay(std::span<const double> x, std::size_t tau_max,
                                 std::size_t n_bins = 16) {
  if (tau_max < 2) throw std::invalid_argument("tau_max must be >= 2");
  if (tau_max + 1 >= x.size())
    throw std::invalid_argument("tau_max too large for series length");
  std::vector<double> mi(tau_max + 2, 0.0);
  for (std::size_t tau = 1; tau <= tau_max + 1; ++tau)
    mi[tau] = mutual_information(x, tau, n_bins);
  for (std::size_t tau = 2; tau <= tau_max; ++tau)
    if (mi[tau - 1] > mi[tau] && mi[tau] < mi[tau + 1]) return tau;
  std::size_t best = 1;
  for (std::size_t tau = 2; tau <= tau_max; ++tau)
    if (mi[tau] < mi[best]) best = tau;
  return best;
}

/// Fraction of false nearest neighbours when going from dimension d to d+1.
///
/// Only the T - d*tau points that also exist in d+1 dimensions take part.
/// A neighbour pair (i, j) at distance R_d is false when
///   |x_{i+d*tau} - x_{j+d*tau}| / R_d > r_tol   or   R_{d+1} / sigma > a_tol.
/// Nearest-neighbour ties go to the lowest index.
inline double false_nearest_fraction(std::span<const double> x, std::size_t tau,
                                     std::size_t d, double r_tol = 10.0,
                                     double a_tol = 2.0) {
  if (tau == 0 || d == 0) throw std::invalid_argument("tau and d must be positive");
  if (d * tau >= x.size()) throw std::invalid_argument("embedding does not fit");
  const std::size_t count = x.size() - d * tau;
  if (count < 2) throw std::invalid_argument("fewer than 2 embeddable points");

  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  const double sigma = std::sqrt(var / static_cast<double>(x.size()));

  std::size_t false_count = 0;
  for (std::size_t i = 0; i < count; ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t nn = i;
    for (std::size_t j = 0; j < count; ++j) {
      if (j == i) continue;
      double d2 = 0.0;
      for (std::size_t c = 0; c < d && d2 < best; ++c) {
        const double diff = x[i + c * tau] - x[j + c * tau];
        d2 += diff * diff;
      }
      if (d2 < best) {
        best = d2;
        nn = j;
      }
    }
    const double extra = std::abs(x[i + d * tau] - x[nn + d * tau]);
    const double r_d = std::sqrt(best);
    bool is_false = r_d > 0.0 ? extra / r_d > r_tol : extra > 0.0;
    if (!is_false && sigma > 0.0)
      is_false = std::sqrt(best + extra * extra) / sigma > a_tol;
    if (is_false) ++false_count;
  }
  return static_cast<double>(false_count) / static_cast<double>(count);
}

/// Smallest d in [1, d_max] whose false-neighbour fraction drops below
/// threshold. Falls back to d_max, or to the largest dimension the series
/// can support when that is smaller.
inline std::size_t optimal_dimension(std::span<const double> x, std::size_t tau,
                                     std::size_t d_max = 10, double threshold = 0.01,
                                     double r_tol = 10.0, double a_tol = 2.0) {
  if (d_max < 2) throw std::invalid_argument("d_max must be >= 2");
  if (tau == 0) throw std::invalid_argument("tau must be positive");
  std::size_t last_fit = 1;
  for (std::size_t d = 1; d <= d_max; ++d) {
    if (d * tau + 2 > x.size()) return last_fit;
    last_fit = d;
    if (false_nearest_fraction(x, tau, d, r_tol, a_tol) < threshold) return d;
  }
  return d_max;
}

/// Settings for automatic (tau, dim) selection.
struct EmbeddingSearch {
  std::size_t tau_max = 10;
  std::size_t n_bins = 16;
  std::size_t d_max = 10;
  double fnn_threshold = 0.01;
  double r_tol = 10.0;
  double a_tol = 2.0;
};

inline EmbeddingParams select_embedding(std::span<const double> x,
                                        const EmbeddingSearch& search = {}) {
  EmbeddingParams p;
  p.tau = optimal_delay(x, search.tau_max, search.n_bins);
  p.dim = optimal_dimension(x, p.tau, search.d_max, search.fnn_threshold, search.r_tol,
                            search.a_tol);
  return p;
}

}  // namespace stochtopo
