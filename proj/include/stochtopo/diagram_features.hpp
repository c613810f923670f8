#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "stochtopo/diagram_distances.hpp"
#include "stochtopo/embedding.hpp"
#include "stochtopo/persistence.hpp"

namespace stochtopo {

namespace detail {

// Finite pairs in sorted order. Sums over the result do not depend on the
// order the pairs were given in.
inline std::vector<PersistencePair> canonical_pairs(const PersistenceDiagram& d) {
  require_finite(d);
  std::vector<PersistencePair> pairs = d.pairs;
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

}  // namespace detail

/// W_1 distance to the empty diagram: sum of lifetime / 2.
inline double wasserstein_to_diagonal(const PersistenceDiagram& d) {
  double total = 0.0;
  for (const auto& p : detail::canonical_pairs(d)) total += p.lifetime() / 2.0;
  return total;
}

/// Bottleneck distance to the empty diagram: largest lifetime / 2.
inline double bottleneck_to_diagonal(const PersistenceDiagram& d) {
  double best = 0.0;
  for (const auto& p : detail::canonical_pairs(d)) best = std::max(best, p.lifetime() / 2.0);
  return best;
}

struct AdcockCarlsson {
  double f1 = 0.0;  // sum b * l
  double f2 = 0.0;  // sum (d_max - d) * l
  double f3 = 0.0;  // sum b^2 * l^4
  double f4 = 0.0;  // sum (d_max - d)^2 * l^4
};

inline AdcockCarlsson adcock_carlsson(const PersistenceDiagram& d) {
  const auto pairs = detail::canonical_pairs(d);
  const double d_max = d.d_max();
  AdcockCarlsson f;
  for (const auto& p : pairs) {
    const double l = p.lifetime();
    const double l4 = (l * l) * (l * l);
    const double gap = d_max - p.death;
    f.f1 += p.birth * l;
    f.f2 += gap * l;
    f.f3 += p.birth * p.birth * l4;
    f.f4 += gap * gap * l4;
  }
  return f;
}

/// Shannon entropy (nats) of lifetimes normalised by their total. Zero-length
/// pairs are skipped; an empty or all-zero diagram has entropy 0.
inline double persistence_entropy(const PersistenceDiagram& d) {
  const auto pairs = detail::canonical_pairs(d);
  double total = 0.0;
  for (const auto& p : pairs) total += p.lifetime();
  if (!(total > 0.0)) return 0.0;
  double h = 0.0;
  for (const auto& p : pairs) {
    const double l = p.lifetime();
    if (l <= 0.0) continue;
    const double q = l / total;
    h -= q * std::log(q);
  }
  return std::max(0.0, h);
}

// Tent centred on the pair's midpoint with height lifetime / 2.
inline double landscape_tent(const PersistencePair& p, double t) {
  return std::max(0.0, std::min(t - p.birth, p.death - t));
}

/// lambda_k(t): k-th largest tent value at t (0 when fewer than k pairs).
inline double landscape_eval(const PersistenceDiagram& d, std::size_t k, double t) {
  if (k < 1) throw std::invalid_argument("landscape level k must be >= 1");
  detail::require_finite(d);
  if (d.size() < k) return 0.0;
  std::vector<double> values;
  values.reserve(d.size());
  for (const auto& p : d.pairs) values.push_back(landscape_tent(p, t));
  std::nth_element(values.begin(), values.begin() + (k - 1), values.end(),
                   std::greater<double>());
  return values[k - 1];
}

/// Integral of lambda_k over the real line.
///
/// Every tent is linear between the points b_i, d_i and the crossings
/// (b_i + d_j) / 2 of a rising and a falling edge, so the k-th largest value
/// is linear between consecutive breakpoints and the trapezoid rule is exact.
inline double landscape_l1(const PersistenceDiagram& d, std::size_t k = 1) {
  if (k < 1) throw std::invalid_argument("landscape level k must be >= 1");
  const auto pairs = detail::canonical_pairs(d);
  if (pairs.size() < k) return 0.0;

  std::vector<double> breaks;
  for (const auto& p : pairs) {
    if (p.lifetime() <= 0.0) continue;
    breaks.push_back(p.birth);
    breaks.push_back(p.death);
    breaks.push_back(0.5 * (p.birth + p.death));
  }
  for (const auto& rise : pairs)
    for (const auto& fall : pairs) {
      const double x = 0.5 * (rise.birth + fall.death);
      // Only crossings inside both rising and falling halves can matter.
      if (x > rise.birth && x < 0.5 * (rise.birth + rise.death) &&
          x > 0.5 * (fall.birth + fall.death) && x < fall.death)
        breaks.push_back(x);
    }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  PersistenceDiagram canon{d.degree, pairs};
  double area = 0.0;
  double prev_t = 0.0, prev_v = 0.0;
  for (std::size_t i = 0; i < breaks.size(); ++i) {
    const double v = landscape_eval(canon, k, breaks[i]);
    if (i > 0) area += 0.5 * (breaks[i] - prev_t) * (v + prev_v);
    prev_t = breaks[i];
    prev_v = v;
  }
  return area;
}

/// Number of pairs alive at s, using birth <= s < death.
inline std::size_t betti_curve(const PersistenceDiagram& d, double s) {
  detail::require_finite(d);
  return static_cast<std::size_t>(std::count_if(
      d.pairs.begin(), d.pairs.end(),
      [s](const PersistencePair& p) { return p.birth <= s && s < p.death; }));
}

/// Integral of the Betti curve, i.e. the total lifetime.
inline double betti_l1(const PersistenceDiagram& d) {
  double total = 0.0;
  for (const auto& p : detail::canonical_pairs(d)) total += p.lifetime();
  return total;
}

/// The nine degree-1 summaries used for classification, in column order.
struct TopologicalFeatureVector {
  double wasserstein_diag = 0.0;
  double bottleneck_diag = 0.0;
  double ac1 = 0.0;
  double ac2 = 0.0;
  double ac3 = 0.0;
  double ac4 = 0.0;
  double entropy = 0.0;
  double betti_l1 = 0.0;
  double landscape1_l1 = 0.0;

  static constexpr std::size_t kSize = 9;
  static constexpr std::array<std::string_view, kSize> kNames = {
      "wasserstein_diag", "bottleneck_diag", "ac1", "ac2", "ac3", "ac4",
      "entropy", "betti_l1", "landscape1_l1"};

  std::array<double, kSize> values() const {
    return {wasserstein_diag, bottleneck_diag, ac1, ac2, ac3, ac4,
            entropy, betti_l1, landscape1_l1};
  }

  friend bool operator==(const TopologicalFeatureVector&,
                         const TopologicalFeatureVector&) = default;
};

/// Features of a diagram. Infinite pairs are dropped first.
inline TopologicalFeatureVector topological_features(const PersistenceDiagram& diagram) {
  const PersistenceDiagram d = diagram.finite_part();
  TopologicalFeatureVector f;
  f.wasserstein_diag = wasserstein_to_diagonal(d);
  f.bottleneck_diag = bottleneck_to_diagonal(d);
  const auto ac = adcock_carlsson(d);
  f.ac1 = ac.f1;
  f.ac2 = ac.f2;
  f.ac3 = ac.f3;
  f.ac4 = ac.f4;
  f.entropy = persistence_entropy(d);
  f.betti_l1 = betti_l1(d);
  f.landscape1_l1 = landscape_l1(d, 1);
  return f;
}

inline PersistenceDiagram degree1_diagram(const PointCloud& cloud, RipsThreshold threshold) {
  if (cloud.size() < 2) return {1, {}};
  return rips_diagram(cloud, 1, threshold).at(1);
}

/// Series -> delay embedding -> Rips H1 -> nine features.
inline TopologicalFeatureVector topological_feature_vector(
    std::span<const double> series, EmbeddingParams embed,
    RipsThreshold threshold = RipsThreshold::enclosing()) {
  return topological_features(degree1_diagram(delay_embed(series, embed), threshold));
}

inline TopologicalFeatureVector topological_feature_vector(
    const TimeSeries& series, EmbeddingParams embed,
    RipsThreshold threshold = RipsThreshold::enclosing()) {
  return topological_feature_vector(std::span<const double>(series.values), embed,
                                    threshold);
}

}  // namespace stochtopo
