#pragma once

#include <algorithm>
#include <array>
#include <iterator>
#include <map>
#include <stdexcept>
#include <vector>

#include "stochtopo/persistence.hpp"

namespace stochtopo {

inline constexpr std::size_t kOracleMaxPoints = 12;

/// Textbook persistence: enumerate every simplex of the 2-skeleton, build the
/// full boundary matrix in filtration order and column-reduce it over Z/2.
/// Intended as an independent check of rips_diagram on small inputs; same
/// output conventions.
inline std::vector<PersistenceDiagram> naive_reduction_oracle(
    const DistanceMatrix& dist, int max_degree = 1,
    RipsThreshold threshold = RipsThreshold::enclosing()) {
  const std::size_t n = dist.size();
  if (n == 0) throw std::invalid_argument("empty distance matrix");
  if (n > kOracleMaxPoints) throw std::invalid_argument("oracle limited to small inputs");
  if (max_degree < 0 || max_degree > 1)
    throw std::invalid_argument("max_degree must be 0 or 1");
  const double cutoff = threshold.resolve(dist);

  struct Simplex {
    double value;
    int dim;
    std::array<std::size_t, 3> verts;  // unused slots = n
  };
  std::vector<Simplex> simplices;
  for (std::size_t a = 0; a < n; ++a) simplices.push_back({0.0, 0, {a, n, n}});
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      if (dist(a, b) <= cutoff) simplices.push_back({dist(a, b), 1, {a, b, n}});
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      for (std::size_t c = b + 1; c < n; ++c) {
        const double v = std::max({dist(a, b), dist(a, c), dist(b, c)});
        if (v <= cutoff) simplices.push_back({v, 2, {a, b, c}});
      }
  std::sort(simplices.begin(), simplices.end(), [](const Simplex& x, const Simplex& y) {
    if (x.value != y.value) return x.value < y.value;
    if (x.dim != y.dim) return x.dim < y.dim;
    return x.verts < y.verts;
  });

  std::map<std::array<std::size_t, 3>, std::size_t> position;
  for (std::size_t i = 0; i < simplices.size(); ++i) position[simplices[i].verts] = i;

  // Columns as sorted row-index lists.
  std::vector<std::vector<std::size_t>> columns(simplices.size());
  for (std::size_t i = 0; i < simplices.size(); ++i) {
    const auto& s = simplices[i];
    if (s.dim == 1) {
      columns[i] = {position.at({s.verts[0], n, n}), position.at({s.verts[1], n, n})};
    } else if (s.dim == 2) {
      const auto [a, b, c] = s.verts;
      columns[i] = {position.at({a, b, n}), position.at({a, c, n}), position.at({b, c, n})};
    }
    std::sort(columns[i].begin(), columns[i].end());
  }

  std::map<std::size_t, std::size_t> low_owner;  // row -> column with that low
  std::vector<bool> paired(simplices.size(), false);
  std::vector<PersistenceDiagram> result;
  for (int d = 0; d <= max_degree; ++d) result.push_back({d, {}});

  for (std::size_t j = 0; j < simplices.size(); ++j) {
    auto& col = columns[j];
    while (!col.empty()) {
      const auto it = low_owner.find(col.back());
      if (it == low_owner.end()) break;
      std::vector<std::size_t> sum;
      std::set_symmetric_difference(col.begin(), col.end(), columns[it->second].begin(),
                                    columns[it->second].end(), std::back_inserter(sum));
      col = std::move(sum);
    }
    if (col.empty()) continue;
    const std::size_t low = col.back();
    low_owner[low] = j;
    paired[low] = paired[j] = true;
    const int degree = simplices[low].dim;
    if (degree > max_degree) continue;
    const double birth = simplices[low].value;
    const double death = simplices[j].value;
    if (degree == 0 || death > birth) result[degree].pairs.push_back({birth, death});
  }
  for (std::size_t i = 0; i < simplices.size(); ++i) {
    const int degree = simplices[i].dim;
    if (paired[i] || degree > max_degree || !columns[i].empty()) continue;
    result[degree].pairs.push_back({simplices[i].value, kInfinity});
  }
  return result;
}

}  // namespace stochtopo
