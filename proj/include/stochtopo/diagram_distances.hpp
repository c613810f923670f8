#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

#include "stochtopo/persistence.hpp"

namespace stochtopo {

namespace detail {

inline void require_finite(const PersistenceDiagram& d) {
  for (const auto& p : d.pairs)
    if (!p.finite() || !std::isfinite(p.birth))
      throw std::invalid_argument("diagram contains an infinite pair");
}

inline double linf(const PersistencePair& a, const PersistencePair& b) {
  return std::max(std::abs(a.birth - b.birth), std::abs(a.death - b.death));
}

// Hopcroft-Karp on a bipartite graph given as left adjacency lists.
class BipartiteMatcher {
 public:
  explicit BipartiteMatcher(std::size_t left, std::size_t right)
      : adj_(left), match_left_(left), match_right_(right), dist_(left) {}

  void add_edge(std::size_t l, std::size_t r) { adj_[l].push_back(r); }

  std::size_t max_matching() {
    std::fill(match_left_.begin(), match_left_.end(), kNone);
    std::fill(match_right_.begin(), match_right_.end(), kNone);
    std::size_t matched = 0;
    while (bfs())
      for (std::size_t l = 0; l < adj_.size(); ++l)
        if (match_left_[l] == kNone && dfs(l)) ++matched;
    return matched;
  }

 private:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  bool bfs() {
    std::queue<std::size_t> q;
    bool reachable_free = false;
    for (std::size_t l = 0; l < adj_.size(); ++l) {
      if (match_left_[l] == kNone) {
        dist_[l] = 0;
        q.push(l);
      } else {
        dist_[l] = kNone;
      }
    }
    while (!q.empty()) {
      const std::size_t l = q.front();
      q.pop();
      for (std::size_t r : adj_[l]) {
        const std::size_t next = match_right_[r];
        if (next == kNone) {
          reachable_free = true;
        } else if (dist_[next] == kNone) {
          dist_[next] = dist_[l] + 1;
          q.push(next);
        }
      }
    }
    return reachable_free;
  }

  bool dfs(std::size_t l) {
    for (std::size_t r : adj_[l]) {
      const std::size_t next = match_right_[r];
      if (next == kNone || (dist_[next] == dist_[l] + 1 && dfs(next))) {
        match_left_[l] = r;
        match_right_[r] = l;
        return true;
      }
    }
    dist_[l] = kNone;
    return false;
  }

  std::vector<std::vector<std::size_t>> adj_;
  std::vector<std::size_t> match_left_, match_right_, dist_;
};

// Minimum-cost perfect assignment on a square cost matrix (Hungarian method
// with potentials, O(n^3)). Returns column assigned to each row.
inline std::vector<std::size_t> solve_assignment(const std::vector<std::vector<double>>& cost) {
  const std::size_t n = cost.size();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  std::vector<bool> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> row_to_col(n);
  for (std::size_t j = 1; j <= n; ++j) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

}  // namespace detail

/// Bottleneck distance between two finite diagrams. Points may be matched to
/// their diagonal projection at cost lifetime/2.
///
/// Exact: binary search over every candidate edge cost for the smallest one
/// that admits a perfect matching.
inline double bottleneck_distance(const PersistenceDiagram& a, const PersistenceDiagram& b) {
  detail::require_finite(a);
  detail::require_finite(b);
  const std::size_t m = a.size(), n = b.size();
  if (m + n == 0) return 0.0;

  std::vector<double> candidates{0.0};
  for (const auto& p : a.pairs) candidates.push_back(p.lifetime() / 2.0);
  for (const auto& q : b.pairs) candidates.push_back(q.lifetime() / 2.0);
  for (const auto& p : a.pairs)
    for (const auto& q : b.pairs) candidates.push_back(detail::linf(p, q));
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  // Left: a-points then diagonal copies of b. Right: b-points then diagonal
  // copies of a.
  auto feasible = [&](double delta) {
    detail::BipartiteMatcher matcher(m + n, n + m);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j)
        if (detail::linf(a.pairs[i], b.pairs[j]) <= delta) matcher.add_edge(i, j);
      if (a.pairs[i].lifetime() / 2.0 <= delta) matcher.add_edge(i, n + i);
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (b.pairs[j].lifetime() / 2.0 <= delta) matcher.add_edge(m + j, j);
      for (std::size_t i = 0; i < m; ++i) matcher.add_edge(m + j, n + i);
    }
    return matcher.max_matching() == m + n;
  };

  std::size_t lo = 0, hi = candidates.size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (feasible(candidates[mid]))
      hi = mid;
    else
      lo = mid + 1;
  }
  return candidates[lo];
}

/// p-Wasserstein distance with L-infinity ground metric, solved exactly as an
/// assignment problem on the diagonal-augmented diagrams.
inline double wasserstein_distance(const PersistenceDiagram& a, const PersistenceDiagram& b,
                                   double p = 1.0) {
  detail::require_finite(a);
  detail::require_finite(b);
  if (!(p >= 1.0)) throw std::invalid_argument("p must be >= 1");
  const std::size_t m = a.size(), n = b.size();
  const std::size_t size = m + n;
  if (size == 0) return 0.0;

  auto pw = [p](double x) { return p == 1.0 ? x : std::pow(x, p); };
  double forbidden = 1.0;
  std::vector<std::vector<double>> cost(size, std::vector<double>(size, 0.0));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      cost[i][j] = pw(detail::linf(a.pairs[i], b.pairs[j]));
      forbidden += cost[i][j];
    }
  for (std::size_t i = 0; i < m; ++i) forbidden += pw(a.pairs[i].lifetime() / 2.0);
  for (std::size_t j = 0; j < n; ++j) forbidden += pw(b.pairs[j].lifetime() / 2.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k < m; ++k)
      cost[i][n + k] = i == k ? pw(a.pairs[i].lifetime() / 2.0) : forbidden;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k)
      cost[m + j][k] = j == k ? pw(b.pairs[j].lifetime() / 2.0) : forbidden;

  const auto assignment = detail::solve_assignment(cost);
  double total = 0.0;
  for (std::size_t r = 0; r < size; ++r) total += cost[r][assignment[r]];
  return p == 1.0 ? total : std::pow(total, 1.0 / p);
}

}  // namespace stochtopo
