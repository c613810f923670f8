#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <queue>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "stochtopo/embedding.hpp"

namespace stochtopo {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Dense symmetric matrix of pairwise distances with a zero diagonal.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t n) : n_(n), entries_(n * n, 0.0) {}

  // Validates symmetry, zero diagonal and finiteness.
  static DistanceMatrix from_rows(const std::vector<std::vector<double>>& rows) {
    DistanceMatrix m(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != rows.size())
        throw std::invalid_argument("distance matrix must be square");
      for (std::size_t j = 0; j < rows.size(); ++j) m.entries_[i * m.n_ + j] = rows[i][j];
    }
    m.validate();
    return m;
  }

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const noexcept {
    return entries_[i * n_ + j];
  }
  const double* row(std::size_t i) const noexcept { return entries_.data() + i * n_; }
  void set(std::size_t i, std::size_t j, double v) noexcept {
    entries_[i * n_ + j] = v;
    entries_[j * n_ + i] = v;
  }

  void validate() const {
    for (std::size_t i = 0; i < n_; ++i) {
      if ((*this)(i, i) != 0.0) throw std::invalid_argument("nonzero diagonal entry");
      for (std::size_t j = i + 1; j < n_; ++j) {
        const double v = (*this)(i, j);
        if (!std::isfinite(v) || v < 0.0)
          throw std::invalid_argument("distances must be finite and non-negative");
        if (v != (*this)(j, i)) throw std::invalid_argument("distance matrix not symmetric");
      }
    }
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> entries_;
};

/// Euclidean distances, one evaluation per unordered pair.
inline DistanceMatrix pairwise_distances(const PointCloud& cloud) {
  const std::size_t n = cloud.size();
  DistanceMatrix dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = cloud.point(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto q = cloud.point(j);
      double s = 0.0;
      for (std::size_t c = 0; c < p.size(); ++c) s += (p[c] - q[c]) * (p[c] - q[c]);
      dist.set(i, j, std::sqrt(s));
    }
  }
  return dist;
}

/// min over vertices of the largest distance from that vertex. Past this
/// scale the Rips complex is a cone and H1 is trivial.
inline double enclosing_radius(const DistanceMatrix& dist) {
  double best = kInfinity;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    double row_max = 0.0;
    for (std::size_t j = 0; j < dist.size(); ++j) row_max = std::max(row_max, dist(i, j));
    best = std::min(best, row_max);
  }
  return dist.size() == 0 ? 0.0 : best;
}

struct PersistencePair {
  double birth = 0.0;
  double death = kInfinity;

  double lifetime() const noexcept { return death - birth; }
  bool finite() const noexcept { return std::isfinite(death); }

  friend auto operator<=>(const PersistencePair&, const PersistencePair&) = default;
};

struct PersistenceDiagram {
  int degree = 1;
  std::vector<PersistencePair> pairs;

  std::size_t size() const noexcept { return pairs.size(); }
  bool empty() const noexcept { return pairs.empty(); }

  // Largest finite death, 0 when there is none.
  double d_max() const noexcept {
    double m = 0.0;
    for (const auto& p : pairs)
      if (p.finite()) m = std::max(m, p.death);
    return m;
  }

  PersistenceDiagram finite_part() const {
    PersistenceDiagram out{degree, {}};
    for (const auto& p : pairs)
      if (p.finite()) out.pairs.push_back(p);
    return out;
  }

  // Pairs in lexicographic order; makes multiset comparison a plain ==.
  PersistenceDiagram sorted() const {
    PersistenceDiagram out = *this;
    std::sort(out.pairs.begin(), out.pairs.end());
    return out;
  }

  static PersistenceDiagram of(std::vector<PersistencePair> pairs, int degree = 1) {
    return PersistenceDiagram{degree, std::move(pairs)};
  }
};

/// Filtration cutoff for the Rips complex. Unset means the enclosing radius.
struct RipsThreshold {
  std::optional<double> value;

  static RipsThreshold enclosing() { return {}; }
  static RipsThreshold at(double v) { return {v}; }

  double resolve(const DistanceMatrix& dist) const {
    return value ? *value : enclosing_radius(dist);
  }
};

namespace detail {

struct RipsEdge {
  double diam;
  std::uint32_t u, v;  // u < v

  friend bool operator<(const RipsEdge& a, const RipsEdge& b) {
    if (a.diam != b.diam) return a.diam < b.diam;
    if (a.u != b.u) return a.u < b.u;
    return a.v < b.v;
  }
};

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<unsigned char> rank_;
};

// Triangle {a < b < c} in filtration order: diameter, then vertex tuple.
struct RipsTriangle {
  double diam;
  std::uint64_t key;  // (a * n + b) * n + c, preserves lexicographic order

  friend bool operator>(const RipsTriangle& x, const RipsTriangle& y) {
    return x.diam != y.diam ? x.diam > y.diam : x.key > y.key;
  }
};

// Degree-1 persistence by reducing coboundaries of the non-tree edges in
// reverse filtration order. Tree edges are cleared: they kill H0 classes and
// their columns reduce to zero. Triangles are never stored; each column's
// coboundary is regenerated from the distance matrix on demand.
class CoboundaryReducer {
 public:
  CoboundaryReducer(const DistanceMatrix& dist, double threshold,
                    const std::vector<RipsEdge>& edges)
      : dist_(dist), threshold_(threshold), edges_(edges), n_(dist.size()) {}

  void reduce(const std::vector<std::uint32_t>& columns,
              std::vector<PersistencePair>& out) {
    pivots_.reserve(columns.size());
    for (auto it = columns.rbegin(); it != columns.rend(); ++it) reduce_column(*it, out);
  }

 private:
  using Heap = std::priority_queue<RipsTriangle, std::vector<RipsTriangle>,
                                   std::greater<RipsTriangle>>;

  struct Column {
    std::uint32_t edge;
    std::vector<std::uint32_t> extra;  // other edges summed into this column
  };

  std::uint64_t triangle_key(std::uint64_t a, std::uint64_t b, std::uint64_t c) const {
    if (a > b) std::swap(a, b);
    if (b > c) std::swap(b, c);
    if (a > b) std::swap(a, b);
    return (a * n_ + b) * n_ + c;
  }

  void push_coboundary(std::uint32_t e, Heap& heap) const {
    const RipsEdge& edge = edges_[e];
    const double* row_u = dist_.row(edge.u);
    const double* row_v = dist_.row(edge.v);
    for (std::uint32_t k = 0; k < n_; ++k) {
      if (k == edge.u || k == edge.v) continue;
      const double du = row_u[k];
      const double dv = row_v[k];
      if (du > threshold_ || dv > threshold_) continue;
      heap.push({std::max({edge.diam, du, dv}), triangle_key(edge.u, edge.v, k)});
    }
  }

  // Earliest cofacet of equal diameter, if any. Scanning k upwards visits the
  // cofacets in increasing lexicographic order.
  std::optional<std::uint64_t> zero_apparent_cofacet(const RipsEdge& edge) const {
    const double* row_u = dist_.row(edge.u);
    const double* row_v = dist_.row(edge.v);
    const double r = edge.diam;
    for (std::uint32_t k = 0; k < n_; ++k) {
      if (row_u[k] <= r && row_v[k] <= r && k != edge.u && k != edge.v)
        return triangle_key(edge.u, edge.v, k);
    }
    return std::nullopt;
  }

  static std::optional<RipsTriangle> pivot_of(Heap& heap) {
    while (!heap.empty()) {
      const RipsTriangle top = heap.top();
      heap.pop();
      if (!heap.empty() && heap.top().key == top.key) {
        heap.pop();  // Z/2: equal entries cancel
        continue;
      }
      heap.push(top);
      return top;
    }
    return std::nullopt;
  }

  void reduce_column(std::uint32_t e, std::vector<PersistencePair>& out) {
    const RipsEdge& edge = edges_[e];
    if (auto key = zero_apparent_cofacet(edge); key && !pivots_.contains(*key)) {
      columns_.push_back({e, {}});
      pivots_.emplace(*key, columns_.size() - 1);
      return;  // zero persistence
    }

    Heap heap;
    std::vector<std::uint32_t> summed;
    push_coboundary(e, heap);
    while (true) {
      const auto pivot = pivot_of(heap);
      if (!pivot) {
        out.push_back({edge.diam, kInfinity});
        return;
      }
      const auto found = pivots_.find(pivot->key);
      if (found == pivots_.end()) {
        std::sort(summed.begin(), summed.end());
        std::vector<std::uint32_t> extra;
        for (std::size_t i = 0; i < summed.size();) {
          std::size_t j = i;
          while (j < summed.size() && summed[j] == summed[i]) ++j;
          if ((j - i) % 2 == 1) extra.push_back(summed[i]);
          i = j;
        }
        columns_.push_back({e, std::move(extra)});
        pivots_.emplace(pivot->key, columns_.size() - 1);
        if (pivot->diam > edge.diam) out.push_back({edge.diam, pivot->diam});
        return;
      }
      const Column& other = columns_[found->second];
      summed.push_back(other.edge);
      push_coboundary(other.edge, heap);
      for (std::uint32_t x : other.extra) {
        summed.push_back(x);
        push_coboundary(x, heap);
      }
    }
  }

  const DistanceMatrix& dist_;
  double threshold_;
  const std::vector<RipsEdge>& edges_;
  std::uint64_t n_;
  std::vector<Column> columns_;
  std::unordered_map<std::uint64_t, std::size_t> pivots_;
};

}  // namespace detail

/// Vietoris-Rips persistence over Z/2 in degrees 0..max_degree (max 1).
///
/// Simplices are ordered by diameter, then lexicographically by vertex tuple.
/// Degree 0 keeps all n-1 finite pairs, including zero-length ones from
/// duplicate points, plus one infinite pair per component. Degree 1 omits
/// zero-persistence pairs; classes alive at the threshold get death = +inf.
///
/// Returns diagrams indexed by degree.
inline std::vector<PersistenceDiagram> rips_diagram(
    const DistanceMatrix& dist, int max_degree = 1,
    RipsThreshold threshold = RipsThreshold::enclosing()) {
  const std::size_t n = dist.size();
  if (n == 0) throw std::invalid_argument("empty distance matrix");
  if (max_degree < 0 || max_degree > 1)
    throw std::invalid_argument("max_degree must be 0 or 1");
  if (n > std::numeric_limits<std::uint32_t>::max() / 2)
    throw std::invalid_argument("too many points");
  const double cutoff = threshold.resolve(dist);

  std::vector<detail::RipsEdge> edges;
  for (std::uint32_t u = 0; u < n; ++u)
    for (std::uint32_t v = u + 1; v < n; ++v)
      if (dist(u, v) <= cutoff) edges.push_back({dist(u, v), u, v});
  std::sort(edges.begin(), edges.end());

  std::vector<PersistenceDiagram> result;
  PersistenceDiagram h0{0, {}};
  std::vector<std::uint32_t> cycle_edges;
  detail::UnionFind components(n);
  for (std::uint32_t e = 0; e < edges.size(); ++e) {
    if (components.unite(edges[e].u, edges[e].v))
      h0.pairs.push_back({0.0, edges[e].diam});
    else
      cycle_edges.push_back(e);
  }
  const std::size_t essential = n - h0.pairs.size();
  for (std::size_t i = 0; i < essential; ++i) h0.pairs.push_back({0.0, kInfinity});
  result.push_back(std::move(h0));

  if (max_degree >= 1) {
    PersistenceDiagram h1{1, {}};
    detail::CoboundaryReducer reducer(dist, cutoff, edges);
    reducer.reduce(cycle_edges, h1.pairs);
    result.push_back(std::move(h1));
  }
  return result;
}

inline std::vector<PersistenceDiagram> rips_diagram(
    const PointCloud& cloud, int max_degree = 1,
    RipsThreshold threshold = RipsThreshold::enclosing()) {
  return rips_diagram(pairwise_distances(cloud), max_degree, threshold);
}

}  // namespace stochtopo
