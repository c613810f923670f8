#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "stochtopo/diagram_distances.hpp"
#include "stochtopo/diagram_features.hpp"
#include "support/oracles.hpp"

using namespace stochtopo;

namespace {

PersistenceDiagram dg(std::vector<PersistencePair> p) { return PersistenceDiagram::of(std::move(p)); }

double numeric_landscape_l1(const PersistenceDiagram& d, std::size_t k) {
  double lo = 0, hi = 0;
  for (const auto& p : d.pairs) {
    lo = std::min(lo, p.birth);
    hi = std::max(hi, p.death);
  }
  const int steps = 200000;
  const double h = (hi - lo) / steps;
  double area = 0.0;
  for (int i = 0; i < steps; ++i)
    area += 0.5 * h * (landscape_eval(d, k, lo + i * h) + landscape_eval(d, k, lo + (i + 1) * h));
  return area;
}

}  // namespace

TEST(ToDiagonal, Wasserstein) {
  EXPECT_EQ(wasserstein_to_diagonal(dg({})), 0.0);
  EXPECT_EQ(wasserstein_to_diagonal(dg({{0, 2}, {1, 3}})), 2.0);
  EXPECT_EQ(wasserstein_to_diagonal(dg({{1.5, 1.5}})), 0.0);
}

TEST(ToDiagonal, Bottleneck) {
  EXPECT_EQ(bottleneck_to_diagonal(dg({})), 0.0);
  EXPECT_EQ(bottleneck_to_diagonal(dg({{0, 2}, {1, 3}})), 1.0);
  EXPECT_EQ(bottleneck_to_diagonal(dg({{0, 4}})), 2.0);
}

TEST(Bottleneck, Examples) {
  EXPECT_EQ(bottleneck_distance(dg({{0, 2}, {1, 3}}), dg({{0, 2}, {1, 3}})), 0.0);
  EXPECT_NEAR(bottleneck_distance(dg({{0, 2}}), dg({{0, 2.5}})), 0.5, 1e-9);
  EXPECT_EQ(bottleneck_distance(dg({{0, 2}}), dg({})), 1.0);
  EXPECT_EQ(bottleneck_distance(dg({}), dg({})), 0.0);
}

TEST(Wasserstein, Examples) {
  EXPECT_EQ(wasserstein_distance(dg({{0, 2}, {1, 3}}), dg({{0, 2}, {1, 3}})), 0.0);
  EXPECT_NEAR(wasserstein_distance(dg({{0, 2}}), dg({{0, 2.5}})), 0.5, 1e-12);
  EXPECT_NEAR(wasserstein_distance(dg({{0, 2}, {1, 3}}), dg({})), 2.0, 1e-12);
}

TEST(Distances, MatchBruteForceEnumeration) {
  std::mt19937_64 gen(31);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = oracle::random_diagram(gen, trial % 5);
    const auto b = oracle::random_diagram(gen, (trial / 5) % 5);
    const auto want = oracle::brute_force_distances(a.pairs, b.pairs);
    EXPECT_NEAR(wasserstein_distance(a, b), want.wasserstein, 1e-9);
    EXPECT_NEAR(bottleneck_distance(a, b), want.bottleneck, 1e-12);
  }
}

TEST(Distances, SelfDistanceIsZero) {
  std::mt19937_64 gen(1);
  for (int trial = 0; trial < 50; ++trial) {
    const auto d = oracle::random_diagram(gen, 1 + trial % 12);
    EXPECT_EQ(bottleneck_distance(d, d), 0.0);
    EXPECT_NEAR(wasserstein_distance(d, d), 0.0, 1e-12);
  }
}

TEST(Distances, TriangleInequality) {
  std::mt19937_64 gen(2);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = oracle::random_diagram(gen, 1 + trial % 7);
    const auto b = oracle::random_diagram(gen, 1 + (trial * 3) % 7);
    const auto c = oracle::random_diagram(gen, 1 + (trial * 5) % 7);
    EXPECT_LE(bottleneck_distance(a, c), bottleneck_distance(a, b) + bottleneck_distance(b, c) + 1e-9);
    EXPECT_LE(wasserstein_distance(a, c), wasserstein_distance(a, b) + wasserstein_distance(b, c) + 1e-9);
  }
}

TEST(Distances, BottleneckToDiagonalIsDistanceToEmpty) {
  std::mt19937_64 gen(4);
  for (int trial = 0; trial < 50; ++trial) {
    const auto d = oracle::random_diagram(gen, trial % 9);
    EXPECT_EQ(bottleneck_to_diagonal(d), bottleneck_distance(d, dg({})));
  }
}

TEST(Distances, RejectInfinitePairs) {
  EXPECT_THROW(bottleneck_distance(dg({{0, kInfinity}}), dg({})), std::invalid_argument);
}

TEST(AdcockCarlsson, Examples) {
  const auto a = adcock_carlsson(dg({{1, 3}}));
  EXPECT_EQ(a.f1, 2.0);
  EXPECT_EQ(a.f2, 0.0);
  EXPECT_EQ(a.f3, 16.0);
  EXPECT_EQ(a.f4, 0.0);
  const auto e = adcock_carlsson(dg({}));
  EXPECT_EQ(e.f1 + e.f2 + e.f3 + e.f4, 0.0);
  const auto b = adcock_carlsson(dg({{0, 1}, {1, 2}}));
  EXPECT_EQ(b.f1, 1.0);
  EXPECT_EQ(b.f2, 1.0);
  EXPECT_EQ(b.f3, 1.0);
  EXPECT_EQ(b.f4, 1.0);
}

TEST(Entropy, Examples) {
  EXPECT_EQ(persistence_entropy(dg({{0, 1}})), 0.0);
  EXPECT_NEAR(persistence_entropy(dg({{0, 1}, {2, 3}})), std::log(2.0), 1e-12);
  EXPECT_NEAR(persistence_entropy(dg({{0, 1}, {0, 3}})), 0.5623, 1e-4);
  EXPECT_NEAR(persistence_entropy(dg({{0, 1}, {0, 3}})),
              -(0.25 * std::log(0.25) + 0.75 * std::log(0.75)), 1e-15);
}

TEST(Entropy, BoundedByLogCount) {
  std::mt19937_64 gen(6);
  for (int trial = 0; trial < 100; ++trial) {
    const auto d = oracle::random_diagram(gen, 1 + trial % 20);
    std::size_t positive = 0;
    for (const auto& p : d.pairs) positive += p.lifetime() > 0;
    EXPECT_LE(persistence_entropy(d), std::log(static_cast<double>(positive)) + 1e-12);
  }
}

TEST(Landscape, Evaluation) {
  EXPECT_EQ(landscape_eval(dg({{0, 2}}), 1, 1.0), 1.0);
  for (double t : {-1.0, 0.0, 0.5, 1.0, 3.0}) EXPECT_EQ(landscape_eval(dg({{0, 2}}), 2, t), 0.0);
}

TEST(Landscape, L1Examples) {
  EXPECT_EQ(landscape_l1(dg({{0, 2}})), 1.0);
  EXPECT_EQ(landscape_l1(dg({})), 0.0);
  EXPECT_EQ(landscape_l1(dg({{0, 2}, {0, 2}}), 2), 1.0);
}

TEST(Landscape, L1MatchesNumericIntegration) {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto d = oracle::random_diagram(gen, 1 + trial % 6);
    for (std::size_t k = 1; k <= 3; ++k)
      EXPECT_NEAR(landscape_l1(d, k), numeric_landscape_l1(d, k), 1e-6) << trial << " k=" << k;
  }
}

TEST(Landscape, L1BelowBettiL1) {
  std::mt19937_64 gen(10);
  for (int trial = 0; trial < 100; ++trial) {
    const auto d = oracle::random_diagram(gen, trial % 15);
    EXPECT_LE(landscape_l1(d, 1), betti_l1(d) + 1e-12);
  }
}

TEST(Landscape, TwoCirclesGiveTwoMaxima) {
  // Two linked circles: a densely sampled small one and a sparse large one,
  // so the two loops are born and die at separate scales.
  std::vector<std::vector<double>> pts;
  for (int i = 0; i < 40; ++i) {
    const double a = 2 * std::numbers::pi * i / 40;
    pts.push_back({std::cos(a), std::sin(a), 0.0});
  }
  for (int i = 0; i < 12; ++i) {
    const double a = 2 * std::numbers::pi * i / 12;
    pts.push_back({3.0 + 3.0 * std::cos(a), 0.0, 3.0 * std::sin(a)});
  }
  const auto h1 = rips_diagram(PointCloud::from_points(pts), 1, RipsThreshold::at(100))[1];
  std::vector<double> lam;
  for (int i = 0; i <= 6000; ++i) lam.push_back(landscape_eval(h1, 1, i * 1e-3));
  int maxima = 0;
  for (std::size_t i = 1; i + 1 < lam.size(); ++i)
    if (lam[i] > lam[i - 1] && lam[i] >= lam[i + 1] && lam[i] > 0.05) ++maxima;
  EXPECT_EQ(maxima, 2);
}

TEST(Betti, Examples) {
  EXPECT_EQ(betti_curve(dg({{0, 2}, {1, 3}}), 1.5), 2u);
  EXPECT_EQ(betti_curve(dg({{0, 2}, {1, 3}}), 3.0), 0u);
  EXPECT_EQ(betti_l1(dg({{0, 2}, {1, 3}})), 4.0);
  EXPECT_EQ(betti_l1(dg({})), 0.0);
}

TEST(Betti, FigureFixture) {
  const auto d = dg({{0.5, 3.0}, {1.0, 4.0}, {2.0, 3.5}, {0.2, 1.0}});
  EXPECT_EQ(betti_curve(d, 2.5), 3u);
  EXPECT_EQ(betti_curve(d, 3.2), 2u);
}

TEST(Betti, L1IsTwiceWassersteinToDiagonal) {
  std::mt19937_64 gen(12);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto d = oracle::random_diagram(gen, trial % 25);
    EXPECT_EQ(betti_l1(d), 2.0 * wasserstein_to_diagonal(d));
  }
}

TEST(FeatureVector, PermutationInvariant) {
  std::mt19937_64 gen(14);
  for (int trial = 0; trial < 50; ++trial) {
    auto d = oracle::random_diagram(gen, 2 + trial % 10);
    const auto f = topological_features(d);
    std::shuffle(d.pairs.begin(), d.pairs.end(), gen);
    EXPECT_EQ(topological_features(d), f);
  }
}

TEST(FeatureVector, ConstantSeriesIsZero) {
  const std::vector<double> x(100, 3.0);
  const auto f = topological_feature_vector(x, {2, 3});
  for (double v : f.values()) EXPECT_EQ(v, 0.0);
}

TEST(FeatureVector, UnitSquareCloud) {
  const auto cloud = PointCloud::from_points({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  const auto f = topological_features(degree1_diagram(cloud, RipsThreshold::enclosing()));
  EXPECT_NEAR(f.wasserstein_diag, (std::sqrt(2.0) - 1) / 2, 1e-12);
  EXPECT_NEAR(f.bottleneck_diag, (std::sqrt(2.0) - 1) / 2, 1e-12);
  EXPECT_EQ(f.entropy, 0.0);
  EXPECT_NEAR(f.betti_l1, std::sqrt(2.0) - 1, 1e-12);
  EXPECT_NEAR(f.landscape1_l1, std::pow((std::sqrt(2.0) - 1) / 2, 2), 1e-12);
}

TEST(FeatureVector, IdenticalSeriesIdenticalVectors) {
  const auto x = oracle::white_noise(3, 300);
  const auto y = x;
  EXPECT_EQ(topological_feature_vector(x, {1, 3}), topological_feature_vector(y, {1, 3}));
}
