#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "stochtopo/diagram_distances.hpp"
#include "stochtopo/persistence.hpp"
#include "stochtopo/reduction_oracle.hpp"
#include "support/oracles.hpp"

using namespace stochtopo;

namespace {

PointCloud unit_square() { return PointCloud::from_points({{0, 0}, {1, 0}, {1, 1}, {0, 1}}); }

std::vector<double> finite_deaths(const PersistenceDiagram& d) {
  std::vector<double> out;
  for (const auto& p : d.pairs)
    if (p.finite()) out.push_back(p.death);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(Distances, TwoPoints) {
  const auto d = pairwise_distances(PointCloud::from_points({{0, 0}, {3, 0}}));
  EXPECT_EQ(d(0, 1), 3.0);
  EXPECT_EQ(d(1, 0), 3.0);
  EXPECT_EQ(d(0, 0), 0.0);
}

TEST(Distances, UnitSquare) {
  const auto d = pairwise_distances(unit_square());
  std::vector<double> off;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j) off.push_back(d(i, j));
  std::sort(off.begin(), off.end());
  EXPECT_EQ(off, (std::vector<double>{1, 1, 1, 1, std::sqrt(2.0), std::sqrt(2.0)}));
}

TEST(Distances, SinglePoint) {
  const auto d = pairwise_distances(PointCloud::from_points({{4, 2}}));
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d(0, 0), 0.0);
}

TEST(Distances, FromRowsValidates) {
  EXPECT_THROW(DistanceMatrix::from_rows({{0, 1}, {2, 0}}), std::invalid_argument);
  EXPECT_THROW(DistanceMatrix::from_rows({{1, 1}, {1, 0}}), std::invalid_argument);
  EXPECT_THROW(DistanceMatrix::from_rows({{0, -1}, {-1, 0}}), std::invalid_argument);
}

TEST(Rips, UnitSquare) {
  const auto dg = rips_diagram(unit_square(), 1, RipsThreshold::at(10.0));
  ASSERT_EQ(dg.size(), 2u);
  ASSERT_EQ(dg[1].size(), 1u);
  EXPECT_NEAR(dg[1].pairs[0].birth, 1.0, 1e-9);
  EXPECT_NEAR(dg[1].pairs[0].death, std::sqrt(2.0), 1e-9);
  EXPECT_EQ(finite_deaths(dg[0]), (std::vector<double>{1, 1, 1}));
}

TEST(Rips, UnitSquareWithEnclosingThreshold) {
  // Enclosing radius of the square is sqrt(2), so the loop still dies there.
  const auto dg = rips_diagram(unit_square());
  ASSERT_EQ(dg[1].size(), 1u);
  EXPECT_NEAR(dg[1].pairs[0].death, std::sqrt(2.0), 1e-9);
}

TEST(Rips, CollinearPoints) {
  const auto dg = rips_diagram(PointCloud::from_points({{0}, {1}, {2}}), 1, RipsThreshold::at(5));
  EXPECT_TRUE(dg[1].empty());
  EXPECT_EQ(finite_deaths(dg[0]), (std::vector<double>{1, 1}));
}

TEST(Rips, SinglePoint) {
  const auto dg = rips_diagram(PointCloud::from_points({{1, 1}}));
  ASSERT_EQ(dg[0].size(), 1u);
  EXPECT_EQ(dg[0].pairs[0].birth, 0.0);
  EXPECT_TRUE(std::isinf(dg[0].pairs[0].death));
  EXPECT_TRUE(dg[1].empty());
}

TEST(Rips, RejectsBadArguments) {
  EXPECT_THROW(rips_diagram(DistanceMatrix(0)), std::invalid_argument);
  EXPECT_THROW(rips_diagram(unit_square(), 2), std::invalid_argument);
}

TEST(Rips, OpenLoopBelowThreshold) {
  // With the threshold below the diagonal the square's loop never dies.
  const auto dg = rips_diagram(unit_square(), 1, RipsThreshold::at(1.2));
  ASSERT_EQ(dg[1].size(), 1u);
  EXPECT_TRUE(std::isinf(dg[1].pairs[0].death));
}

TEST(Oracle, AgreesOnUnitSquare) {
  const auto d = pairwise_distances(unit_square());
  const auto a = rips_diagram(d);
  const auto b = naive_reduction_oracle(d);
  for (int k = 0; k < 2; ++k) EXPECT_EQ(a[k].sorted().pairs, b[k].sorted().pairs);
}

TEST(Oracle, TwoPointsHaveNoCycles) {
  const auto d = pairwise_distances(PointCloud::from_points({{0, 0}, {2, 1}}));
  EXPECT_TRUE(naive_reduction_oracle(d)[1].empty());
}

TEST(Oracle, AgreesOnRandomEightPointClouds) {
  std::mt19937_64 gen(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const auto cloud = oracle::random_cloud(gen, 8, 2 + trial % 2);
    const auto d = pairwise_distances(cloud);
    for (auto thr : {RipsThreshold::enclosing(), RipsThreshold::at(10.0)}) {
      const auto a = rips_diagram(d, 1, thr);
      const auto b = naive_reduction_oracle(d, 1, thr);
      for (int k = 0; k < 2; ++k) ASSERT_EQ(a[k].sorted().pairs, b[k].sorted().pairs) << trial;
    }
  }
}

TEST(Oracle, AgreesWithTiedDistances) {
  // Integer grids produce many equal edge lengths and zero-persistence classes.
  std::mt19937_64 gen(5);
  std::uniform_int_distribution<int> u(0, 3);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::vector<double>> pts;
    for (int i = 0; i < 9; ++i) pts.push_back({double(u(gen)), double(u(gen))});
    const auto d = pairwise_distances(PointCloud::from_points(pts));
    const auto a = rips_diagram(d, 1, RipsThreshold::at(100));
    const auto b = naive_reduction_oracle(d, 1, RipsThreshold::at(100));
    for (int k = 0; k < 2; ++k) ASSERT_EQ(a[k].sorted().pairs, b[k].sorted().pairs) << trial;
  }
}

TEST(Rips, H0MatchesPrimMst) {
  std::mt19937_64 gen(77);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + trial % 63;
    const auto d = pairwise_distances(oracle::random_cloud(gen, n, 3));
    const auto h0 = rips_diagram(d, 0, RipsThreshold::at(1e9))[0];
    const auto want = oracle::prim_mst_weights(d);
    const auto got = finite_deaths(h0);
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-12);
  }
}

TEST(Rips, BirthNotAfterDeath) {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 30; ++trial) {
    const auto dg = rips_diagram(oracle::random_cloud(gen, 60, 2));
    for (const auto& d : dg)
      for (const auto& p : d.pairs) EXPECT_LE(p.birth, p.death);
  }
}

TEST(Rips, StabilityUnderPerturbation) {
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> e(-1e-3, 1e-3);
  const auto base = oracle::random_cloud(gen, 30, 2);
  const auto h = rips_diagram(base, 1, RipsThreshold::at(10))[1];
  for (int trial = 0; trial < 20; ++trial) {
    auto coords = base.coords();
    for (auto& c : coords) c += e(gen);
    const auto h2 = rips_diagram(PointCloud(2, coords), 1, RipsThreshold::at(10))[1];
    EXPECT_LE(bottleneck_distance(h.finite_part(), h2.finite_part()),
              2e-3 * std::sqrt(2.0) + 1e-9);
  }
}

TEST(Rips, RaisingThresholdKeepsEarlyDeaths) {
  std::mt19937_64 gen(12);
  for (int trial = 0; trial < 30; ++trial) {
    const auto d = pairwise_distances(oracle::random_cloud(gen, 25, 2));
    const double lo = 0.25, hi = 0.6;
    const auto small = rips_diagram(d, 1, RipsThreshold::at(lo))[1].sorted();
    const auto large = rips_diagram(d, 1, RipsThreshold::at(hi))[1].sorted();
    for (const auto& p : small.pairs) {
      if (!(p.death < lo)) continue;
      EXPECT_NE(std::find(large.pairs.begin(), large.pairs.end(), p), large.pairs.end());
    }
  }
}

TEST(Rips, EnclosingRadius) {
  EXPECT_NEAR(enclosing_radius(pairwise_distances(unit_square())), std::sqrt(2.0), 1e-15);
  EXPECT_EQ(enclosing_radius(pairwise_distances(PointCloud::from_points({{0}, {1}, {2}}))), 1.0);
}
