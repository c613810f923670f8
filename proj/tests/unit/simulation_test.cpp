#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "stochtopo/rng.hpp"
#include "stochtopo/simulation.hpp"

using namespace stochtopo;

namespace {

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(lo);
  return lo + 1 < v.size() ? v[lo] * (1 - frac) + v[lo + 1] * frac : v[lo];
}

}  // namespace

TEST(Wiener, TwoStepsIsOneNormalDraw) {
  const auto ts = sample_wiener(2, 1.0, 99);
  Rng rng(99);
  ASSERT_EQ(ts.size(), 2u);
  EXPECT_EQ(ts.values[0], 0.0);
  EXPECT_EQ(ts.values[1], rng.normal());
  EXPECT_EQ(ts.dt, 1.0);
}

TEST(Wiener, TerminalVarianceEqualsHorizon) {
  std::vector<double> end;
  for (std::uint64_t s = 0; s < 10000; ++s) end.push_back(sample_wiener(20, 2.0, s).values.back());
  double m = 0, ss = 0;
  for (double v : end) m += v;
  m /= end.size();
  for (double v : end) ss += (v - m) * (v - m);
  EXPECT_NEAR(ss / (end.size() - 1), 2.0, 0.1);
}

TEST(Wiener, PooledIncrementVariance) {
  std::vector<double> inc;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto ts = sample_wiener(500, 2.0, s);
    for (std::size_t k = 1; k < ts.size(); ++k) inc.push_back((ts.values[k] - ts.values[k - 1]) / std::sqrt(ts.dt));
  }
  ASSERT_GE(inc.size(), 10000u);
  double m = 0, ss = 0;
  for (double v : inc) m += v;
  m /= inc.size();
  for (double v : inc) ss += (v - m) * (v - m);
  const double var = ss / (inc.size() - 1);
  EXPECT_GE(var, 0.9);
  EXPECT_LE(var, 1.1);
}

TEST(Cauchy, ScaledIncrementQuartiles) {
  std::vector<double> z;
  for (std::uint64_t s = 0; s < 10000; ++s) {
    const auto ts = sample_cauchy(10, 2.0, s);
    z.push_back((ts.values[5] - ts.values[4]) / ts.dt);
  }
  EXPECT_NEAR(quantile(z, 0.5), 0.0, 0.05);
  EXPECT_NEAR(quantile(z, 0.75) - quantile(z, 0.25), 2.0, 0.1);
}

TEST(Simulation, SameSeedIsBitIdentical) {
  EXPECT_EQ(sample_wiener(300, 2.0, 5).values, sample_wiener(300, 2.0, 5).values);
  EXPECT_EQ(sample_cauchy(300, 2.0, 5).values, sample_cauchy(300, 2.0, 5).values);
  EXPECT_NE(sample_cauchy(300, 2.0, 5).values, sample_cauchy(300, 2.0, 6).values);
}

TEST(Simulation, RejectsBadArguments) {
  EXPECT_THROW(sample_wiener(1, 1.0, 0), std::invalid_argument);
  EXPECT_THROW(sample_cauchy(10, 0.0, 0), std::invalid_argument);
  EXPECT_THROW(sample_cauchy(10, -1.0, 0), std::invalid_argument);
  EXPECT_THROW(generate_dataset({{ProcessKind::Wiener, 0}}, 10, 1.0, 0), std::invalid_argument);
}

TEST(Dataset, BalancedShape) {
  const auto ds = generate_dataset({{ProcessKind::Wiener, 1000}, {ProcessKind::Cauchy, 1000}}, 500, 2.0, 1);
  ASSERT_EQ(ds.series.size(), 2000u);
  for (std::size_t i = 0; i < ds.series.size(); ++i) {
    EXPECT_EQ(ds.series[i].size(), 500u);
    EXPECT_EQ(ds.series[i].t_max, 2.0);
    EXPECT_EQ(*ds.series[i].label, i < 1000 ? ProcessKind::Wiener : ProcessKind::Cauchy);
  }
}

TEST(Dataset, UnbalancedMinority) {
  const auto ds = generate_dataset({{ProcessKind::Wiener, 1000}, {ProcessKind::Cauchy, 50}}, 500, 2.0, 1);
  EXPECT_EQ(ds.series.size(), 1050u);
  EXPECT_EQ(ds.class_counts.at(ProcessKind::Cauchy), 50u);
}

TEST(Dataset, SmallestValid) {
  const auto ds = generate_dataset({{ProcessKind::Wiener, 1}, {ProcessKind::Cauchy, 1}}, 2, 1.0, 1);
  ASSERT_EQ(ds.series.size(), 2u);
  EXPECT_EQ(ds.series[0].size(), 2u);
  EXPECT_EQ(ds.series[1].size(), 2u);
}

TEST(Dataset, PureFunctionOfArguments) {
  const auto a = generate_dataset({{ProcessKind::Wiener, 5}, {ProcessKind::Cauchy, 5}}, 50, 2.0, 17);
  const auto b = generate_dataset({{ProcessKind::Wiener, 5}, {ProcessKind::Cauchy, 5}}, 50, 2.0, 17);
  for (std::size_t i = 0; i < a.series.size(); ++i) EXPECT_EQ(a.series[i].values, b.series[i].values);
  // A prefix of a larger draw is the same series.
  const auto c = generate_dataset({{ProcessKind::Wiener, 5}, {ProcessKind::Cauchy, 9}}, 50, 2.0, 17);
  for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(a.series[i].values, c.series[i].values);
}

TEST(Rng, ShuffleIsPermutation) {
  std::vector<int> v(100);
  for (int i = 0; i < 100; ++i) v[i] = i;
  Rng rng(3);
  shuffle(v, rng);
  auto s = v;
  std::sort(s.begin(), s.end());
  for (int i = 0; i < 100; ++i) EXPECT_EQ(s[i], i);
  EXPECT_NE(v, s);
}

TEST(Rng, BelowStaysInRange) {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) EXPECT_LT(rng.below(7), 7u);
}
