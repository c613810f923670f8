// Acceptance checks. `acceptance <id>` runs one criterion, `acceptance all`
// runs every one. Each prints a single PASS / FAIL / SKIP line.
// Exit status: 0 pass, 1 fail, 77 skip.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "stochtopo/stochtopo.hpp"
#include "support/oracles.hpp"

#ifndef STOCHTOPO_CONFIG_DIR
#define STOCHTOPO_CONFIG_DIR "configs"
#endif

using namespace stochtopo;

namespace {

enum class Outcome { Pass, Fail, Skip };

struct Result {
  Outcome outcome = Outcome::Fail;
  std::string detail;
};

Result verdict(bool ok, std::string detail) { return {ok ? Outcome::Pass : Outcome::Fail, std::move(detail)}; }

std::string fmt(double v, int prec = 4) {
  std::ostringstream s;
  s.precision(prec);
  s << v;
  return s.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ExperimentConfig shipped(const std::string& name) {
  return load_config(std::string(STOCHTOPO_CONFIG_DIR) + "/" + name);
}

Result oracle_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 gen(1);
  std::uniform_int_distribution<std::size_t> npts(2, 8);
  int mismatches = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto d = pairwise_distances(oracle::random_cloud(gen, npts(gen), 2 + trial % 2));
    const auto a = rips_diagram(d);
    const auto b = naive_reduction_oracle(d);
    for (int k = 0; k < 2; ++k) mismatches += a[k].sorted().pairs != b[k].sorted().pairs;
  }
  const double secs = seconds_since(t0);
  return verdict(mismatches == 0 && secs < 60,
                 "200 clouds, " + std::to_string(mismatches) + " mismatching diagrams, " + fmt(secs) + " s");
}

Result h0_mst() {
  std::mt19937_64 gen(2);
  std::uniform_int_distribution<std::size_t> npts(2, 64);
  double worst = 0.0;
  bool sizes_ok = true;
  for (int trial = 0; trial < 100; ++trial) {
    const auto d = pairwise_distances(oracle::random_cloud(gen, npts(gen), 2 + trial % 3));
    const auto h0 = rips_diagram(d, 0, RipsThreshold::at(1e9))[0];
    std::vector<double> got;
    for (const auto& p : h0.pairs)
      if (p.finite()) got.push_back(p.death);
    std::sort(got.begin(), got.end());
    const auto want = oracle::prim_mst_weights(d);
    if (got.size() != want.size()) {
      sizes_ok = false;
      continue;
    }
    for (std::size_t i = 0; i < got.size(); ++i) worst = std::max(worst, std::abs(got[i] - want[i]));
  }
  return verdict(sizes_ok && worst <= 1e-12, "100 clouds, max |death - MST weight| = " + fmt(worst));
}

Result unit_square() {
  const auto h1 = rips_diagram(PointCloud::from_points({{0, 0}, {1, 0}, {1, 1}, {0, 1}}))[1];
  const bool ok = h1.size() == 1 && std::abs(h1.pairs[0].birth - 1.0) <= 1e-9 &&
                  std::abs(h1.pairs[0].death - std::sqrt(2.0)) <= 1e-9;
  return verdict(ok, "H1 = " + (h1.size() == 1 ? "{(" + fmt(h1.pairs[0].birth, 12) + ", " +
                                                     fmt(h1.pairs[0].death, 12) + ")}"
                                               : std::to_string(h1.size()) + " pairs"));
}

Result vectorization() {
  using D = PersistenceDiagram;
  const double h = persistence_entropy(D::of({{0, 1}, {0, 3}}));
  const auto ac = adcock_carlsson(D::of({{1, 3}}));
  const double l1 = landscape_l1(D::of({{0, 2}}));
  std::mt19937_64 gen(4);
  int identity_failures = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto d = oracle::random_diagram(gen, trial % 30);
    identity_failures += betti_l1(d) != 2.0 * wasserstein_to_diagonal(d);
  }
  const bool ok = std::abs(h - 0.5623) <= 1e-4 && ac.f1 == 2 && ac.f2 == 0 && ac.f3 == 16 &&
                  ac.f4 == 0 && l1 == 1.0 && identity_failures == 0;
  return verdict(ok, "entropy " + fmt(h, 6) + ", AC (" + fmt(ac.f1) + "," + fmt(ac.f2) + "," +
                         fmt(ac.f3) + "," + fmt(ac.f4) + "), landscape_l1 " + fmt(l1) +
                         ", betti_l1 != 2W on " + std::to_string(identity_failures) + "/1000");
}

Result distance_properties() {
  using D = PersistenceDiagram;
  std::mt19937_64 gen(5);
  double worst_self = 0.0;
  int triangle_failures = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = oracle::random_diagram(gen, 1 + trial % 8);
    const auto b = oracle::random_diagram(gen, 1 + (trial * 3) % 8);
    const auto c = oracle::random_diagram(gen, 1 + (trial * 7) % 8);
    worst_self = std::max({worst_self, bottleneck_distance(a, a), wasserstein_distance(a, a)});
    triangle_failures +=
        bottleneck_distance(a, c) > bottleneck_distance(a, b) + bottleneck_distance(b, c) + 1e-9;
    triangle_failures +=
        wasserstein_distance(a, c) > wasserstein_distance(a, b) + wasserstein_distance(b, c) + 1e-9;
  }
  const double bn = bottleneck_distance(D::of({{0, 2}}), D::of({{0, 2.5}}));
  const bool ok = worst_self == 0.0 && std::abs(bn - 0.5) <= 1e-9 && triangle_failures == 0;
  return verdict(ok, "self-distance max " + fmt(worst_self) + ", bottleneck example " + fmt(bn, 12) +
                         ", triangle violations " + std::to_string(triangle_failures) + "/200");
}

Result stability() {
  const double eps = 1e-3;
  std::mt19937_64 gen(6);
  std::uniform_real_distribution<double> noise(-eps, eps);
  std::vector<PointCloud> fixtures;
  for (std::size_t dim : {2, 3}) fixtures.push_back(oracle::random_cloud(gen, 30, dim));
  double worst_slack = -1.0;
  int failures = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto& base = fixtures[trial % fixtures.size()];
    const double bound = 2 * eps * std::sqrt(static_cast<double>(base.dim())) + 1e-9;
    auto coords = base.coords();
    for (auto& c : coords) c += noise(gen);
    const PointCloud moved(base.dim(), coords);
    // Fixed threshold above every distance: the full filtration is compared.
    const auto h = rips_diagram(base, 1, RipsThreshold::at(1e9))[1].finite_part();
    const auto h2 = rips_diagram(moved, 1, RipsThreshold::at(1e9))[1].finite_part();
    const double d = bottleneck_distance(h, h2);
    failures += d > bound;
    worst_slack = std::max(worst_slack, d / bound);
  }
  return verdict(failures == 0, "50 trials, worst distance/bound = " + fmt(worst_slack));
}

Result balanced() {
  const auto t0 = std::chrono::steady_clock::now();
  auto c = shipped("desk_balanced.json");
  c.parallelism = hardware_threads();
  const auto out = run_balanced(c);
  bool ok = true;
  std::string detail;
  for (ModelKind m : c.models) {
    const double raw = out.report.find(FeatureSet::Raw, m)->cv.mean_accuracy;
    const double st = out.report.find(FeatureSet::Statistical, m)->cv.mean_accuracy;
    const double topo = out.report.find(FeatureSet::Topological, m)->cv.mean_accuracy;
    bool cell_ok = topo >= st && st >= raw;
    if (m == ModelKind::KNN) cell_ok = cell_ok && topo - st >= 0.02;
    ok = ok && cell_ok;
    detail += std::string(to_string(m)) + " " + fmt(topo, 3) + "/" + fmt(st, 3) + "/" + fmt(raw, 3) +
              (cell_ok ? "" : "!") + "; ";
  }
  return verdict(ok, "CV accuracy topo/stat/raw: " + detail + fmt(seconds_since(t0), 3) + " s on " +
                         std::to_string(c.parallelism) + " threads");
}

Result unbalanced() {
  const auto t0 = std::chrono::steady_clock::now();
  auto c = shipped("unbalanced.json");
  c.parallelism = hardware_threads();
  c.models = {ModelKind::KNN};
  c.minority_fractions = {static_cast<double>(c.n_cauchy) / static_cast<double>(c.n_wiener)};
  const auto out = run_unbalanced(c);
  const auto auc = [&](FeatureSet s) { return out.report.find(s, ModelKind::KNN)->cv.mean_auc; };
  const auto test_auc = [&](FeatureSet s) { return out.report.find(s, ModelKind::KNN)->test.auc; };
  const double topo = auc(FeatureSet::Topological), st = auc(FeatureSet::Statistical),
               raw = auc(FeatureSet::Raw);
  return verdict(topo > st && topo > raw,
                 std::to_string(c.n_wiener) + "+" + std::to_string(c.n_cauchy) +
                     ", KNN CV AUC topo/stat/raw " + fmt(topo) + "/" + fmt(st) + "/" + fmt(raw) +
                     " (held-out split " + fmt(test_auc(FeatureSet::Topological)) + "/" +
                     fmt(test_auc(FeatureSet::Statistical)) + "/" + fmt(test_auc(FeatureSet::Raw)) +
                     "), " + fmt(seconds_since(t0), 3) + " s");
}

const TimingRow& timing(const ExperimentReport& r, FeatureSet set, const std::string& mode) {
  for (const auto& t : r.timing)
    if (t.feature_set == set && t.mode == mode) return t;
  throw std::logic_error("missing timing row");
}

Result bench_identity_and_ratio() {
  auto c = shipped("bench.json");
  c.parallelism = std::max<std::size_t>(2, hardware_threads());
  const auto out = bench_featurization(c);
  const double topo = timing(out.report, FeatureSet::Topological, "serial").mean_seconds;
  const double st = timing(out.report, FeatureSet::Statistical, "serial").mean_seconds;
  const bool identical = out.report.bench_bit_identical.value_or(false);
  return verdict(identical && topo >= 10 * st,
                 std::string("serial/parallel outputs ") + (identical ? "bit-identical" : "DIFFER") +
                     ", serial topo " + fmt(topo) + " s vs stat " + fmt(st) + " s (" + fmt(topo / st, 3) +
                     "x)");
}

Result bench_speedup() {
  const std::size_t cores = hardware_threads();
  if (cores < 4)
    return {Outcome::Skip, "needs >= 4 hardware threads, found " + std::to_string(cores) +
                               "; parallel speedup unverified on this machine"};
  auto c = shipped("bench.json");
  c.parallelism = cores;
  const auto out = bench_featurization(c);
  const double serial = timing(out.report, FeatureSet::Topological, "serial").mean_seconds;
  const double parallel = timing(out.report, FeatureSet::Topological, "parallel").mean_seconds;
  return verdict(parallel <= 0.7 * serial, "topo parallel/serial = " + fmt(parallel / serial, 3) + " on " +
                                               std::to_string(cores) + " threads");
}

Result stat_sanity() {
  auto noise = [](std::uint64_t seed, std::size_t n) {
    Rng rng(derive_seed(10, 0, seed));
    std::vector<double> x(n);
    for (auto& v : x) v = rng.normal();
    return x;
  };
  double hurst_sum = 0.0;
  for (std::uint64_t s = 0; s < 20; ++s) hurst_sum += hurst_exponent(noise(s, 4096));
  const double hurst = hurst_sum / 20;
  int kpss_below = 0;
  for (std::uint64_t s = 0; s < 200; ++s) kpss_below += kpss_statistic(noise(100 + s, 1000)) < 0.463;
  const double se = spectral_entropy(noise(999, 4096));
  std::vector<double> line(500);
  for (std::size_t t = 0; t < line.size(); ++t) line[t] = 0.25 * static_cast<double>(t) - 3.0;
  const auto f = stat_feature_vector(line);
  const bool ok = std::abs(hurst - 0.5) <= 0.1 && kpss_below >= 190 && se >= 0.9 &&
                  f.linearity == 1.0 && f.std_first_derivative == 0.0;
  return verdict(ok, "white-noise Hurst " + fmt(hurst) + ", KPSS < 0.463 in " + std::to_string(kpss_below) +
                         "/200, spectral entropy " + fmt(se) + ", line linearity " + fmt(f.linearity, 17) +
                         " std_diff " + fmt(f.std_first_derivative));
}

struct Criterion {
  std::string id;
  std::string name;
  std::function<Result()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {"1", "persistence equals boundary-matrix oracle", oracle_equivalence},
      {"2", "H0 deaths equal MST weights", h0_mst},
      {"3", "unit-square H1", unit_square},
      {"4", "vectorization closed forms", vectorization},
      {"5", "diagram distance properties", distance_properties},
      {"6", "H1 stability under perturbation", stability},
      {"7", "balanced study ordering", balanced},
      {"8", "unbalanced study KNN AUC ordering", unbalanced},
      {"9a", "featurization bit-identity and stat/topo cost", bench_identity_and_ratio},
      {"9b", "parallel topological speedup", bench_speedup},
      {"10", "statistical feature sanity", stat_sanity},
  };
  return all;
}

int report(const Criterion& c) {
  Result r;
  try {
    r = c.run();
  } catch (const std::exception& e) {
    r = {Outcome::Fail, std::string("exception: ") + e.what()};
  }
  const char* tag = r.outcome == Outcome::Pass ? "PASS" : r.outcome == Outcome::Fail ? "FAIL" : "SKIP";
  std::printf("%s criterion %s (%s): %s\n", tag, c.id.c_str(), c.name.c_str(), r.detail.c_str());
  std::fflush(stdout);
  return r.outcome == Outcome::Pass ? 0 : r.outcome == Outcome::Fail ? 1 : 77;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string which = argc > 1 ? argv[1] : "all";
  if (which == "all") {
    int failures = 0;
    for (const auto& c : criteria()) failures += report(c) == 1;
    return failures == 0 ? 0 : 1;
  }
  for (const auto& c : criteria())
    if (c.id == which) return report(c);
  std::fprintf(stderr, "unknown criterion: %s\n", which.c_str());
  return 2;
}
