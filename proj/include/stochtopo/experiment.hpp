#pragma once

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "stochtopo/classifiers.hpp"
#include "stochtopo/evaluation.hpp"
#include "stochtopo/featurize.hpp"
#include "stochtopo/io.hpp"
#include "stochtopo/parallel.hpp"
#include "stochtopo/simulation.hpp"

#ifndef STOCHTOPO_VERSION
#define STOCHTOPO_VERSION "0.1.0"
#endif

namespace stochtopo {

struct BenchConfig {
  std::size_t n_series = 50;
  std::size_t min_length = 500;
  std::size_t max_length = 1500;
  std::size_t repeats = 7;
  double t_max = 2.0;
};

struct ExperimentConfig {
  // sampling
  std::size_t n_wiener = 200;
  std::size_t n_cauchy = 200;
  std::size_t n_steps = 500;
  double t_max = 2.0;
  std::uint64_t master_seed = 42;

  // featurization
  EmbeddingChoice embedding;
  std::optional<double> rips_threshold;  // unset: enclosing radius
  std::size_t stat_window = 50;
  std::vector<FeatureSet> feature_sets = {FeatureSet::Raw, FeatureSet::Statistical,
                                          FeatureSet::Topological};

  // classification
  std::vector<ModelKind> models = {kAllModels.begin(), kAllModels.end()};
  ModelSpec model_defaults;  // kind and seed are overwritten per cell
  std::size_t cv_folds = 5;
  double test_fraction = 0.2;
  ModelKind designated_model = ModelKind::KNN;

  // unbalanced sweep: minority count = round(fraction * n_wiener)
  std::vector<double> minority_fractions = {0.01, 0.02, 0.05, 0.10, 0.20};

  std::size_t parallelism = 1;
  BenchConfig bench;

  void validate() const {
    if (feature_sets.empty()) throw std::invalid_argument("at least one feature set is required");
    if (models.empty()) throw std::invalid_argument("at least one model is required");
    for (double f : minority_fractions)
      if (!(f > 0.0 && f <= 1.0)) throw std::invalid_argument("minority fractions must be in (0, 1]");
    if (n_steps < 2 || !(t_max > 0.0)) throw std::invalid_argument("bad sampling parameters");
    if (cv_folds < 2) throw std::invalid_argument("cv_folds must be >= 2");
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
      throw std::invalid_argument("test_fraction must be in (0, 1)");
    if (parallelism < 1) throw std::invalid_argument("parallelism must be >= 1");
    if (bench.n_series < 1 || bench.repeats < 1 || bench.min_length > bench.max_length)
      throw std::invalid_argument("bad bench parameters");
    if (embedding.fixed && (embedding.fixed->tau < 1 || embedding.fixed->dim < 1))
      throw std::invalid_argument("fixed embedding needs tau >= 1 and dim >= 1");
    model_defaults.validate();
  }

  FeaturizeSettings featurize_settings() const {
    FeaturizeSettings s;
    s.embedding = embedding;
    s.threshold = rips_threshold ? RipsThreshold::at(*rips_threshold) : RipsThreshold::enclosing();
    s.stat_window = stat_window;
    return s;
  }

  std::uint64_t split_seed() const { return derive_seed(master_seed, 0x5b117ULL, 0); }
  std::uint64_t cv_seed() const { return derive_seed(master_seed, 0xcf01dULL, 0); }
  std::uint64_t model_seed() const { return derive_seed(master_seed, 0x30de1ULL, 0); }
  std::uint64_t bench_seed() const { return derive_seed(master_seed, 0xbe7cULL, 0); }
};

inline nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json emb;
  emb["mode"] = c.embedding.fixed ? "fixed" : "auto";
  if (c.embedding.fixed) {
    emb["tau"] = c.embedding.fixed->tau;
    emb["dim"] = c.embedding.fixed->dim;
  }
  const auto& s = c.embedding.search;
  emb["tau_max"] = s.tau_max;
  emb["n_bins"] = s.n_bins;
  emb["d_max"] = s.d_max;
  emb["fnn_threshold"] = s.fnn_threshold;
  emb["r_tol"] = s.r_tol;
  emb["a_tol"] = s.a_tol;

  nlohmann::json sets = nlohmann::json::array();
  for (auto f : c.feature_sets) sets.push_back(std::string(to_string(f)));
  nlohmann::json models = nlohmann::json::array();
  for (auto m : c.models) models.push_back(std::string(to_string(m)));
  const auto& m = c.model_defaults;

  return {
      {"sampling",
       {{"n_wiener", c.n_wiener},
        {"n_cauchy", c.n_cauchy},
        {"n_steps", c.n_steps},
        {"t_max", c.t_max},
        {"master_seed", c.master_seed}}},
      {"embedding", emb},
      {"rips", {{"threshold", c.rips_threshold ? nlohmann::json(*c.rips_threshold)
                                               : nlohmann::json("enclosing")}}},
      {"stat_window", c.stat_window},
      {"feature_sets", sets},
      {"models", models},
      {"model_params",
       {{"knn_k", m.knn_k},
        {"lgr_learning_rate", m.lgr_learning_rate},
        {"lgr_iterations", m.lgr_iterations},
        {"lda_ridge", m.lda_ridge},
        {"tree_max_depth", m.tree_max_depth},
        {"tree_min_leaf", m.tree_min_leaf},
        {"forest_trees", m.forest_trees},
        {"forest_max_features", m.forest_max_features},
        {"forest_bootstrap", m.forest_bootstrap}}},
      {"cv_folds", c.cv_folds},
      {"test_fraction", c.test_fraction},
      {"designated_model", std::string(to_string(c.designated_model))},
      {"minority_fractions", c.minority_fractions},
      {"parallelism", c.parallelism},
      {"bench",
       {{"n_series", c.bench.n_series},
        {"min_length", c.bench.min_length},
        {"max_length", c.bench.max_length},
        {"repeats", c.bench.repeats},
        {"t_max", c.bench.t_max}}},
  };
}

namespace detail {

template <typename T>
void read_opt(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace detail

/// Missing keys keep their defaults; unknown keys are rejected so typos fail loudly.
inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  static const std::vector<std::string> known = {
      "sampling", "embedding", "rips", "stat_window", "feature_sets", "models",
      "model_params", "cv_folds", "test_fraction", "designated_model",
      "minority_fractions", "parallelism", "bench", "description"};
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw std::invalid_argument("unknown config key: " + key);

  using detail::read_opt;
  ExperimentConfig c;
  if (j.contains("sampling")) {
    const auto& s = j.at("sampling");
    read_opt(s, "n_wiener", c.n_wiener);
    read_opt(s, "n_cauchy", c.n_cauchy);
    read_opt(s, "n_steps", c.n_steps);
    read_opt(s, "t_max", c.t_max);
    read_opt(s, "master_seed", c.master_seed);
  }
  if (j.contains("embedding")) {
    const auto& e = j.at("embedding");
    const std::string mode = e.value("mode", std::string("auto"));
    if (mode == "fixed") {
      EmbeddingParams p;
      p.tau = e.at("tau").get<std::size_t>();
      p.dim = e.at("dim").get<std::size_t>();
      c.embedding.fixed = p;
    } else if (mode != "auto") {
      throw std::invalid_argument("embedding.mode must be auto or fixed");
    }
    auto& s = c.embedding.search;
    read_opt(e, "tau_max", s.tau_max);
    read_opt(e, "n_bins", s.n_bins);
    read_opt(e, "d_max", s.d_max);
    read_opt(e, "fnn_threshold", s.fnn_threshold);
    read_opt(e, "r_tol", s.r_tol);
    read_opt(e, "a_tol", s.a_tol);
  }
  if (j.contains("rips") && j.at("rips").contains("threshold")) {
    const auto& t = j.at("rips").at("threshold");
    if (t.is_string()) {
      if (t.get<std::string>() != "enclosing")
        throw std::invalid_argument("rips.threshold must be \"enclosing\" or a number");
      c.rips_threshold.reset();
    } else {
      c.rips_threshold = t.get<double>();
    }
  }
  read_opt(j, "stat_window", c.stat_window);
  if (j.contains("feature_sets")) {
    c.feature_sets.clear();
    for (const auto& f : j.at("feature_sets")) c.feature_sets.push_back(parse_feature_set(f.get<std::string>()));
  }
  if (j.contains("models")) {
    c.models.clear();
    for (const auto& m : j.at("models")) c.models.push_back(parse_model_kind(m.get<std::string>()));
  }
  if (j.contains("model_params")) {
    const auto& p = j.at("model_params");
    auto& m = c.model_defaults;
    read_opt(p, "knn_k", m.knn_k);
    read_opt(p, "lgr_learning_rate", m.lgr_learning_rate);
    read_opt(p, "lgr_iterations", m.lgr_iterations);
    read_opt(p, "lda_ridge", m.lda_ridge);
    read_opt(p, "tree_max_depth", m.tree_max_depth);
    read_opt(p, "tree_min_leaf", m.tree_min_leaf);
    read_opt(p, "forest_trees", m.forest_trees);
    read_opt(p, "forest_max_features", m.forest_max_features);
    read_opt(p, "forest_bootstrap", m.forest_bootstrap);
  }
  read_opt(j, "cv_folds", c.cv_folds);
  read_opt(j, "test_fraction", c.test_fraction);
  if (j.contains("designated_model"))
    c.designated_model = parse_model_kind(j.at("designated_model").get<std::string>());
  read_opt(j, "minority_fractions", c.minority_fractions);
  read_opt(j, "parallelism", c.parallelism);
  if (j.contains("bench")) {
    const auto& b = j.at("bench");
    read_opt(b, "n_series", c.bench.n_series);
    read_opt(b, "min_length", c.bench.min_length);
    read_opt(b, "max_length", c.bench.max_length);
    read_opt(b, "repeats", c.bench.repeats);
    read_opt(b, "t_max", c.bench.t_max);
  }
  c.validate();
  return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  auto in = io::open_in(path);
  return config_from_json(nlohmann::json::parse(in));
}

// ---------------------------------------------------------------------------
// Report

struct CvSummary {
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;
  double mean_auc = 0.0;
  std::vector<double> fold_accuracy;
  std::vector<double> fold_auc;
};

inline CvSummary summarize(const CrossValidation& cv) {
  CvSummary s{cv.mean_accuracy, cv.std_accuracy, cv.mean_auc, {}, {}};
  for (const auto& f : cv.folds) {
    s.fold_accuracy.push_back(f.accuracy);
    s.fold_auc.push_back(f.auc);
  }
  return s;
}

struct ResultCell {
  FeatureSet feature_set = FeatureSet::Raw;
  ModelKind model = ModelKind::KNN;
  CvSummary cv;
  EvalReport test;
};

/// Separation summary of one feature set, computed on standardized features.
struct ClassSeparation {
  FeatureSet feature_set = FeatureSet::Raw;
  // Euclidean distances between the class-mean vectors, [Wiener, Cauchy].
  std::array<std::array<double, 2>, 2> class_mean_distance{};
  double mean_intra_wiener = 0.0;
  double mean_intra_cauchy = 0.0;
  double mean_inter = 0.0;
};

struct UnbalancedRow {
  double fraction = 0.0;
  std::size_t minority_count = 0;
  FeatureSet feature_set = FeatureSet::Raw;
  ModelKind model = ModelKind::KNN;
  double cv_mean_auc = 0.0;
  double test_auc = 0.0;
};

struct TimingRow {
  FeatureSet feature_set = FeatureSet::Topological;
  std::string mode;  // "serial" | "parallel"
  std::size_t workers = 1;
  double mean_seconds = 0.0;
  double std_seconds = 0.0;
  std::vector<double> seconds;
};

struct ExperimentReport {
  std::string kind;  // "balanced" | "unbalanced" | "bench"
  nlohmann::json config;
  std::string version = STOCHTOPO_VERSION;
  std::uint64_t master_seed = 0;
  std::uint64_t split_seed = 0;
  std::uint64_t cv_seed = 0;
  std::uint64_t model_seed = 0;

  std::vector<ResultCell> cells;
  std::vector<ClassSeparation> separation;
  std::vector<EmbeddingParams> embeddings;  // per series, when topological features ran
  std::vector<UnbalancedRow> unbalanced;
  std::vector<TimingRow> timing;
  std::optional<bool> bench_bit_identical;

  const ResultCell* find(FeatureSet set, ModelKind model) const {
    for (const auto& c : cells)
      if (c.feature_set == set && c.model == model) return &c;
    return nullptr;
  }
};

inline nlohmann::json to_json(const ExperimentReport& r) {
  nlohmann::json j;
  j["kind"] = r.kind;
  j["config"] = r.config;
  j["provenance"] = {{"version", r.version},
                     {"master_seed", r.master_seed},
                     {"split_seed", r.split_seed},
                     {"cv_seed", r.cv_seed},
                     {"model_seed", r.model_seed}};
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : r.cells)
    cells.push_back({{"feature_set", std::string(to_string(c.feature_set))},
                     {"model", std::string(to_string(c.model))},
                     {"cv",
                      {{"mean_accuracy", c.cv.mean_accuracy},
                       {"std_accuracy", c.cv.std_accuracy},
                       {"mean_auc", c.cv.mean_auc},
                       {"fold_accuracy", c.cv.fold_accuracy},
                       {"fold_auc", c.cv.fold_auc}}},
                     {"test", io::to_json(c.test)}});
  j["cells"] = cells;
  nlohmann::json sep = nlohmann::json::array();
  for (const auto& s : r.separation)
    sep.push_back({{"feature_set", std::string(to_string(s.feature_set))},
                   {"class_mean_distance", s.class_mean_distance},
                   {"mean_intra_wiener", s.mean_intra_wiener},
                   {"mean_intra_cauchy", s.mean_intra_cauchy},
                   {"mean_inter", s.mean_inter}});
  j["separation"] = sep;
  nlohmann::json emb = nlohmann::json::array();
  for (const auto& e : r.embeddings) emb.push_back({e.tau, e.dim});
  j["embeddings"] = emb;
  nlohmann::json unb = nlohmann::json::array();
  for (const auto& u : r.unbalanced)
    unb.push_back({{"fraction", u.fraction},
                   {"minority_count", u.minority_count},
                   {"feature_set", std::string(to_string(u.feature_set))},
                   {"model", std::string(to_string(u.model))},
                   {"cv_mean_auc", u.cv_mean_auc},
                   {"test_auc", u.test_auc}});
  j["unbalanced"] = unb;
  nlohmann::json timing = nlohmann::json::array();
  for (const auto& t : r.timing)
    timing.push_back({{"feature_set", std::string(to_string(t.feature_set))},
                      {"mode", t.mode},
                      {"workers", t.workers},
                      {"mean_seconds", t.mean_seconds},
                      {"std_seconds", t.std_seconds},
                      {"seconds", t.seconds}});
  j["timing"] = timing;
  j["bench_bit_identical"] =
      r.bench_bit_identical ? nlohmann::json(*r.bench_bit_identical) : nlohmann::json(nullptr);
  return j;
}

inline ExperimentReport report_from_json(const nlohmann::json& j) {
  ExperimentReport r;
  r.kind = j.at("kind").get<std::string>();
  r.config = j.at("config");
  const auto& p = j.at("provenance");
  r.version = p.at("version").get<std::string>();
  r.master_seed = p.at("master_seed").get<std::uint64_t>();
  r.split_seed = p.at("split_seed").get<std::uint64_t>();
  r.cv_seed = p.at("cv_seed").get<std::uint64_t>();
  r.model_seed = p.at("model_seed").get<std::uint64_t>();
  for (const auto& c : j.at("cells")) {
    ResultCell cell;
    cell.feature_set = parse_feature_set(c.at("feature_set").get<std::string>());
    cell.model = parse_model_kind(c.at("model").get<std::string>());
    const auto& cv = c.at("cv");
    cell.cv.mean_accuracy = cv.at("mean_accuracy").get<double>();
    cell.cv.std_accuracy = cv.at("std_accuracy").get<double>();
    cell.cv.mean_auc = cv.at("mean_auc").get<double>();
    cell.cv.fold_accuracy = cv.at("fold_accuracy").get<std::vector<double>>();
    cell.cv.fold_auc = cv.at("fold_auc").get<std::vector<double>>();
    cell.test = io::eval_report_from_json(c.at("test"));
    r.cells.push_back(std::move(cell));
  }
  for (const auto& s : j.at("separation")) {
    ClassSeparation cs;
    cs.feature_set = parse_feature_set(s.at("feature_set").get<std::string>());
    cs.class_mean_distance = s.at("class_mean_distance").get<std::array<std::array<double, 2>, 2>>();
    cs.mean_intra_wiener = s.at("mean_intra_wiener").get<double>();
    cs.mean_intra_cauchy = s.at("mean_intra_cauchy").get<double>();
    cs.mean_inter = s.at("mean_inter").get<double>();
    r.separation.push_back(cs);
  }
  for (const auto& e : j.at("embeddings"))
    r.embeddings.push_back({e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>()});
  for (const auto& u : j.at("unbalanced"))
    r.unbalanced.push_back({u.at("fraction").get<double>(), u.at("minority_count").get<std::size_t>(),
                            parse_feature_set(u.at("feature_set").get<std::string>()),
                            parse_model_kind(u.at("model").get<std::string>()),
                            u.at("cv_mean_auc").get<double>(), u.at("test_auc").get<double>()});
  for (const auto& t : j.at("timing"))
    r.timing.push_back({parse_feature_set(t.at("feature_set").get<std::string>()),
                        t.at("mode").get<std::string>(), t.at("workers").get<std::size_t>(),
                        t.at("mean_seconds").get<double>(), t.at("std_seconds").get<double>(),
                        t.at("seconds").get<std::vector<double>>()});
  if (!j.at("bench_bit_identical").is_null())
    r.bench_bit_identical = j.at("bench_bit_identical").get<bool>();
  return r;
}

// ---------------------------------------------------------------------------
// Heatmaps

struct Heatmap {
  std::vector<std::size_t> order;  // original row index of each heatmap row
  std::vector<int> labels;         // label of each heatmap row
  std::vector<std::vector<double>> distances;
  std::vector<std::vector<double>> correlation;
};

/// Pairwise Euclidean distances between rows (z-scored per column unless
/// `standardize` is false), Wiener rows first, plus the Pearson correlation
/// matrix of the feature columns. A constant column correlates 1 with itself
/// and 0 with everything else.
inline Heatmap feature_distance_heatmap(const FeatureMatrix& x, bool standardize = true) {
  if (x.rows < 2) throw std::invalid_argument("heatmap needs at least 2 rows");
  x.validate();
  const FeatureMatrix z = standardize ? Standardizer(x).transform(x) : x;
  Heatmap h;
  for (int c = 0; c < 2; ++c)
    for (std::size_t i = 0; i < x.rows; ++i)
      if (x.labels[i] == c) {
        h.order.push_back(i);
        h.labels.push_back(c);
      }
  const std::size_t n = h.order.size();
  h.distances.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) {
      const auto ra = z.row(h.order[a]);
      const auto rb = z.row(h.order[b]);
      double s = 0.0;
      for (std::size_t k = 0; k < z.cols; ++k) s += (ra[k] - rb[k]) * (ra[k] - rb[k]);
      h.distances[a][b] = h.distances[b][a] = std::sqrt(s);
    }

  const std::size_t p = x.cols;
  std::vector<double> mean(p, 0.0), norm(p, 0.0);
  for (std::size_t k = 0; k < p; ++k) {
    for (std::size_t i = 0; i < x.rows; ++i) mean[k] += x(i, k);
    mean[k] /= static_cast<double>(x.rows);
    for (std::size_t i = 0; i < x.rows; ++i) norm[k] += (x(i, k) - mean[k]) * (x(i, k) - mean[k]);
    norm[k] = std::sqrt(norm[k]);
  }
  h.correlation.assign(p, std::vector<double>(p, 0.0));
  for (std::size_t a = 0; a < p; ++a) {
    h.correlation[a][a] = 1.0;
    for (std::size_t b = a + 1; b < p; ++b) {
      if (norm[a] == 0.0 || norm[b] == 0.0) continue;
      double s = 0.0;
      for (std::size_t i = 0; i < x.rows; ++i) s += (x(i, a) - mean[a]) * (x(i, b) - mean[b]);
      h.correlation[a][b] = h.correlation[b][a] = std::clamp(s / (norm[a] * norm[b]), -1.0, 1.0);
    }
  }
  return h;
}

inline ClassSeparation class_separation(const FeatureMatrix& x) {
  ClassSeparation s;
  s.feature_set = x.kind;
  const Heatmap h = feature_distance_heatmap(x);
  const FeatureMatrix z = Standardizer(x).transform(x);
  std::array<std::vector<double>, 2> centroid{std::vector<double>(z.cols, 0.0),
                                              std::vector<double>(z.cols, 0.0)};
  std::array<double, 2> count{};
  for (std::size_t i = 0; i < z.rows; ++i) {
    const int c = z.labels[i];
    count[c] += 1.0;
    for (std::size_t k = 0; k < z.cols; ++k) centroid[c][k] += z(i, k);
  }
  for (int c = 0; c < 2; ++c)
    for (auto& v : centroid[c]) v = count[c] > 0 ? v / count[c] : 0.0;
  double d = 0.0;
  for (std::size_t k = 0; k < z.cols; ++k) d += (centroid[0][k] - centroid[1][k]) * (centroid[0][k] - centroid[1][k]);
  s.class_mean_distance = {{{0.0, std::sqrt(d)}, {std::sqrt(d), 0.0}}};

  std::array<double, 3> sum{}, pairs{};  // intra W, intra C, inter
  for (std::size_t a = 0; a < h.order.size(); ++a)
    for (std::size_t b = a + 1; b < h.order.size(); ++b) {
      const int slot = h.labels[a] != h.labels[b] ? 2 : h.labels[a];
      sum[slot] += h.distances[a][b];
      pairs[slot] += 1.0;
    }
  s.mean_intra_wiener = pairs[0] > 0 ? sum[0] / pairs[0] : 0.0;
  s.mean_intra_cauchy = pairs[1] > 0 ? sum[1] / pairs[1] : 0.0;
  s.mean_inter = pairs[2] > 0 ? sum[2] / pairs[2] : 0.0;
  return s;
}

// ---------------------------------------------------------------------------
// Runs

/// Everything a run produces. The report is the serializable part; the rest is
/// plot data written by the CLI.
struct ExperimentOutput {
  ExperimentReport report;
  LabeledDataset dataset;
  FeaturizedDataset features;
  std::map<FeatureSet, Heatmap> heatmaps;
};

namespace detail {

inline ExperimentReport report_header(const ExperimentConfig& c, std::string kind) {
  ExperimentReport r;
  r.kind = std::move(kind);
  r.config = to_json(c);
  r.master_seed = c.master_seed;
  r.split_seed = c.split_seed();
  r.cv_seed = c.cv_seed();
  r.model_seed = c.model_seed();
  return r;
}

inline ModelSpec cell_spec(const ExperimentConfig& c, ModelKind kind) {
  ModelSpec spec = c.model_defaults;
  spec.kind = kind;
  spec.seed = c.model_seed();
  return spec;
}

/// CV plus a held-out split for every (feature set, model) pair. Cells are
/// independent and evaluated in parallel; the output order is fixed.
inline std::vector<ResultCell> evaluate_grid(const ExperimentConfig& c,
                                             const FeaturizedDataset& f) {
  struct Job {
    FeatureSet set;
    ModelKind model;
  };
  std::vector<Job> jobs;
  std::map<FeatureSet, FeatureMatrix> matrices;
  for (FeatureSet set : c.feature_sets) {
    matrices.emplace(set, feature_matrix(f, set));
    for (ModelKind m : c.models) jobs.push_back({set, m});
  }
  return parallel_map(jobs.size(), c.parallelism, [&](std::size_t i) {
    const auto& job = jobs[i];
    const FeatureMatrix& x = matrices.at(job.set);
    const ModelSpec spec = cell_spec(c, job.model);
    ResultCell cell;
    cell.feature_set = job.set;
    cell.model = job.model;
    cell.cv = summarize(cross_validate(spec, x, c.cv_folds, c.cv_seed()));
    const auto split = train_test_split(x, c.test_fraction, c.split_seed());
    const Model model = fit(spec, split.train);
    cell.test = evaluate(predict_score(model, split.test), split.test.labels);
    return cell;
  });
}

}  // namespace detail

inline ExperimentOutput run_balanced(const ExperimentConfig& c) {
  c.validate();
  if (c.n_wiener != c.n_cauchy)
    throw std::invalid_argument("balanced run needs equal class counts");
  ExperimentOutput out;
  out.report = detail::report_header(c, "balanced");
  out.dataset = generate_dataset({{ProcessKind::Wiener, c.n_wiener}, {ProcessKind::Cauchy, c.n_cauchy}},
                                 c.n_steps, c.t_max, c.master_seed);
  out.features = featurize_dataset(out.dataset.series, c.feature_sets, c.featurize_settings(),
                                   c.parallelism);
  out.report.cells = detail::evaluate_grid(c, out.features);
  for (FeatureSet set : c.feature_sets) {
    const FeatureMatrix x = feature_matrix(out.features, set);
    out.heatmaps.emplace(set, feature_distance_heatmap(x));
    out.report.separation.push_back(class_separation(x));
  }
  for (const auto& t : out.features.topo) out.report.embeddings.push_back(t.embedding);
  return out;
}

/// Minority class size for a fraction of the majority, at least cv_folds so
/// that stratified CV is defined.
inline std::size_t minority_count(const ExperimentConfig& c, double fraction) {
  const auto m = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(c.n_wiener)));
  return std::max(m, c.cv_folds);
}

/// Majority = n_wiener Wiener series, minority = Cauchy. Each fraction uses the
/// first m Cauchy series of one shared draw; since series seeds depend only on
/// (master seed, class, index), this equals sampling every fraction afresh.
/// report.cells holds the full grid for the headline minority size n_cauchy.
inline ExperimentOutput run_unbalanced(const ExperimentConfig& c) {
  c.validate();
  if (c.n_cauchy < c.cv_folds) throw std::invalid_argument("n_cauchy must be >= cv_folds");
  ExperimentOutput out;
  out.report = detail::report_header(c, "unbalanced");
  std::size_t max_minority = c.n_cauchy;
  for (double f : c.minority_fractions) max_minority = std::max(max_minority, minority_count(c, f));
  out.dataset = generate_dataset({{ProcessKind::Wiener, c.n_wiener}, {ProcessKind::Cauchy, max_minority}},
                                 c.n_steps, c.t_max, c.master_seed);
  out.features = featurize_dataset(out.dataset.series, c.feature_sets, c.featurize_settings(),
                                   c.parallelism);

  // Wiener block followed by the first m Cauchy series.
  auto prefix = [&](std::size_t m) {
    FeaturizedDataset sub;
    sub.has_raw = out.features.has_raw;
    sub.has_stat = out.features.has_stat;
    sub.has_topo = out.features.has_topo;
    for (std::size_t i = 0; i < c.n_wiener + m; ++i) {
      sub.labels.push_back(out.features.labels[i]);
      if (sub.has_raw) sub.raw.push_back(out.features.raw[i]);
      if (sub.has_stat) sub.stat.push_back(out.features.stat[i]);
      if (sub.has_topo) sub.topo.push_back(out.features.topo[i]);
    }
    return sub;
  };

  std::map<std::size_t, std::vector<ResultCell>> by_count;
  for (double fraction : c.minority_fractions) {
    const std::size_t m = minority_count(c, fraction);
    if (!by_count.contains(m)) by_count.emplace(m, detail::evaluate_grid(c, prefix(m)));
    for (const auto& cell : by_count.at(m))
      out.report.unbalanced.push_back(
          {fraction, m, cell.feature_set, cell.model, cell.cv.mean_auc, cell.test.auc});
  }
  if (!by_count.contains(c.n_cauchy)) by_count.emplace(c.n_cauchy, detail::evaluate_grid(c, prefix(c.n_cauchy)));
  out.report.cells = by_count.at(c.n_cauchy);

  const FeaturizedDataset headline = prefix(c.n_cauchy);
  for (FeatureSet set : c.feature_sets) {
    const FeatureMatrix x = feature_matrix(headline, set);
    out.heatmaps.emplace(set, feature_distance_heatmap(x));
    out.report.separation.push_back(class_separation(x));
  }
  for (const auto& t : headline.topo) out.report.embeddings.push_back(t.embedding);
  return out;
}

/// The benchmark's Cauchy series with lengths drawn uniformly from
/// [min_length, max_length].
inline std::vector<TimeSeries> bench_series(const ExperimentConfig& c) {
  Rng rng(c.bench_seed());
  std::vector<TimeSeries> out;
  const std::size_t span = c.bench.max_length - c.bench.min_length + 1;
  for (std::size_t i = 0; i < c.bench.n_series; ++i) {
    const std::size_t len = c.bench.min_length + static_cast<std::size_t>(rng.below(span));
    out.push_back(sample_cauchy(len, c.bench.t_max, series_seed(c.bench_seed(), ProcessKind::Cauchy, i)));
  }
  return out;
}

namespace detail {

inline bool bit_equal(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::bit_cast<std::uint64_t>(a[i]) != std::bit_cast<std::uint64_t>(b[i])) return false;
  return true;
}

inline TimingRow timing_row(FeatureSet set, std::string mode, std::size_t workers,
                            std::vector<double> seconds) {
  TimingRow t{set, std::move(mode), workers, 0.0, 0.0, std::move(seconds)};
  for (double s : t.seconds) t.mean_seconds += s;
  t.mean_seconds /= static_cast<double>(t.seconds.size());
  double ss = 0.0;
  for (double s : t.seconds) ss += (s - t.mean_seconds) * (s - t.mean_seconds);
  t.std_seconds = t.seconds.size() > 1 ? std::sqrt(ss / static_cast<double>(t.seconds.size() - 1)) : 0.0;
  return t;
}

}  // namespace detail

/// Times statistical and topological extraction serially and with
/// config.parallelism workers, and checks the outputs are bit-identical.
inline ExperimentOutput bench_featurization(const ExperimentConfig& c) {
  c.validate();
  ExperimentOutput out;
  out.report = detail::report_header(c, "bench");
  const auto series = bench_series(c);
  const auto settings = c.featurize_settings();
  using clock = std::chrono::steady_clock;

  bool identical = true;
  std::optional<FeaturizedDataset> reference;
  for (FeatureSet set : {FeatureSet::Topological, FeatureSet::Statistical}) {
    for (const auto& [mode, workers] :
         std::vector<std::pair<std::string, std::size_t>>{{"serial", 1}, {"parallel", c.parallelism}}) {
      std::vector<double> seconds;
      for (std::size_t rep = 0; rep < c.bench.repeats; ++rep) {
        const auto t0 = clock::now();
        auto f = featurize_dataset(series, {set}, settings, workers);
        seconds.push_back(std::chrono::duration<double>(clock::now() - t0).count());
        const FeatureMatrix got = feature_matrix(f, set);
        if (!reference || !(set == FeatureSet::Topological ? reference->has_topo : reference->has_stat)) {
          if (!reference) reference.emplace();
          if (set == FeatureSet::Topological) {
            reference->topo = f.topo;
            reference->has_topo = true;
          } else {
            reference->stat = f.stat;
            reference->has_stat = true;
          }
          reference->labels = f.labels;
        } else {
          const FeatureMatrix want = feature_matrix(*reference, set);
          identical = identical && detail::bit_equal(got.data, want.data);
        }
      }
      out.report.timing.push_back(detail::timing_row(set, mode, workers, std::move(seconds)));
    }
  }
  out.report.bench_bit_identical = identical;
  out.features = std::move(*reference);
  return out;
}

}  // namespace stochtopo
