#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "stochtopo/rng.hpp"

namespace stochtopo {

enum class FeatureSet { Raw, Statistical, Topological };

inline std::string_view to_string(FeatureSet set) {
  switch (set) {
    case FeatureSet::Raw: return "raw";
    case FeatureSet::Statistical: return "stat";
    case FeatureSet::Topological: return "topo";
  }
  return "?";
}

inline FeatureSet parse_feature_set(std::string_view name) {
  if (name == "raw") return FeatureSet::Raw;
  if (name == "stat" || name == "statistical") return FeatureSet::Statistical;
  if (name == "topo" || name == "topological") return FeatureSet::Topological;
  throw std::invalid_argument("unknown feature set: " + std::string(name));
}

/// Row-major design matrix with binary labels (1 = positive class).
struct FeatureMatrix {
  FeatureSet kind = FeatureSet::Raw;
  std::vector<std::string> column_names;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;
  std::vector<int> labels;

  std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
  std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  void add_row(std::span<const double> values, int label) {
    if (rows == 0 && cols == 0) cols = values.size();
    if (values.size() != cols) throw std::invalid_argument("row width mismatch");
    data.insert(data.end(), values.begin(), values.end());
    labels.push_back(label);
    ++rows;
  }

  FeatureMatrix subset(std::span<const std::size_t> indices) const {
    FeatureMatrix out;
    out.kind = kind;
    out.column_names = column_names;
    out.cols = cols;
    for (std::size_t i : indices) out.add_row(row(i), labels[i]);
    return out;
  }

  void validate() const {
    if (labels.size() != rows || data.size() != rows * cols)
      throw std::invalid_argument("feature matrix shape mismatch");
    for (double v : data)
      if (!std::isfinite(v)) throw std::invalid_argument("non-finite feature value");
    for (int y : labels)
      if (y != 0 && y != 1) throw std::invalid_argument("labels must be 0 or 1");
  }

  std::size_t count(int label) const {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
  }
};

/// Per-column z-scoring fit on training rows. Constant columns are only
/// centred.
class Standardizer {
 public:
  Standardizer() = default;

  explicit Standardizer(const FeatureMatrix& train) : mean_(train.cols), scale_(train.cols, 1.0) {
    const double n = static_cast<double>(train.rows);
    for (std::size_t j = 0; j < train.cols; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < train.rows; ++i) s += train(i, j);
      const double mu = s / n;
      double ss = 0.0;
      for (std::size_t i = 0; i < train.rows; ++i) ss += (train(i, j) - mu) * (train(i, j) - mu);
      const double sd = std::sqrt(ss / n);
      mean_[j] = mu;
      scale_[j] = sd > 0.0 ? sd : 1.0;
    }
  }

  std::vector<double> transform(std::span<const double> row) const {
    std::vector<double> out(row.size());
    for (std::size_t j = 0; j < row.size(); ++j) out[j] = (row[j] - mean_[j]) / scale_[j];
    return out;
  }

  FeatureMatrix transform(const FeatureMatrix& m) const {
    FeatureMatrix out = m;
    for (std::size_t i = 0; i < m.rows; ++i) {
      const auto z = transform(m.row(i));
      std::copy(z.begin(), z.end(), out.row(i).begin());
    }
    return out;
  }

 private:
  std::vector<double> mean_;
  std::vector<double> scale_;
};

enum class ModelKind { KNN, LogisticRegression, LDA, DecisionTree, RandomForest };

inline std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::KNN: return "KNN";
    case ModelKind::LogisticRegression: return "LGR";
    case ModelKind::LDA: return "LDA";
    case ModelKind::DecisionTree: return "DCT";
    case ModelKind::RandomForest: return "RFT";
  }
  return "?";
}

inline ModelKind parse_model_kind(std::string_view name) {
  if (name == "KNN" || name == "knn") return ModelKind::KNN;
  if (name == "LGR" || name == "lgr" || name == "LogisticRegression") return ModelKind::LogisticRegression;
  if (name == "LDA" || name == "lda") return ModelKind::LDA;
  if (name == "DCT" || name == "dct" || name == "DecisionTree") return ModelKind::DecisionTree;
  if (name == "RFT" || name == "rft" || name == "RF" || name == "RandomForest") return ModelKind::RandomForest;
  throw std::invalid_argument("unknown model: " + std::string(name));
}

inline constexpr std::array<ModelKind, 5> kAllModels = {
    ModelKind::KNN, ModelKind::LogisticRegression, ModelKind::LDA,
    ModelKind::DecisionTree, ModelKind::RandomForest};

struct ModelSpec {
  ModelKind kind = ModelKind::KNN;
  std::size_t knn_k = 5;
  double lgr_learning_rate = 0.1;
  std::size_t lgr_iterations = 500;
  double lda_ridge = 1e-6;
  std::size_t tree_max_depth = 10;
  std::size_t tree_min_leaf = 2;
  std::size_t forest_trees = 100;
  std::size_t forest_max_features = 0;  // 0 = floor(sqrt(p)), at least 1
  bool forest_bootstrap = true;
  std::uint64_t seed = 0;

  void validate() const {
    if (knn_k < 1) throw std::invalid_argument("knn_k must be >= 1");
    if (!(lgr_learning_rate > 0.0)) throw std::invalid_argument("learning rate must be > 0");
    if (!(lda_ridge >= 0.0)) throw std::invalid_argument("lda_ridge must be >= 0");
    if (tree_max_depth < 1 || tree_min_leaf < 1)
      throw std::invalid_argument("tree depth and min leaf must be >= 1");
    if (forest_trees < 1) throw std::invalid_argument("forest needs at least one tree");
  }

  static ModelSpec of(ModelKind kind, std::uint64_t seed = 0) {
    ModelSpec s;
    s.kind = kind;
    s.seed = seed;
    return s;
  }
};

namespace detail {

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

struct KnnModel {
  FeatureMatrix train;  // standardised
  std::size_t k = 5;

  double score(std::span<const double> q) const {
    std::vector<std::pair<double, std::size_t>> d(train.rows);
    for (std::size_t i = 0; i < train.rows; ++i) {
      const auto r = train.row(i);
      double s = 0.0;
      for (std::size_t j = 0; j < r.size(); ++j) s += (r[j] - q[j]) * (r[j] - q[j]);
      d[i] = {s, i};
    }
    const std::size_t kk = std::min(k, d.size());
    std::partial_sort(d.begin(), d.begin() + kk, d.end());
    std::size_t positives = 0;
    for (std::size_t i = 0; i < kk; ++i) positives += train.labels[d[i].second] == 1;
    return static_cast<double>(positives) / static_cast<double>(kk);
  }
};

// Full-batch gradient descent on the mean log-loss, zero initialisation.
struct LogisticModel {
  std::vector<double> w;
  double b = 0.0;

  LogisticModel() = default;
  LogisticModel(const FeatureMatrix& x, double lr, std::size_t iterations) : w(x.cols, 0.0) {
    const double n = static_cast<double>(x.rows);
    std::vector<double> grad(x.cols);
    for (std::size_t it = 0; it < iterations; ++it) {
      std::fill(grad.begin(), grad.end(), 0.0);
      double grad_b = 0.0;
      for (std::size_t i = 0; i < x.rows; ++i) {
        const double r = sigmoid(linear(x.row(i))) - x.labels[i];
        const auto row = x.row(i);
        for (std::size_t j = 0; j < x.cols; ++j) grad[j] += r * row[j];
        grad_b += r;
      }
      for (std::size_t j = 0; j < x.cols; ++j) w[j] -= lr * grad[j] / n;
      b -= lr * grad_b / n;
    }
  }

  double linear(std::span<const double> q) const {
    double z = b;
    for (std::size_t j = 0; j < w.size(); ++j) z += w[j] * q[j];
    return z;
  }
  double score(std::span<const double> q) const { return sigmoid(linear(q)); }
};

// Two Gaussians with a shared (ridge-regularised) covariance; the posterior
// of the positive class is a logistic function of a linear score.
struct LdaModel {
  Eigen::VectorXd w;
  double b = 0.0;

  LdaModel() = default;
  LdaModel(const FeatureMatrix& x, double ridge) {
    const std::size_t p = x.cols;
    const std::size_t n1 = x.count(1), n0 = x.count(0);
    if (n0 == 0 || n1 == 0) throw std::invalid_argument("LDA needs both classes");
    Eigen::VectorXd mu0 = Eigen::VectorXd::Zero(p), mu1 = Eigen::VectorXd::Zero(p);
    for (std::size_t i = 0; i < x.rows; ++i) {
      const auto r = Eigen::Map<const Eigen::VectorXd>(x.row(i).data(), p);
      (x.labels[i] == 1 ? mu1 : mu0) += r;
    }
    mu0 /= static_cast<double>(n0);
    mu1 /= static_cast<double>(n1);
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(p, p);
    for (std::size_t i = 0; i < x.rows; ++i) {
      const auto r = Eigen::Map<const Eigen::VectorXd>(x.row(i).data(), p);
      const Eigen::VectorXd c = r - (x.labels[i] == 1 ? mu1 : mu0);
      cov.selfadjointView<Eigen::Lower>().rankUpdate(c);
    }
    cov = cov.selfadjointView<Eigen::Lower>();
    const double dof = x.rows > 2 ? static_cast<double>(x.rows - 2) : 1.0;
    cov /= dof;
    cov.diagonal().array() += ridge;
    w = cov.ldlt().solve(mu1 - mu0);
    b = -0.5 * w.dot(mu0 + mu1) +
        std::log(static_cast<double>(n1) / static_cast<double>(n0));
  }

  double score(std::span<const double> q) const {
    const auto v = Eigen::Map<const Eigen::VectorXd>(q.data(), static_cast<Eigen::Index>(q.size()));
    return sigmoid(w.dot(v) + b);
  }
};

// CART tree with Gini splits. Leaves store the positive-class fraction.
class DecisionTreeModel {
 public:
  struct Options {
    std::size_t max_depth = 10;
    std::size_t min_leaf = 2;
    std::size_t max_features = 0;  // 0 = all features
  };

  DecisionTreeModel() = default;
  DecisionTreeModel(const FeatureMatrix& x, std::vector<std::size_t> sample, Options opt,
                    std::uint64_t seed)
      : opt_(opt) {
    Rng rng(seed);
    build(x, sample, 0, rng);
  }

  double score(std::span<const double> q) const {
    std::size_t node = 0;
    while (nodes_[node].feature != kLeaf)
      node = q[nodes_[node].feature] <= nodes_[node].threshold ? nodes_[node].left
                                                               : nodes_[node].right;
    return nodes_[node].value;
  }

  std::size_t node_count() const noexcept { return nodes_.size(); }

 private:
  static constexpr std::size_t kLeaf = static_cast<std::size_t>(-1);

  struct Node {
    std::size_t feature = kLeaf;
    double threshold = 0.0;
    std::size_t left = 0, right = 0;
    double value = 0.0;
  };

  static double gini(double pos, double total) {
    if (total <= 0.0) return 0.0;
    const double p = pos / total;
    return 2.0 * p * (1.0 - p);
  }

  std::vector<std::size_t> candidate_features(std::size_t p, Rng& rng) const {
    std::vector<std::size_t> features(p);
    std::iota(features.begin(), features.end(), std::size_t{0});
    const std::size_t m = opt_.max_features == 0 ? p : std::min(opt_.max_features, p);
    if (m < p) {
      for (std::size_t i = 0; i < m; ++i) {
        const std::size_t j = i + rng.below(p - i);
        std::swap(features[i], features[j]);
      }
      features.resize(m);
      std::sort(features.begin(), features.end());
    }
    return features;
  }

  std::size_t build(const FeatureMatrix& x, std::vector<std::size_t>& sample,
                    std::size_t depth, Rng& rng) {
    const std::size_t id = nodes_.size();
    nodes_.emplace_back();
    const double total = static_cast<double>(sample.size());
    double pos = 0.0;
    for (std::size_t i : sample) pos += x.labels[i];
    nodes_[id].value = total > 0.0 ? pos / total : 0.0;
    const double parent = gini(pos, total);
    if (depth >= opt_.max_depth || parent == 0.0 || sample.size() < 2 * opt_.min_leaf)
      return id;

    double best_impurity = parent * total;
    std::size_t best_feature = kLeaf;
    double best_threshold = 0.0;
    std::vector<std::size_t> order(sample);
    for (std::size_t f : candidate_features(x.cols, rng)) {
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double va = x(a, f), vb = x(b, f);
        return va != vb ? va < vb : a < b;
      });
      double left_pos = 0.0;
      for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        left_pos += x.labels[order[i]];
        const std::size_t n_left = i + 1, n_right = order.size() - n_left;
        const double lo = x(order[i], f), hi = x(order[i + 1], f);
        if (lo == hi || n_left < opt_.min_leaf || n_right < opt_.min_leaf) continue;
        const double nl = static_cast<double>(n_left), nr = static_cast<double>(n_right);
        const double impurity = gini(left_pos, nl) * nl + gini(pos - left_pos, nr) * nr;
        if (impurity < best_impurity) {
          best_impurity = impurity;
          best_feature = f;
          best_threshold = lo + (hi - lo) / 2.0;
        }
      }
    }
    if (best_feature == kLeaf) return id;

    std::vector<std::size_t> left, right;
    for (std::size_t i : sample) (x(i, best_feature) <= best_threshold ? left : right).push_back(i);
    sample.clear();
    sample.shrink_to_fit();
    const std::size_t l = build(x, left, depth + 1, rng);
    const std::size_t r = build(x, right, depth + 1, rng);
    nodes_[id].feature = best_feature;
    nodes_[id].threshold = best_threshold;
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
  }

  Options opt_;
  std::vector<Node> nodes_;
};

struct ForestModel {
  std::vector<DecisionTreeModel> trees;

  double score(std::span<const double> q) const {
    double s = 0.0;
    for (const auto& t : trees) s += t.score(q);
    return s / static_cast<double>(trees.size());
  }
};

}  // namespace detail

/// A fitted classifier: the training-set standardizer plus the model.
class Model {
 public:
  Model(ModelSpec spec, Standardizer scaler,
        std::variant<detail::KnnModel, detail::LogisticModel, detail::LdaModel,
                     detail::DecisionTreeModel, detail::ForestModel>
            impl)
      : spec_(spec), scaler_(std::move(scaler)), impl_(std::move(impl)) {}

  const ModelSpec& spec() const noexcept { return spec_; }

  // Positive-class score in [0, 1].
  double score(std::span<const double> raw_row) const {
    const auto z = scaler_.transform(raw_row);
    return std::visit([&](const auto& m) { return m.score(z); }, impl_);
  }

 private:
  ModelSpec spec_;
  Standardizer scaler_;
  std::variant<detail::KnnModel, detail::LogisticModel, detail::LdaModel,
               detail::DecisionTreeModel, detail::ForestModel>
      impl_;
};

inline Model fit(const ModelSpec& spec, const FeatureMatrix& train) {
  spec.validate();
  if (train.rows == 0) throw std::invalid_argument("empty training set");
  train.validate();
  Standardizer scaler(train);
  const FeatureMatrix z = scaler.transform(train);

  std::vector<std::size_t> all(z.rows);
  std::iota(all.begin(), all.end(), std::size_t{0});
  detail::DecisionTreeModel::Options tree_opt{spec.tree_max_depth, spec.tree_min_leaf, 0};

  switch (spec.kind) {
    case ModelKind::KNN:
      return Model(spec, scaler, detail::KnnModel{z, spec.knn_k});
    case ModelKind::LogisticRegression:
      return Model(spec, scaler,
                   detail::LogisticModel(z, spec.lgr_learning_rate, spec.lgr_iterations));
    case ModelKind::LDA:
      return Model(spec, scaler, detail::LdaModel(z, spec.lda_ridge));
    case ModelKind::DecisionTree:
      return Model(spec, scaler, detail::DecisionTreeModel(z, all, tree_opt, spec.seed));
    case ModelKind::RandomForest: {
      auto opt = tree_opt;
      opt.max_features = spec.forest_max_features != 0
                             ? spec.forest_max_features
                             : std::max<std::size_t>(
                                   1, static_cast<std::size_t>(
                                          std::sqrt(static_cast<double>(z.cols))));
      detail::ForestModel forest;
      forest.trees.reserve(spec.forest_trees);
      for (std::size_t t = 0; t < spec.forest_trees; ++t) {
        const std::uint64_t tree_seed = derive_seed(spec.seed, 0xf0e57ULL, t);
        std::vector<std::size_t> sample = all;
        if (spec.forest_bootstrap) {
          Rng rng(derive_seed(tree_seed, 0xb007ULL, 0));
          for (auto& s : sample) s = rng.below(z.rows);
        }
        forest.trees.emplace_back(z, std::move(sample), opt, tree_seed);
      }
      return Model(spec, scaler, std::move(forest));
    }
  }
  throw std::invalid_argument("unknown model kind");
}

inline std::vector<double> predict_score(const Model& model, const FeatureMatrix& rows) {
  std::vector<double> scores(rows.rows);
  for (std::size_t i = 0; i < rows.rows; ++i) scores[i] = model.score(rows.row(i));
  return scores;
}

inline std::vector<int> predict_label(const Model& model, const FeatureMatrix& rows) {
  std::vector<int> out;
  for (double s : predict_score(model, rows)) out.push_back(s >= 0.5 ? 1 : 0);
  return out;
}

}  // namespace stochtopo
