#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "stochtopo/classifiers.hpp"

namespace stochtopo {

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;  // predict positive when score >= threshold
};

struct EvalReport {
  double accuracy = 0.0;
  // confusion[actual][predicted], 0 = negative, 1 = positive.
  std::array<std::array<std::size_t, 2>, 2> confusion{};
  std::vector<RocPoint> roc;
  double auc = 0.0;

  std::size_t total() const {
    return confusion[0][0] + confusion[0][1] + confusion[1][0] + confusion[1][1];
  }
};

/// Accuracy and confusion at threshold 0.5; ROC over every distinct score;
/// AUC by the trapezoid rule, which counts tied positive/negative pairs as 1/2.
inline EvalReport evaluate(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size() || scores.empty())
    throw std::invalid_argument("scores and labels must be non-empty and equal length");
  EvalReport r;
  std::size_t pos = 0, neg = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const int y = labels[i];
    if (y != 0 && y != 1) throw std::invalid_argument("labels must be 0 or 1");
    const int pred = scores[i] >= 0.5 ? 1 : 0;
    ++r.confusion[y][pred];
    (y == 1 ? pos : neg) += 1;
  }
  r.accuracy = static_cast<double>(r.confusion[0][0] + r.confusion[1][1]) /
               static_cast<double>(scores.size());
  if (pos == 0 || neg == 0) throw std::invalid_argument("AUC undefined for a single class");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  r.roc.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double threshold = scores[order[i]];
    while (i < order.size() && scores[order[i]] == threshold) {
      (labels[order[i]] == 1 ? tp : fp) += 1;
      ++i;
    }
    r.roc.push_back({static_cast<double>(fp) / static_cast<double>(neg),
                     static_cast<double>(tp) / static_cast<double>(pos), threshold});
  }
  for (std::size_t i = 1; i < r.roc.size(); ++i)
    r.auc += (r.roc[i].fpr - r.roc[i - 1].fpr) * (r.roc[i].tpr + r.roc[i - 1].tpr) / 2.0;
  return r;
}

struct TrainTestSplit {
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
  FeatureMatrix train;
  FeatureMatrix test;
};

namespace detail {

inline std::array<std::vector<std::size_t>, 2> shuffled_by_class(const FeatureMatrix& x,
                                                                 std::uint64_t seed) {
  std::array<std::vector<std::size_t>, 2> by_class;
  for (std::size_t i = 0; i < x.rows; ++i) by_class[x.labels[i]].push_back(i);
  for (int c = 0; c < 2; ++c) {
    Rng rng(derive_seed(seed, 0x57a7ULL, static_cast<std::uint64_t>(c)));
    shuffle(by_class[c], rng);
  }
  return by_class;
}

}  // namespace detail

/// Stratified split; each class contributes round(fraction * count) test rows.
inline TrainTestSplit train_test_split(const FeatureMatrix& x, double test_fraction,
                                       std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw std::invalid_argument("test_fraction must be in (0, 1)");
  x.validate();
  auto by_class = detail::shuffled_by_class(x, seed);
  TrainTestSplit s;
  for (const auto& members : by_class) {
    if (members.size() < 2) throw std::invalid_argument("each class needs >= 2 members");
    auto n_test = static_cast<std::size_t>(
        std::llround(test_fraction * static_cast<double>(members.size())));
    n_test = std::clamp<std::size_t>(n_test, 1, members.size() - 1);
    s.test_rows.insert(s.test_rows.end(), members.begin(), members.begin() + n_test);
    s.train_rows.insert(s.train_rows.end(), members.begin() + n_test, members.end());
  }
  std::sort(s.train_rows.begin(), s.train_rows.end());
  std::sort(s.test_rows.begin(), s.test_rows.end());
  s.train = x.subset(s.train_rows);
  s.test = x.subset(s.test_rows);
  return s;
}

/// Stratified fold index for every row: rows of each class, shuffled, are
/// dealt round-robin into k folds.
inline std::vector<std::size_t> stratified_folds(const FeatureMatrix& x, std::size_t k,
                                                 std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("k must be >= 2");
  x.validate();
  const auto by_class = detail::shuffled_by_class(x, seed);
  std::vector<std::size_t> fold(x.rows, 0);
  for (const auto& members : by_class) {
    if (members.size() < k) throw std::invalid_argument("each class needs >= k members");
    for (std::size_t i = 0; i < members.size(); ++i) fold[members[i]] = i % k;
  }
  return fold;
}

struct CrossValidation {
  std::vector<EvalReport> folds;
  std::vector<std::size_t> fold_of_row;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;
  double mean_auc = 0.0;
};

/// k-fold stratified CV. Standardization is refit inside every training fold.
inline CrossValidation cross_validate(const ModelSpec& spec, const FeatureMatrix& x,
                                      std::size_t k = 5, std::uint64_t seed = 0) {
  CrossValidation cv;
  cv.fold_of_row = stratified_folds(x, k, seed);
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<std::size_t> train_rows, test_rows;
    for (std::size_t i = 0; i < x.rows; ++i)
      (cv.fold_of_row[i] == f ? test_rows : train_rows).push_back(i);
    const FeatureMatrix train = x.subset(train_rows);
    const FeatureMatrix test = x.subset(test_rows);
    const Model model = fit(spec, train);
    const auto scores = predict_score(model, test);
    cv.folds.push_back(evaluate(scores, test.labels));
  }
  double acc = 0.0, auc = 0.0;
  for (const auto& r : cv.folds) {
    acc += r.accuracy;
    auc += r.auc;
  }
  cv.mean_accuracy = acc / static_cast<double>(k);
  cv.mean_auc = auc / static_cast<double>(k);
  double ss = 0.0;
  for (const auto& r : cv.folds) ss += (r.accuracy - cv.mean_accuracy) * (r.accuracy - cv.mean_accuracy);
  cv.std_accuracy = std::sqrt(ss / static_cast<double>(k));
  return cv;
}

}  // namespace stochtopo
