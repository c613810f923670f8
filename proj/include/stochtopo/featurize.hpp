#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "stochtopo/classifiers.hpp"
#include "stochtopo/diagram_features.hpp"
#include "stochtopo/embedding.hpp"
#include "stochtopo/parallel.hpp"
#include "stochtopo/simulation.hpp"
#include "stochtopo/stat_features.hpp"

namespace stochtopo {

/// How the delay embedding is chosen for each series.
struct EmbeddingChoice {
  std::optional<EmbeddingParams> fixed;  // unset: per-series MI + FNN search
  EmbeddingSearch search;

  EmbeddingParams resolve(std::span<const double> x) const {
    return fixed ? *fixed : select_embedding(x, search);
  }
};

struct FeaturizeSettings {
  EmbeddingChoice embedding;
  RipsThreshold threshold = RipsThreshold::enclosing();
  std::size_t stat_window = 50;
};

/// Series values z-scored within the series (population std). A constant
/// series maps to zeros.
inline std::vector<double> raw_features(std::span<const double> x) {
  std::vector<double> z(x.begin(), x.end());
  if (x.empty()) return z;
  const double ref = x[0];
  const double mu = stats::offset_mean(x, ref);
  const double sd = std::sqrt(stats::variance(x, ref));
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = sd > 0.0 ? ((x[i] - ref) - mu) / sd : 0.0;
  return z;
}

struct TopologicalResult {
  EmbeddingParams embedding;
  TopologicalFeatureVector features;
};

inline TopologicalResult featurize_topological(std::span<const double> x,
                                               const FeaturizeSettings& settings) {
  TopologicalResult r;
  r.embedding = settings.embedding.resolve(x);
  r.features = topological_feature_vector(x, r.embedding, settings.threshold);
  return r;
}

/// Per-series feature blocks for a whole dataset, in dataset order.
struct FeaturizedDataset {
  std::vector<int> labels;  // 1 = Cauchy
  std::vector<std::vector<double>> raw;
  std::vector<StatFeatureVector> stat;
  std::vector<TopologicalResult> topo;
  bool has_raw = false, has_stat = false, has_topo = false;
};

inline int binary_label(const TimeSeries& ts) {
  if (!ts.label) throw std::invalid_argument("series has no class label");
  return *ts.label == ProcessKind::Cauchy ? 1 : 0;
}

inline FeaturizedDataset featurize_dataset(const std::vector<TimeSeries>& series,
                                           const std::vector<FeatureSet>& sets,
                                           const FeaturizeSettings& settings,
                                           std::size_t workers) {
  FeaturizedDataset out;
  for (const auto& ts : series) out.labels.push_back(binary_label(ts));
  for (FeatureSet set : sets) {
    switch (set) {
      case FeatureSet::Raw:
        out.has_raw = true;
        out.raw = parallel_map(series.size(), workers,
                               [&](std::size_t i) { return raw_features(series[i].values); });
        break;
      case FeatureSet::Statistical:
        out.has_stat = true;
        out.stat = parallel_map(series.size(), workers, [&](std::size_t i) {
          return stat_feature_vector(series[i].values, settings.stat_window);
        });
        break;
      case FeatureSet::Topological:
        out.has_topo = true;
        out.topo = parallel_map(series.size(), workers, [&](std::size_t i) {
          return featurize_topological(series[i].values, settings);
        });
        break;
    }
  }
  return out;
}

inline FeatureMatrix feature_matrix(const FeaturizedDataset& f, FeatureSet set) {
  FeatureMatrix m;
  m.kind = set;
  switch (set) {
    case FeatureSet::Raw:
      if (!f.has_raw) throw std::invalid_argument("raw features were not computed");
      if (!f.raw.empty())
        for (std::size_t j = 0; j < f.raw.front().size(); ++j)
          m.column_names.push_back("x" + std::to_string(j));
      for (std::size_t i = 0; i < f.raw.size(); ++i) m.add_row(f.raw[i], f.labels[i]);
      break;
    case FeatureSet::Statistical:
      if (!f.has_stat) throw std::invalid_argument("statistical features were not computed");
      for (auto name : StatFeatureVector::kNames) m.column_names.emplace_back(name);
      for (std::size_t i = 0; i < f.stat.size(); ++i) m.add_row(f.stat[i].values(), f.labels[i]);
      break;
    case FeatureSet::Topological:
      if (!f.has_topo) throw std::invalid_argument("topological features were not computed");
      for (auto name : TopologicalFeatureVector::kNames) m.column_names.emplace_back(name);
      for (std::size_t i = 0; i < f.topo.size(); ++i)
        m.add_row(f.topo[i].features.values(), f.labels[i]);
      break;
  }
  m.cols = m.column_names.size();
  return m;
}

}  // namespace stochtopo
