// Command-line front end: simulate, featurize, classify, experiment, bench.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "stochtopo/stochtopo.hpp"

namespace fs = std::filesystem;
using namespace stochtopo;

namespace {

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
  std::optional<std::size_t> parallel;
  std::optional<std::string> feature_set;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "JSON experiment config")->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "override the master seed");
  cmd->add_option("--out-dir", o.out_dir, "output directory")->capture_default_str();
  cmd->add_option("--parallel", o.parallel, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--feature-set", o.feature_set, "restrict to one feature set")
      ->check(CLI::IsMember({"raw", "stat", "topo"}));
}

ExperimentConfig resolve_config(const CommonOptions& o) {
  ExperimentConfig c = o.config_path.empty() ? ExperimentConfig{} : load_config(o.config_path);
  if (o.seed) c.master_seed = *o.seed;
  if (o.parallel) c.parallelism = *o.parallel;
  if (o.feature_set) c.feature_sets = {parse_feature_set(*o.feature_set)};
  c.validate();
  return c;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  auto out = io::open_out(path);
  out << j.dump(2) << '\n';
}

LabeledDataset load_or_simulate(const ExperimentConfig& c, const std::string& dataset_path) {
  if (dataset_path.empty())
    return generate_dataset({{ProcessKind::Wiener, c.n_wiener}, {ProcessKind::Cauchy, c.n_cauchy}},
                            c.n_steps, c.t_max, c.master_seed);
  auto in = io::open_in(dataset_path);
  return io::read_dataset_csv(in, c.t_max);
}

void write_features(const fs::path& dir, const FeaturizedDataset& f,
                    const std::vector<FeatureSet>& sets) {
  for (FeatureSet set : sets) {
    auto out = io::open_out(dir / ("features_" + std::string(to_string(set)) + ".csv"));
    io::write_features_csv(out, feature_matrix(f, set));
  }
  if (f.has_topo) {
    auto out = io::open_out(dir / "embeddings.csv");
    out << "series_id,tau,dim\n";
    for (std::size_t i = 0; i < f.topo.size(); ++i)
      out << i << ',' << f.topo[i].embedding.tau << ',' << f.topo[i].embedding.dim << '\n';
  }
}

void write_plot_data(const fs::path& dir, const ExperimentConfig& c, const ExperimentOutput& o) {
  for (const auto& cell : o.report.cells) {
    if (cell.model != c.designated_model) continue;
    const std::string tag = std::string(to_string(cell.feature_set)) + "_" +
                            std::string(to_string(cell.model));
    auto roc = io::open_out(dir / ("roc_" + tag + ".csv"));
    io::write_roc_csv(roc, cell.test);
    auto conf = io::open_out(dir / ("confusion_" + tag + ".csv"));
    io::write_confusion_csv(conf, cell.test);
  }
  for (const auto& [set, h] : o.heatmaps) {
    const std::string name(to_string(set));
    auto d = io::open_out(dir / ("heatmap_distances_" + name + ".csv"));
    io::write_matrix_csv(d, h.distances);
    std::vector<std::string> cols;
    if (set == FeatureSet::Statistical)
      for (auto n : StatFeatureVector::kNames) cols.emplace_back(n);
    else if (set == FeatureSet::Topological)
      for (auto n : TopologicalFeatureVector::kNames) cols.emplace_back(n);
    auto corr = io::open_out(dir / ("heatmap_correlation_" + name + ".csv"));
    io::write_matrix_csv(corr, h.correlation, cols);
  }
  auto cv = io::open_out(dir / "cv_summary.csv");
  cv << "feature_set,model,mean_accuracy,std_accuracy,mean_auc,test_accuracy,test_auc\n";
  for (const auto& cell : o.report.cells)
    cv << to_string(cell.feature_set) << ',' << to_string(cell.model) << ','
       << io::format_double(cell.cv.mean_accuracy) << ',' << io::format_double(cell.cv.std_accuracy)
       << ',' << io::format_double(cell.cv.mean_auc) << ',' << io::format_double(cell.test.accuracy)
       << ',' << io::format_double(cell.test.auc) << '\n';
}

void write_timing(const fs::path& dir, const ExperimentReport& r) {
  auto out = io::open_out(dir / "timing.csv");
  out << "feature_set,mode,workers,mean_seconds,std_seconds\n";
  for (const auto& t : r.timing)
    out << to_string(t.feature_set) << ',' << t.mode << ',' << t.workers << ','
        << io::format_double(t.mean_seconds) << ',' << io::format_double(t.std_seconds) << '\n';
}

void print_cells(const ExperimentReport& r) {
  for (const auto& cell : r.cells)
    std::cout << to_string(cell.feature_set) << '\t' << to_string(cell.model)
              << "\tcv_acc=" << cell.cv.mean_accuracy << "\tcv_auc=" << cell.cv.mean_auc
              << "\ttest_acc=" << cell.test.accuracy << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wiener vs Cauchy classification with persistent homology features"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(STOCHTOPO_VERSION));

  CommonOptions sim_o, feat_o, cls_o, exp_o, bench_o;
  std::string dataset_path, features_path, study;
  bool dump_diagrams = false;

  auto* sim = app.add_subcommand("simulate", "sample a labelled dataset");
  add_common(sim, sim_o);

  auto* feat = app.add_subcommand("featurize", "compute feature matrices");
  add_common(feat, feat_o);
  feat->add_option("--dataset", dataset_path, "dataset CSV (default: simulate from config)")
      ->check(CLI::ExistingFile);
  feat->add_flag("--diagrams", dump_diagrams, "also write per-series H0/H1 diagrams");

  auto* cls = app.add_subcommand("classify", "cross-validate models on a features CSV");
  add_common(cls, cls_o);
  cls->add_option("--features", features_path, "features CSV (default: featurize from config)")
      ->check(CLI::ExistingFile);

  auto* exp = app.add_subcommand("experiment", "run a full study");
  add_common(exp, exp_o);
  exp->add_option("study", study, "balanced | unbalanced")
      ->required()
      ->check(CLI::IsMember({"balanced", "unbalanced"}));

  auto* bench = app.add_subcommand("bench", "serial vs parallel featurization timing");
  add_common(bench, bench_o);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      const auto c = resolve_config(sim_o);
      const auto ds = load_or_simulate(c, "");
      auto out = io::open_out(fs::path(sim_o.out_dir) / "dataset.csv");
      io::write_dataset_csv(out, ds);
      auto manifest = io::dataset_manifest(ds);
      manifest["config"] = to_json(c);
      write_json(fs::path(sim_o.out_dir) / "manifest.json", manifest);
      std::cout << "wrote " << ds.series.size() << " series to " << sim_o.out_dir << '\n';
    } else if (feat->parsed()) {
      const auto c = resolve_config(feat_o);
      const auto ds = load_or_simulate(c, dataset_path);
      const auto settings = c.featurize_settings();
      const auto f = featurize_dataset(ds.series, c.feature_sets, settings, c.parallelism);
      write_features(feat_o.out_dir, f, c.feature_sets);
      if (dump_diagrams) {
        for (std::size_t i = 0; i < ds.series.size(); ++i) {
          const auto emb = f.has_topo ? f.topo[i].embedding : settings.embedding.resolve(ds.series[i].values);
          const auto dgms = rips_diagram(delay_embed(ds.series[i].values, emb), 1, settings.threshold);
          auto out = io::open_out(fs::path(feat_o.out_dir) / "diagrams" /
                                  ("series_" + std::to_string(i) + ".csv"));
          io::write_diagram_csv(out, dgms);
        }
      }
      std::cout << "featurized " << ds.series.size() << " series into " << feat_o.out_dir << '\n';
    } else if (cls->parsed()) {
      auto c = resolve_config(cls_o);
      FeaturizedDataset f;
      ExperimentOutput o;
      o.report.kind = "classify";
      o.report.config = to_json(c);
      o.report.master_seed = c.master_seed;
      o.report.split_seed = c.split_seed();
      o.report.cv_seed = c.cv_seed();
      o.report.model_seed = c.model_seed();
      std::vector<ResultCell> cells;
      auto run_matrix = [&](const FeatureMatrix& x) {
        for (ModelKind m : c.models) {
          ModelSpec spec = c.model_defaults;
          spec.kind = m;
          spec.seed = c.model_seed();
          ResultCell cell;
          cell.feature_set = x.kind;
          cell.model = m;
          cell.cv = summarize(cross_validate(spec, x, c.cv_folds, c.cv_seed()));
          const auto split = train_test_split(x, c.test_fraction, c.split_seed());
          cell.test = evaluate(predict_score(fit(spec, split.train), split.test), split.test.labels);
          o.report.cells.push_back(std::move(cell));
        }
      };
      if (!features_path.empty()) {
        if (c.feature_sets.size() != 1)
          throw std::invalid_argument("--features needs --feature-set to name the columns' set");
        auto in = io::open_in(features_path);
        run_matrix(io::read_features_csv(in, c.feature_sets.front()));
      } else {
        const auto ds = load_or_simulate(c, "");
        f = featurize_dataset(ds.series, c.feature_sets, c.featurize_settings(), c.parallelism);
        for (FeatureSet set : c.feature_sets) run_matrix(feature_matrix(f, set));
      }
      write_json(fs::path(cls_o.out_dir) / "report.json", to_json(o.report));
      write_plot_data(cls_o.out_dir, c, o);
      print_cells(o.report);
    } else if (exp->parsed()) {
      const auto c = resolve_config(exp_o);
      const fs::path dir = exp_o.out_dir;
      const auto o = study == "balanced" ? run_balanced(c) : run_unbalanced(c);
      write_json(dir / "report.json", to_json(o.report));
      write_features(dir, o.features, c.feature_sets);
      write_plot_data(dir, c, o);
      if (study == "unbalanced") {
        auto out = io::open_out(dir / "auc_table.csv");
        out << "fraction,minority_count,feature_set,model,cv_mean_auc,test_auc\n";
        for (const auto& u : o.report.unbalanced)
          out << io::format_double(u.fraction) << ',' << u.minority_count << ','
              << to_string(u.feature_set) << ',' << to_string(u.model) << ','
              << io::format_double(u.cv_mean_auc) << ',' << io::format_double(u.test_auc) << '\n';
      }
      print_cells(o.report);
    } else if (bench->parsed()) {
      auto c = resolve_config(bench_o);
      if (!bench_o.parallel && bench_o.config_path.empty()) c.parallelism = hardware_threads();
      const auto o = bench_featurization(c);
      write_json(fs::path(bench_o.out_dir) / "report.json", to_json(o.report));
      write_timing(bench_o.out_dir, o.report);
      for (const auto& t : o.report.timing)
        std::cout << to_string(t.feature_set) << '\t' << t.mode << '\t' << t.workers << '\t'
                  << t.mean_seconds << " s +- " << t.std_seconds << '\n';
      std::cout << "bit-identical: " << (*o.report.bench_bit_identical ? "yes" : "no") << '\n';
      if (!*o.report.bench_bit_identical) return 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
