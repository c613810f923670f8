#pragma once

#include <cmath>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "stochtopo/classifiers.hpp"
#include "stochtopo/evaluation.hpp"
#include "stochtopo/persistence.hpp"
#include "stochtopo/simulation.hpp"

namespace stochtopo::io {

// Shortest representation that parses back to the same double; "inf" for
// +infinity.
inline std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::invalid_argument("bad number: " + std::string(s));
  return v;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    if (!cell.empty() && cell.back() == '\r') cell.pop_back();
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

inline std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return in;
}

// Dataset: series_id,label,t_index,value
inline void write_dataset_csv(std::ostream& out, const LabeledDataset& ds) {
  out << "series_id,label,t_index,value\n";
  for (std::size_t s = 0; s < ds.series.size(); ++s) {
    const auto& ts = ds.series[s];
    const std::string label = ts.label ? std::string(to_string(*ts.label)) : "";
    for (std::size_t t = 0; t < ts.size(); ++t)
      out << s << ',' << label << ',' << t << ',' << format_double(ts.values[t]) << '\n';
  }
}

inline nlohmann::json dataset_manifest(const LabeledDataset& ds) {
  nlohmann::json j;
  j["n_steps"] = ds.n_steps;
  j["t_max"] = ds.t_max;
  j["master_seed"] = ds.master_seed;
  nlohmann::json counts = nlohmann::json::object();
  for (const auto& [kind, count] : ds.class_counts) counts[std::string(to_string(kind))] = count;
  j["class_counts"] = counts;
  nlohmann::json series = nlohmann::json::array();
  for (std::size_t s = 0; s < ds.series.size(); ++s) {
    const auto& ts = ds.series[s];
    series.push_back({{"series_id", s},
                      {"label", ts.label ? std::string(to_string(*ts.label)) : ""},
                      {"seed", ts.seed},
                      {"length", ts.size()}});
  }
  j["series"] = series;
  return j;
}

/// Reads a dataset CSV. Rows of one series must be contiguous and in t order.
/// t_max is taken from the manifest when given, otherwise length - 1.
inline LabeledDataset read_dataset_csv(std::istream& in, double t_max = 0.0) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty dataset file");
  std::map<std::size_t, std::size_t> position;
  LabeledDataset ds;
  std::vector<std::vector<double>> values;
  std::vector<std::optional<ProcessKind>> labels;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 4) throw std::invalid_argument("dataset row needs 4 columns");
    const auto id = static_cast<std::size_t>(std::stoull(cells[0]));
    auto [it, inserted] = position.emplace(id, values.size());
    if (inserted) {
      values.emplace_back();
      labels.push_back(cells[1].empty() ? std::nullopt
                                        : std::optional(parse_process_kind(cells[1])));
    }
    auto& v = values[it->second];
    if (std::stoull(cells[2]) != v.size()) throw std::invalid_argument("t_index out of order");
    v.push_back(parse_double(cells[3]));
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    TimeSeries ts = TimeSeries::from_values(std::move(values[i]), t_max);
    ts.label = labels[i];
    if (ts.label) ++ds.class_counts[*ts.label];
    ds.n_steps = std::max(ds.n_steps, ts.size());
    ds.t_max = ts.t_max;
    ds.series.push_back(std::move(ts));
  }
  return ds;
}

// Diagram dump: degree,birth,death
inline void write_diagram_csv(std::ostream& out, const std::vector<PersistenceDiagram>& dgms) {
  out << "degree,birth,death\n";
  for (const auto& d : dgms)
    for (const auto& p : d.pairs)
      out << d.degree << ',' << format_double(p.birth) << ',' << format_double(p.death) << '\n';
}

// Features: series_id,label,<columns...>
inline void write_features_csv(std::ostream& out, const FeatureMatrix& m) {
  out << "series_id,label";
  for (const auto& name : m.column_names) out << ',' << name;
  out << '\n';
  for (std::size_t i = 0; i < m.rows; ++i) {
    out << i << ',' << (m.labels[i] == 1 ? "Cauchy" : "Wiener");
    for (double v : m.row(i)) out << ',' << format_double(v);
    out << '\n';
  }
}

inline FeatureMatrix read_features_csv(std::istream& in, FeatureSet kind) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty features file");
  const auto header = split_csv_line(line);
  if (header.size() < 3 || header[0] != "series_id" || header[1] != "label")
    throw std::invalid_argument("features header must start with series_id,label");
  FeatureMatrix m;
  m.kind = kind;
  m.column_names.assign(header.begin() + 2, header.end());
  m.cols = m.column_names.size();
  std::vector<double> row(m.cols);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != m.cols + 2) throw std::invalid_argument("features row width mismatch");
    for (std::size_t j = 0; j < m.cols; ++j) row[j] = parse_double(cells[j + 2]);
    m.add_row(row, parse_process_kind(cells[1]) == ProcessKind::Cauchy ? 1 : 0);
  }
  return m;
}

// ROC: fpr,tpr,threshold
inline void write_roc_csv(std::ostream& out, const EvalReport& r) {
  out << "fpr,tpr,threshold\n";
  for (const auto& p : r.roc)
    out << format_double(p.fpr) << ',' << format_double(p.tpr) << ','
        << format_double(p.threshold) << '\n';
}

// Confusion: actual,predicted,count
inline void write_confusion_csv(std::ostream& out, const EvalReport& r) {
  out << "actual,predicted,count\n";
  const char* names[2] = {"Wiener", "Cauchy"};
  for (int a = 0; a < 2; ++a)
    for (int p = 0; p < 2; ++p) out << names[a] << ',' << names[p] << ',' << r.confusion[a][p] << '\n';
}

inline void write_matrix_csv(std::ostream& out, const std::vector<std::vector<double>>& m,
                             const std::vector<std::string>& names = {}) {
  if (!names.empty()) {
    out << "name";
    for (const auto& n : names) out << ',' << n;
    out << '\n';
  }
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (!names.empty()) out << names[i] << ',';
    for (std::size_t j = 0; j < m[i].size(); ++j) out << (j ? "," : "") << format_double(m[i][j]);
    out << '\n';
  }
}

inline nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json roc = nlohmann::json::array();
  for (const auto& p : r.roc)
    roc.push_back({p.fpr, p.tpr, std::isfinite(p.threshold) ? nlohmann::json(p.threshold)
                                                            : nlohmann::json("inf")});
  return {{"accuracy", r.accuracy},
          {"confusion", {{r.confusion[0][0], r.confusion[0][1]},
                         {r.confusion[1][0], r.confusion[1][1]}}},
          {"auc", r.auc},
          {"roc", roc}};
}

inline EvalReport eval_report_from_json(const nlohmann::json& j) {
  EvalReport r;
  r.accuracy = j.at("accuracy").get<double>();
  r.auc = j.at("auc").get<double>();
  for (int a = 0; a < 2; ++a)
    for (int p = 0; p < 2; ++p) r.confusion[a][p] = j.at("confusion").at(a).at(p).get<std::size_t>();
  for (const auto& pt : j.at("roc")) {
    const auto& t = pt.at(2);
    r.roc.push_back({pt.at(0).get<double>(), pt.at(1).get<double>(),
                     t.is_string() ? parse_double(t.get<std::string>()) : t.get<double>()});
  }
  return r;
}

}  // namespace stochtopo::io
