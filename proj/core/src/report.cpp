// Report files and model bundles.
//
// Files written by emit_report(RunReport):
//   metrics.json            per-classifier metrics, AUC, confusion counts, run summary
//   roc_<classifier>.csv    fpr,tpr points
//   selected_features.txt   one-based index and name of each selected feature
//   clean_report.txt        cleaning counts as "key: value" lines
//   bwo_trace.csv           iteration,best_fitness,best_subset (selection runs only)
//   model_<classifier>.txt  model bundle for `diabml predict` (optional)
//
// Files written by emit_report(ComparisonTable):
//   comparison.csv          one row per classifier, seven metrics per variant
//   comparison.json         the same grid as JSON
//   smote_effect.csv        sensitivity/F1/MCC without and with SMOTE
//   fs_effect.csv           accuracy without and with feature selection
//   <variant>/              the per-variant files listed above
//
// Timings are left out of every file so reruns are byte-identical.

#include <fstream>
#include <sstream>

#include "diabml/error.hpp"
#include "diabml/format.hpp"
#include "diabml/pipeline.hpp"

namespace diabml {

namespace {

void write_file(const std::filesystem::path& path, const std::string& content,
                std::vector<std::filesystem::path>& written) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << content;
  out.close();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
  written.push_back(path);
}

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
}

nlohmann::json counts_json(const ClassCounts& c) { return {{"negatives", c.negatives}, {"positives", c.positives}}; }

std::string direction(double before, double after) {
  if (after > before) return "up";
  if (after < before) return "down";
  return "same";
}

}  // namespace

nlohmann::json to_json(const RunReport& report) {
  nlohmann::json j;
  j["variant"] = report.variant;
  j["feature_selection"] = report.feature_selection;
  j["imbalance_handling"] = report.imbalance_handling;
  j["clean_report"] = {{"rows_in", report.clean.rows_in},
                       {"duplicate_rows_dropped", report.clean.duplicate_rows_dropped},
                       {"invalid_rows_dropped", report.clean.invalid_rows_dropped},
                       {"rows_out", report.clean.rows_out}};
  j["class_counts"] = {{"train_before_smote", counts_json(report.train_before_smote)},
                       {"train_after_smote", counts_json(report.train_after_smote)},
                       {"test", counts_json(report.test_counts)}};
  nlohmann::json selected = nlohmann::json::array();
  for (std::size_t i : report.selected.sorted()) {
    selected.push_back({{"index", i + 1}, {"name", report.feature_names.at(i)}});
  }
  j["selected_features"] = std::move(selected);
  if (report.trace) {
    j["selection"] = {{"best_fitness", report.selection_fitness},
                      {"fitness_evaluations", report.trace->fitness_evaluations},
                      {"distinct_evaluations", report.trace->distinct_evaluations},
                      {"iterations", report.trace->best_fitness.size() - 1}};
  }
  nlohmann::json classifiers = nlohmann::json::array();
  for (const auto& r : report.results) {
    classifiers.push_back({{"classifier", std::string(to_string(r.kind))},
                           {"accuracy", r.metrics.accuracy},
                           {"auc", r.auc},
                           {"metrics", to_json(r.metrics)},
                           {"confusion", to_json(r.confusion)}});
  }
  j["classifiers"] = std::move(classifiers);
  return j;
}

std::vector<std::filesystem::path> emit_report(const RunReport& report, const std::filesystem::path& directory,
                                               bool write_models) {
  ensure_directory(directory);
  std::vector<std::filesystem::path> written;
  write_file(directory / "metrics.json", to_json(report).dump(2) + "\n", written);
  for (const auto& r : report.results) {
    write_file(directory / ("roc_" + std::string(to_string(r.kind)) + ".csv"), roc_to_csv(r.roc), written);
  }
  std::string features = "index,name\n";
  for (std::size_t i : report.selected.sorted()) {
    features += std::to_string(i + 1) + "," + report.feature_names.at(i) + "\n";
  }
  write_file(directory / "selected_features.txt", features, written);
  write_file(directory / "clean_report.txt", report.clean.to_text(), written);
  if (report.trace) write_file(directory / "bwo_trace.csv", report.trace->to_csv(), written);

  if (write_models) {
    for (const auto& r : report.results) {
      if (!r.model) continue;
      std::ostringstream os;
      write_bundle(os, ModelBundle{report.label_column, report.feature_names, report.scaler,
                                   report.selected.indices(), *r.model});
      write_file(directory / ("model_" + std::string(to_string(r.kind)) + ".txt"), os.str(), written);
    }
  }
  return written;
}

std::string comparison_csv(const ComparisonTable& table) {
  static constexpr std::array<const char*, 7> kColumns = {"accuracy", "sensitivity", "specificity", "precision",
                                                          "f1",       "mcc",         "auc"};
  std::string out = "classifier";
  for (auto v : kVariantNames) {
    for (const char* c : kColumns) out += "," + std::string(v) + "_" + c;
  }
  out += '\n';
  for (ClassifierKind kind : table.classifiers) {
    out += std::string(to_string(kind));
    for (std::size_t v = 0; v < kVariantNames.size(); ++v) {
      const auto& r = table.variants[v].result(kind);
      for (double x : {r.metrics.accuracy, r.metrics.sensitivity, r.metrics.specificity, r.metrics.precision,
                       r.metrics.f1, r.metrics.mcc, r.auc}) {
        out += "," + format_real(x);
      }
    }
    out += '\n';
  }
  return out;
}

std::vector<std::filesystem::path> emit_report(const ComparisonTable& table, const std::filesystem::path& directory,
                                               bool write_models) {
  ensure_directory(directory);
  std::vector<std::filesystem::path> written;
  write_file(directory / "comparison.csv", comparison_csv(table), written);

  nlohmann::json grid = nlohmann::json::array();
  for (ClassifierKind kind : table.classifiers) {
    nlohmann::json row = {{"classifier", std::string(to_string(kind))}};
    for (std::size_t v = 0; v < kVariantNames.size(); ++v) {
      const auto& r = table.variants[v].result(kind);
      auto cell = to_json(r.metrics);
      cell["auc"] = r.auc;
      row[std::string(kVariantNames[v])] = std::move(cell);
    }
    grid.push_back(std::move(row));
  }
  write_file(directory / "comparison.json", nlohmann::json{{"variants", kVariantNames}, {"grid", grid}}.dump(2) + "\n",
             written);

  // imbalance handling: baseline -> smote, and fs -> smote_fs
  std::string smote = "classifier,baseline_sensitivity,smote_sensitivity,baseline_f1,smote_f1,baseline_mcc,smote_mcc,"
                      "sensitivity_raised,f1_raised,mcc_raised\n";
  for (ClassifierKind kind : table.classifiers) {
    const auto& b = table.cell(kind, 0);
    const auto& s = table.cell(kind, 1);
    smote += std::string(to_string(kind)) + "," + format_real(b.sensitivity) + "," + format_real(s.sensitivity) + "," +
             format_real(b.f1) + "," + format_real(s.f1) + "," + format_real(b.mcc) + "," + format_real(s.mcc) + "," +
             (s.sensitivity > b.sensitivity ? "yes" : "no") + "," + (s.f1 > b.f1 ? "yes" : "no") + "," +
             (s.mcc > b.mcc ? "yes" : "no") + "\n";
  }
  write_file(directory / "smote_effect.csv", smote, written);

  std::string fs = "classifier,accuracy_without_fs,accuracy_with_fs,direction,"
                   "smote_accuracy_without_fs,smote_accuracy_with_fs,smote_direction\n";
  for (ClassifierKind kind : table.classifiers) {
    const double a0 = table.cell(kind, 0).accuracy;
    const double a1 = table.cell(kind, 2).accuracy;
    const double s0 = table.cell(kind, 1).accuracy;
    const double s1 = table.cell(kind, 3).accuracy;
    fs += std::string(to_string(kind)) + "," + format_real(a0) + "," + format_real(a1) + "," + direction(a0, a1) + "," +
          format_real(s0) + "," + format_real(s1) + "," + direction(s0, s1) + "\n";
  }
  write_file(directory / "fs_effect.csv", fs, written);

  for (std::size_t v = 0; v < kVariantNames.size(); ++v) {
    auto sub = emit_report(table.variants[v], directory / std::string(kVariantNames[v]), write_models);
    written.insert(written.end(), sub.begin(), sub.end());
  }
  return written;
}

// --- model bundles ---
//
//   diabml-bundle 1
//   label_column <name>
//   feature_names <comma-separated names>
//   scaler_min <reals>
//   scaler_max <reals>
//   selected <zero-based column indices>
//   <model text as written by write_model>

void write_bundle(std::ostream& out, const ModelBundle& b) {
  out << "diabml-bundle 1\n";
  out << "label_column " << b.label_column << '\n';
  out << "feature_names ";
  for (std::size_t i = 0; i < b.feature_names.size(); ++i) out << (i ? "," : "") << b.feature_names[i];
  out << '\n';
  out << "scaler_min " << format_reals(b.scaler.minimum) << '\n';
  out << "scaler_max " << format_reals(b.scaler.maximum) << '\n';
  out << "selected";
  for (std::size_t i : b.selected) out << ' ' << i;
  out << '\n';
  write_model(out, b.model);
}

ModelBundle read_bundle(std::istream& in) {
  auto field = [&](const std::string& key) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("model bundle: missing '" + key + "'");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind(key, 0) != 0) throw DataError("model bundle: expected '" + key + "'");
    return line.size() > key.size() ? line.substr(key.size() + 1) : std::string();
  };
  if (field("diabml-bundle") != "1") throw DataError("model bundle: unsupported version");
  const std::string label = field("label_column");
  std::vector<std::string> names;
  {
    std::stringstream ss(field("feature_names"));
    std::string name;
    while (std::getline(ss, name, ',')) names.push_back(name);
  }
  ScalerParams scaler{parse_reals(field("scaler_min")), parse_reals(field("scaler_max"))};
  std::vector<std::size_t> selected;
  {
    std::istringstream ss(field("selected"));
    std::size_t i;
    while (ss >> i) selected.push_back(i);
  }
  TrainedModel model = read_model(in);
  if (scaler.minimum.size() != names.size() || scaler.maximum.size() != names.size()) {
    throw DataError("model bundle: scaler width differs from feature count");
  }
  if (selected.size() != model.feature_count()) throw DataError("model bundle: selected columns differ from model width");
  for (std::size_t i : selected) {
    if (i >= names.size()) throw DataError("model bundle: selected column out of range");
  }
  return ModelBundle{label, std::move(names), std::move(scaler), std::move(selected), std::move(model)};
}

ModelBundle load_bundle(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model bundle '" + path.string() + "'");
  return read_bundle(in);
}

Prediction predict_row(const ModelBundle& bundle, std::span<const double> raw_row) {
  const auto scaled = apply_minmax(raw_row, bundle.scaler);
  Matrix x(1, bundle.selected.size());
  for (std::size_t j = 0; j < bundle.selected.size(); ++j) x(0, j) = scaled[bundle.selected[j]];
  const double score = predict_scores(bundle.model, x).front();
  return {score >= 0.5 ? 1 : 0, score};
}

}  // namespace diabml
