#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "diabml/error.hpp"
#include "diabml/pipeline.hpp"

using namespace diabml;
namespace fs = std::filesystem;

namespace {

const std::vector<std::size_t> kPlanted{0, 1, 2, 3, 4, 5, 6, 7, 8};

PipelineConfig quick_config() {
  PipelineConfig c;
  c.bwo.population_size = 12;
  c.bwo.max_iterations = 4;
  c.surrogate.max_train_rows = 1500;
  c.classifier.forest.trees = 20;
  c.classifier.mlp.epochs = 10;
  c.classifier.mlp.hidden_units = 8;
  c.classifier.adaboost.rounds = 50;
  c.classifier.logistic.epochs = 200;
  c.threads = 1;
  return c;
}

Dataset planted(std::uint64_t seed, std::size_t rows = 1500, double flip = 0.05, double imbalance = 0.14) {
  return synth_dataset(seed, rows, kPlanted, 12, flip, imbalance);
}

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("diabml_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::set<std::size_t> as_set(const RowIndices& r) { return {r.begin(), r.end()}; }

bool disjoint(const RowIndices& a, const RowIndices& b) {
  const auto sa = as_set(a);
  return std::none_of(b.begin(), b.end(), [&](std::size_t r) { return sa.count(r) > 0; });
}

}  // namespace

TEST(Synth, PrevalenceAndShape) {
  const auto d = synth_dataset(3, 20000, kPlanted, 12, 0.0, 0.14);
  EXPECT_EQ(d.rows(), 20000u);
  EXPECT_EQ(d.cols(), 21u);
  EXPECT_NEAR(static_cast<double>(count_classes(d.labels).positives) / 20000.0, 0.14, 0.01);
  // flips move prevalence to p(1 - f) + (1 - p)f
  const auto flipped = synth_dataset(3, 20000, kPlanted, 12, 0.05, 0.14);
  EXPECT_NEAR(static_cast<double>(count_classes(flipped.labels).positives) / 20000.0, 0.14 * 0.95 + 0.86 * 0.05, 0.01);
  EXPECT_EQ(synth_dataset(3, 200, kPlanted, 12, 0.05, 0.14).features,
            synth_dataset(3, 200, kPlanted, 12, 0.05, 0.14).features);
}

TEST(Synth, NoiselessLabelsAreLearnable) {
  const auto d = synth_dataset(5, 400, {0, 1}, 1, 0.0, 0.3);
  ClassifierConfig c;
  c.kind = ClassifierKind::decision_tree;
  c.tree.max_depth = 30;
  const auto m = train(c, d.features, d.labels);
  EXPECT_EQ(predict_labels(m, d.features), d.labels);
}

TEST(Synth, Errors) {
  EXPECT_THROW(synth_dataset(1, 10, {0, 0}, 2, 0.0, 0.5), DataError);
  EXPECT_THROW(synth_dataset(1, 10, {0}, 2, 0.6, 0.5), ConfigError);
  EXPECT_THROW(synth_dataset(1, 0, {0}, 2, 0.0, 0.5), ConfigError);
}

// full-size synthetic set, noiseless labels, default stage settings
TEST(Pipeline, AdaBoostLearnsPlantedSignal) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    PipelineConfig c;
    c.seed = seed;
    c.threads = 1;
    c.classifiers = {ClassifierKind::adaboost};
    const auto report = run_experiment(c, planted(seed, 20000, 0.0));
    EXPECT_GE(report.result(ClassifierKind::adaboost).metrics.accuracy, 0.9) << "seed " << seed;
  }
}

TEST(Pipeline, FeatureSelectionOffKeepsEveryColumn) {
  auto c = quick_config();
  c.feature_selection = false;
  c.classifiers = {ClassifierKind::naive_bayes};
  const auto report = run_experiment(c, planted(2));
  EXPECT_EQ(report.selected.size(), 21u);
  EXPECT_FALSE(report.trace.has_value());
}

TEST(Pipeline, ProvenanceKeepsTestRowsOut) {
  auto c = quick_config();
  c.classifiers = {ClassifierKind::naive_bayes};
  const auto report = run_experiment(c, planted(4));
  const auto& p = report.provenance;
  EXPECT_EQ(p.train_rows.size() + p.test_rows.size(), report.clean.rows_out);
  EXPECT_TRUE(disjoint(p.train_rows, p.test_rows));
  for (const auto* rows : {&p.scaler_rows, &p.smote_rows, &p.selection_rows, &p.classifier_rows}) {
    EXPECT_TRUE(disjoint(p.test_rows, *rows));
    EXPECT_FALSE(rows->empty());
  }
  // SMOTE adds exactly the deficit
  const auto before = report.train_before_smote;
  const auto after = report.train_after_smote;
  EXPECT_EQ(after.negatives, before.negatives);
  EXPECT_EQ(after.positives - before.positives,
            smote_deficit(before.positives, before.negatives, c.smote.target_ratio));
  EXPECT_EQ(report.test_counts.positives + report.test_counts.negatives, p.test_rows.size());
}

TEST(Pipeline, SelectOnlyHasNoResults) {
  auto c = quick_config();
  const auto report = select_features(c, planted(6));
  EXPECT_TRUE(report.results.empty());
  EXPECT_EQ(report.selected.size(), c.bwo.subset_size);
  ASSERT_TRUE(report.trace.has_value());
  EXPECT_EQ(report.trace->best_fitness.back(), report.selection_fitness);
}

TEST(Pipeline, StageErrorsNameTheStage) {
  auto c = quick_config();
  c.data_path = "/nonexistent/nowhere.csv";
  try {
    run_experiment(c);
    FAIL() << "expected StageError";
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "load");
    EXPECT_EQ(std::string(e.what()).rfind("[load]", 0), 0u);
  }
}

TEST(Report, RunFilesAndDeterminism) {
  auto c = quick_config();
  const auto raw = planted(8, 800);
  const auto a = fresh_dir("run_a");
  const auto b = fresh_dir("run_b");
  const auto files_a = emit_report(run_experiment(c, raw), a, false);
  emit_report(run_experiment(c, raw), b, false);

  std::size_t roc = 0;
  for (const auto& f : files_a) {
    const auto name = f.filename().string();
    roc += name.rfind("roc_", 0) == 0;
    EXPECT_EQ(slurp(f), slurp(b / f.filename())) << name;
  }
  EXPECT_EQ(roc, 8u);
  EXPECT_TRUE(fs::exists(a / "metrics.json"));
  EXPECT_TRUE(fs::exists(a / "selected_features.txt"));
  EXPECT_TRUE(fs::exists(a / "bwo_trace.csv"));
  EXPECT_EQ(slurp(a / "selected_features.txt").rfind("index,name\n", 0), 0u);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Report, ComparisonLayoutAndIsolation) {
  auto c = quick_config();
  const auto table = compare_variants(c, planted(9, 1000));
  const auto csv = comparison_csv(table);
  std::istringstream in(csv);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 9u);
  for (const auto& l : lines) EXPECT_EQ(std::count(l.begin(), l.end(), ','), 28);
  EXPECT_EQ(lines[0].substr(0, 30), "classifier,baseline_accuracy,b");

  const auto& base = table.variants[0];
  for (const auto& v : table.variants) EXPECT_EQ(v.provenance.test_rows, base.provenance.test_rows);
  EXPECT_EQ(base.train_after_smote.positives, base.train_before_smote.positives);
  EXPECT_EQ(base.selected.size(), 21u);
  EXPECT_EQ(table.variants[1].selected.size(), 21u);
  EXPECT_EQ(table.variants[2].selected.size(), 9u);
  EXPECT_GT(table.variants[1].train_after_smote.positives, base.train_before_smote.positives);

  const auto dir = fresh_dir("compare");
  emit_report(table, dir);
  for (const char* f : {"comparison.csv", "comparison.json", "smote_effect.csv", "fs_effect.csv"})
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  for (auto v : kVariantNames) EXPECT_TRUE(fs::is_directory(dir / std::string(v)));
  EXPECT_EQ(slurp(dir / "comparison.csv"), csv);
  fs::remove_all(dir);
}

TEST(Bundle, RoundTripAndPredictRow) {
  auto c = quick_config();
  c.classifiers = {ClassifierKind::logistic_regression};
  const auto raw = planted(10, 800);
  const auto report = run_experiment(c, raw);
  const auto dir = fresh_dir("bundle");
  emit_report(report, dir, true);
  const auto bundle = load_bundle(dir / "model_logistic_regression.txt");
  EXPECT_EQ(bundle.feature_names, raw.feature_names);
  EXPECT_EQ(bundle.selected, report.selected.indices());

  std::stringstream buf;
  write_bundle(buf, bundle);
  const auto again = read_bundle(buf);
  std::stringstream buf2;
  write_bundle(buf2, again);
  EXPECT_EQ(buf.str(), buf2.str());

  // predict_row == scale by hand, restrict columns, score
  const auto row = raw.features.row(0);
  const auto pred = predict_row(bundle, row);
  Matrix one(1, bundle.selected.size());
  for (std::size_t j = 0; j < bundle.selected.size(); ++j) {
    const std::size_t col = bundle.selected[j];
    const double lo = bundle.scaler.minimum[col];
    const double hi = bundle.scaler.maximum[col];
    one(0, j) = hi > lo ? std::clamp((row[col] - lo) / (hi - lo), 0.0, 1.0) : 0.0;
  }
  EXPECT_NEAR(pred.score, predict_scores(bundle.model, one)[0], 1e-12);
  EXPECT_EQ(pred.label, pred.score >= 0.5 ? 1 : 0);

  std::stringstream bad("diabml-bundle 2\n");
  EXPECT_THROW(read_bundle(bad), DataError);
  EXPECT_THROW(load_bundle(dir / "missing.txt"), IoError);
  fs::remove_all(dir);
}

TEST(Config, SettingsApplyAndReject) {
  PipelineConfig c;
  apply_setting(c, "seed", "7");
  apply_setting(c, "feature_selection", "off");
  apply_setting(c, "classifiers", "knn,adaboost");
  apply_setting(c, "bwo.subset_size", "5");
  apply_setting(c, "normalization", "fit_on_all");
  EXPECT_EQ(c.seed, 7u);
  EXPECT_FALSE(c.feature_selection);
  EXPECT_EQ(c.classifiers, (std::vector<ClassifierKind>{ClassifierKind::knn, ClassifierKind::adaboost}));
  EXPECT_EQ(c.bwo.subset_size, 5u);
  EXPECT_EQ(c.normalization, NormalizationOrder::fit_on_all);
  EXPECT_THROW(apply_setting(c, "no_such_key", "1"), ConfigError);
  EXPECT_THROW(apply_setting(c, "seed", "abc"), ConfigError);
  EXPECT_THROW(apply_setting(c, "classifiers", "knn,bogus"), ConfigError);
  EXPECT_THROW(apply_setting(c, "feature_selection", "maybe"), ConfigError);

  for (const auto& [key, help] : setting_keys()) EXPECT_FALSE(help.empty()) << key;

  const auto dir = fresh_dir("config");
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "a.cfg");
    out << "# comment\n\nseed: 3\nknn.k: 9\nseed: 4\n";
  }
  PipelineConfig d;
  for (const auto& [k, v] : read_settings_file(dir / "a.cfg")) apply_setting(d, k, v);
  EXPECT_EQ(d.seed, 4u);
  EXPECT_EQ(d.classifier.knn.k, 9u);
  {
    std::ofstream out(dir / "b.cfg");
    out << "seed 3\n";
  }
  EXPECT_THROW(read_settings_file(dir / "b.cfg"), ConfigError);
  fs::remove_all(dir);

  PipelineConfig bad;
  bad.test_fraction = 1.0;
  EXPECT_THROW(bad.validate(), ConfigError);
}
