#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "diabml/balance.hpp"
#include "diabml/bwo.hpp"
#include "diabml/classifiers.hpp"
#include "diabml/dataio.hpp"
#include "diabml/metrics.hpp"

namespace diabml {

enum class NormalizationOrder {
  fit_on_train,  // scaler sees training rows only (default)
  fit_on_all,    // scaler sees every cleaned row before the split
};

std::string_view to_string(NormalizationOrder order);
NormalizationOrder parse_normalization_order(std::string_view text);

/// One experiment recipe.
///
/// `seed` is the master seed: the split uses it directly, and the SMOTE, BWO,
/// surrogate and classifier seeds are derived from it, overriding the seed
/// fields of the nested configs.
struct PipelineConfig {
  std::filesystem::path data_path;
  std::string label_column = kDefaultLabelColumn;
  double test_fraction = 0.2;
  std::uint64_t seed = 42;

  bool feature_selection = true;
  BwoConfig bwo;
  SurrogateConfig surrogate;

  bool imbalance_handling = true;
  SmoteConfig smote;

  std::vector<ClassifierKind> classifiers{kAllClassifierKinds.begin(), kAllClassifierKinds.end()};
  /// Settings shared by every classifier; `kind` is replaced per entry.
  ClassifierConfig classifier;

  std::filesystem::path output_dir = "diabml_out";
  NormalizationOrder normalization = NormalizationOrder::fit_on_train;
  /// Worker threads for SMOTE, KNN scoring and forests; 0 = hardware concurrency.
  unsigned threads = 0;
  /// Write a model bundle per classifier next to the report.
  bool write_models = true;

  void validate() const;
};

/// Applies one "key: value" setting. Throws ConfigError on unknown keys or
/// unparsable values.
void apply_setting(PipelineConfig& config, std::string_view key, std::string_view value);

/// Every key accepted by apply_setting with a one-line description, in
/// documentation order.
const std::vector<std::pair<std::string, std::string>>& setting_keys();

/// Reads a config file: one "key: value" per line; blank lines and lines
/// starting with '#' are ignored. Later keys override earlier ones.
std::vector<std::pair<std::string, std::string>> read_settings_file(const std::filesystem::path& path);

struct ClassifierResult {
  ClassifierKind kind = ClassifierKind::decision_tree;
  ConfusionCounts confusion;
  MetricsReport metrics;
  double auc = 0.0;
  RocCurve roc;
  std::optional<TrainedModel> model;
};

/// Which rows each stage read, as indices into the cleaned dataset. Used to
/// audit that no test row leaks into fitting.
struct RowProvenance {
  RowIndices train_rows;
  RowIndices test_rows;
  RowIndices scaler_rows;
  RowIndices smote_rows;
  /// Original (non-synthetic) rows seen by the BWO fitness surrogate.
  RowIndices selection_rows;
  std::size_t selection_synthetic_rows = 0;
  /// Rows used to train the final classifiers (original rows only).
  RowIndices classifier_rows;
};

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct RunReport {
  std::string variant = "run";
  bool feature_selection = false;
  bool imbalance_handling = false;
  std::vector<std::string> feature_names;
  FeatureSubset selected;
  std::optional<BwoTrace> trace;
  double selection_fitness = 0.0;
  CleanReport clean;
  ClassCounts train_before_smote;
  ClassCounts train_after_smote;
  ClassCounts test_counts;
  std::string label_column;
  ScalerParams scaler;
  std::vector<ClassifierResult> results;
  std::vector<StageTiming> timings;
  RowProvenance provenance;

  const ClassifierResult& result(ClassifierKind kind) const;
};

inline constexpr std::array<std::string_view, 4> kVariantNames = {"baseline", "smote", "fs", "smote_fs"};

struct ComparisonTable {
  std::vector<ClassifierKind> classifiers;
  /// Indexed like kVariantNames.
  std::array<RunReport, 4> variants;

  const MetricsReport& cell(ClassifierKind kind, std::size_t variant) const;
};

/// Loads and cleans the configured CSV, then runs every stage.
RunReport run_experiment(const PipelineConfig& config);
/// Same, starting from an in-memory raw dataset.
RunReport run_experiment(const PipelineConfig& config, const Dataset& raw);

/// Feature selection only: clean, split, normalize, SMOTE (if enabled) and
/// BWO. The report has no classifier results.
RunReport select_features(const PipelineConfig& config);
RunReport select_features(const PipelineConfig& config, const Dataset& raw);

/// The four feature-selection x imbalance-handling variants over one shared
/// cleaned dataset and split.
ComparisonTable compare_variants(const PipelineConfig& config);
ComparisonTable compare_variants(const PipelineConfig& config, const Dataset& raw);

/// Synthetic dataset with a known informative feature set. Features are
/// uniform in [0, 1); the label is 1 for the top `imbalance` share of a
/// seeded positive linear score over the informative columns, then flipped
/// with probability flip_rate. Feature count = informative + noise.
Dataset synth_dataset(std::uint64_t seed, std::size_t rows, const std::vector<std::size_t>& informative,
                      std::size_t noise_features, double flip_rate, double imbalance);

/// Metrics JSON, ROC CSVs, selected features, BWO trace, clean report and
/// (if enabled) model bundles. Returns the written paths.
std::vector<std::filesystem::path> emit_report(const RunReport& report, const std::filesystem::path& directory,
                                               bool write_models = true);
/// Comparison CSV/JSON, ablation tables and one sub-directory per variant.
std::vector<std::filesystem::path> emit_report(const ComparisonTable& table, const std::filesystem::path& directory,
                                               bool write_models = false);

nlohmann::json to_json(const RunReport& report);
std::string comparison_csv(const ComparisonTable& table);

/// Model plus the preprocessing needed to score raw feature rows.
struct ModelBundle {
  std::string label_column;
  std::vector<std::string> feature_names;
  ScalerParams scaler;
  std::vector<std::size_t> selected;
  TrainedModel model;
};

void write_bundle(std::ostream& out, const ModelBundle& bundle);
ModelBundle read_bundle(std::istream& in);
ModelBundle load_bundle(const std::filesystem::path& path);

struct Prediction {
  int label = 0;
  double score = 0.0;
};
/// Scales and column-restricts one raw row (all original features), then scores it.
Prediction predict_row(const ModelBundle& bundle, std::span<const double> raw_row);

}  // namespace diabml
