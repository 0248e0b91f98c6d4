#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>

#include "diabml/error.hpp"
#include "diabml/format.hpp"
#include "diabml/pipeline.hpp"

namespace diabml {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::uint64_t to_u64(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("setting '" + std::string(key) + "': expected a non-negative integer, got '" + std::string(v) + "'");
  }
  return out;
}

std::size_t to_size(std::string_view key, std::string_view v) { return static_cast<std::size_t>(to_u64(key, v)); }

double to_real(std::string_view key, std::string_view v) {
  try {
    return parse_real_strict(v);
  } catch (const DataError&) {
    throw ConfigError("setting '" + std::string(key) + "': expected a real number, got '" + std::string(v) + "'");
  }
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
  if (v == "off" || v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("setting '" + std::string(key) + "': expected on/off, got '" + std::string(v) + "'");
}

std::vector<ClassifierKind> to_kinds(std::string_view v) {
  std::vector<ClassifierKind> kinds;
  if (trim(v) == "all") return {kAllClassifierKinds.begin(), kAllClassifierKinds.end()};
  std::size_t pos = 0;
  while (pos <= v.size()) {
    std::size_t comma = v.find(',', pos);
    if (comma == std::string_view::npos) comma = v.size();
    const auto name = trim(v.substr(pos, comma - pos));
    if (!name.empty()) {
      const auto kind = parse_classifier_kind(name);
      if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end()) kinds.push_back(kind);
    }
    pos = comma + 1;
  }
  return kinds;
}

using Setter = std::function<void(PipelineConfig&, std::string_view key, std::string_view value)>;

struct SettingSpec {
  std::string key;
  std::string help;
  Setter set;
};

const std::vector<SettingSpec>& specs() {
  static const std::vector<SettingSpec> table = {
      {"data", "input CSV path", [](auto& c, auto, auto v) { c.data_path = std::string(v); }},
      {"label_column", "name of the binary label column", [](auto& c, auto, auto v) { c.label_column = std::string(v); }},
      {"test_fraction", "share of each class held out for testing", [](auto& c, auto k, auto v) { c.test_fraction = to_real(k, v); }},
      {"seed", "master seed", [](auto& c, auto k, auto v) { c.seed = to_u64(k, v); }},
      {"output", "output directory", [](auto& c, auto, auto v) { c.output_dir = std::string(v); }},
      {"normalization", "fit_on_train or fit_on_all", [](auto& c, auto, auto v) { c.normalization = parse_normalization_order(v); }},
      {"threads", "worker threads (0 = all cores)", [](auto& c, auto k, auto v) { c.threads = static_cast<unsigned>(to_u64(k, v)); }},
      {"write_models", "write model bundles (on/off)", [](auto& c, auto k, auto v) { c.write_models = to_bool(k, v); }},
      {"classifiers", "comma-separated classifier kinds or 'all'", [](auto& c, auto, auto v) { c.classifiers = to_kinds(v); }},

      {"feature_selection", "BWO feature selection (on/off)", [](auto& c, auto k, auto v) { c.feature_selection = to_bool(k, v); }},
      {"bwo.population_size", "BWO population size", [](auto& c, auto k, auto v) { c.bwo.population_size = to_size(k, v); }},
      {"bwo.max_iterations", "BWO iteration limit", [](auto& c, auto k, auto v) { c.bwo.max_iterations = to_size(k, v); }},
      {"bwo.procreation_rate", "fraction of the population entering procreation", [](auto& c, auto k, auto v) { c.bwo.procreation_rate = to_real(k, v); }},
      {"bwo.cannibalism_rate", "fraction of offspring discarded", [](auto& c, auto k, auto v) { c.bwo.cannibalism_rate = to_real(k, v); }},
      {"bwo.mutation_rate", "fraction of the procreation pool mutated", [](auto& c, auto k, auto v) { c.bwo.mutation_rate = to_real(k, v); }},
      {"bwo.subset_size", "number of selected features", [](auto& c, auto k, auto v) { c.bwo.subset_size = to_size(k, v); }},
      {"bwo.offspring_pairs", "offspring pairs per mating", [](auto& c, auto k, auto v) { c.bwo.offspring_pairs_per_mating = to_size(k, v); }},
      {"bwo.patience", "stop after this many stale iterations (0 = off)", [](auto& c, auto k, auto v) { c.bwo.patience = to_size(k, v); }},
      {"surrogate.kind", "classifier used as BWO fitness", [](auto& c, auto, auto v) { c.surrogate.classifier.kind = parse_classifier_kind(v); }},
      {"surrogate.max_depth", "surrogate tree depth", [](auto& c, auto k, auto v) { c.surrogate.classifier.tree.max_depth = to_size(k, v); }},
      {"surrogate.max_train_rows", "row cap for the surrogate sub-sample", [](auto& c, auto k, auto v) { c.surrogate.max_train_rows = to_size(k, v); }},
      {"surrogate.validation_fraction", "surrogate holdout share", [](auto& c, auto k, auto v) { c.surrogate.validation_fraction = to_real(k, v); }},

      {"imbalance_handling", "SMOTE on the training rows (on/off)", [](auto& c, auto k, auto v) { c.imbalance_handling = to_bool(k, v); }},
      {"smote.k_neighbors", "SMOTE neighbour count", [](auto& c, auto k, auto v) { c.smote.k_neighbors = to_size(k, v); }},
      {"smote.target_ratio", "minority:majority ratio after SMOTE", [](auto& c, auto k, auto v) { c.smote.target_ratio = to_real(k, v); }},

      {"naive_bayes.variance_floor", "minimum per-feature variance", [](auto& c, auto k, auto v) { c.classifier.naive_bayes.variance_floor = to_real(k, v); }},
      {"logistic_regression.learning_rate", "gradient descent step", [](auto& c, auto k, auto v) { c.classifier.logistic.learning_rate = to_real(k, v); }},
      {"logistic_regression.epochs", "full-batch epochs", [](auto& c, auto k, auto v) { c.classifier.logistic.epochs = to_size(k, v); }},
      {"decision_tree.max_depth", "tree depth limit", [](auto& c, auto k, auto v) { c.classifier.tree.max_depth = to_size(k, v); }},
      {"decision_tree.min_samples_split", "smallest node that may split", [](auto& c, auto k, auto v) { c.classifier.tree.min_samples_split = to_size(k, v); }},
      {"knn.k", "neighbour count", [](auto& c, auto k, auto v) { c.classifier.knn.k = to_size(k, v); }},
      {"random_forest.trees", "number of trees", [](auto& c, auto k, auto v) { c.classifier.forest.trees = to_size(k, v); }},
      {"random_forest.max_depth", "per-tree depth limit", [](auto& c, auto k, auto v) { c.classifier.forest.max_depth = to_size(k, v); }},
      {"random_forest.max_features", "features per split (0 = sqrt)", [](auto& c, auto k, auto v) { c.classifier.forest.max_features = to_size(k, v); }},
      {"linear_svm.lambda", "L2 strength", [](auto& c, auto k, auto v) { c.classifier.svm.lambda = to_real(k, v); }},
      {"linear_svm.epochs", "passes over the data", [](auto& c, auto k, auto v) { c.classifier.svm.epochs = to_size(k, v); }},
      {"mlp.hidden_units", "hidden layer width", [](auto& c, auto k, auto v) { c.classifier.mlp.hidden_units = to_size(k, v); }},
      {"mlp.learning_rate", "SGD step", [](auto& c, auto k, auto v) { c.classifier.mlp.learning_rate = to_real(k, v); }},
      {"mlp.epochs", "passes over the data", [](auto& c, auto k, auto v) { c.classifier.mlp.epochs = to_size(k, v); }},
      {"adaboost.rounds", "boosting rounds", [](auto& c, auto k, auto v) { c.classifier.adaboost.rounds = to_size(k, v); }},
  };
  return table;
}

}  // namespace

std::string_view to_string(NormalizationOrder order) {
  return order == NormalizationOrder::fit_on_train ? "fit_on_train" : "fit_on_all";
}

NormalizationOrder parse_normalization_order(std::string_view text) {
  if (text == "fit_on_train") return NormalizationOrder::fit_on_train;
  if (text == "fit_on_all") return NormalizationOrder::fit_on_all;
  throw ConfigError("normalization must be fit_on_train or fit_on_all, got '" + std::string(text) + "'");
}

void PipelineConfig::validate() const {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw ConfigError("test_fraction must lie in (0, 1)");
  if (classifiers.empty()) throw ConfigError("at least one classifier is required");
  if (label_column.empty()) throw ConfigError("label_column must not be empty");
  if (!(surrogate.validation_fraction > 0.0 && surrogate.validation_fraction < 1.0)) {
    throw ConfigError("surrogate.validation_fraction must lie in (0, 1)");
  }
  if (surrogate.max_train_rows < 4) throw ConfigError("surrogate.max_train_rows must be >= 4");
  smote.validate();
  classifier.validate();
  surrogate.classifier.validate();
}

void apply_setting(PipelineConfig& config, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  for (const auto& spec : specs()) {
    if (spec.key == key) {
      spec.set(config, key, value);
      return;
    }
  }
  throw ConfigError("unknown setting '" + std::string(key) + "'");
}

const std::vector<std::pair<std::string, std::string>>& setting_keys() {
  static const auto keys = [] {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& s : specs()) out.emplace_back(s.key, s.help);
    return out;
  }();
  return keys;
}

std::vector<std::pair<std::string, std::string>> read_settings_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path.string() + "'");
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected 'key: value'");
    }
    out.emplace_back(std::string(trim(text.substr(0, colon))), std::string(trim(text.substr(colon + 1))));
  }
  return out;
}

}  // namespace diabml
