#include "diabml/classifiers.hpp"

#include <cmath>
#include <string>

#include "classifiers_internal.hpp"
#include "diabml/error.hpp"

namespace diabml {

namespace {

constexpr std::array<std::string_view, 8> kKindNames = {
    "naive_bayes", "logistic_regression", "decision_tree", "knn",
    "random_forest", "linear_svm",        "mlp",           "adaboost",
};

void check_shape(const TrainedModel& model, const Matrix& features) {
  if (features.cols() != model.feature_count()) {
    throw DataError(std::string(to_string(model.kind())) + " model expects " +
                    std::to_string(model.feature_count()) + " features, got " +
                    std::to_string(features.cols()));
  }
}

}  // namespace

std::string_view to_string(ClassifierKind kind) { return kKindNames[static_cast<std::size_t>(kind)]; }

ClassifierKind parse_classifier_kind(std::string_view name) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == name) return static_cast<ClassifierKind>(i);
  }
  throw ConfigError("unknown classifier kind '" + std::string(name) + "'");
}

void ClassifierConfig::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(naive_bayes.variance_floor)) throw ConfigError("naive_bayes variance floor must be > 0");
  if (!positive(logistic.learning_rate) || logistic.epochs == 0) {
    throw ConfigError("logistic_regression needs a positive learning rate and epoch count");
  }
  if (tree.max_depth == 0 || tree.min_samples_split < 2) {
    throw ConfigError("decision_tree needs max_depth >= 1 and min_samples_split >= 2");
  }
  if (knn.k == 0) throw ConfigError("knn k must be >= 1");
  if (forest.trees == 0 || forest.max_depth == 0) throw ConfigError("random_forest needs trees and depth >= 1");
  if (!positive(svm.lambda) || svm.epochs == 0) throw ConfigError("linear_svm needs lambda > 0 and epochs >= 1");
  if (mlp.hidden_units == 0 || !positive(mlp.learning_rate) || mlp.epochs == 0 || !positive(mlp.init_range)) {
    throw ConfigError("mlp needs hidden units, learning rate, epochs and init range > 0");
  }
  if (adaboost.rounds == 0) throw ConfigError("adaboost rounds must be >= 1");
}

TrainedModel::TrainedModel(ClassifierKind kind, std::size_t feature_count, ModelParams params)
    : kind_(kind), feature_count_(feature_count), params_(std::move(params)) {}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

namespace detail {

void require_finite(double value, ClassifierKind kind, const char* what) {
  if (!std::isfinite(value)) {
    throw TrainingError(std::string(to_string(kind)) + " training diverged: non-finite " + what);
  }
}

}  // namespace detail

TrainedModel train(const ClassifierConfig& config, const Matrix& features, std::span<const int> labels) {
  config.validate();
  if (features.rows() != labels.size()) throw DataError("train: feature rows and labels differ in length");
  if (features.rows() < 2) throw DataError("train: need at least 2 rows");
  const auto counts = count_classes(labels);
  if (counts.positives == 0 || counts.negatives == 0) {
    throw DataError(std::string(to_string(config.kind)) + ": training data contains a single class");
  }
  for (double v : features.values()) {
    if (!std::isfinite(v)) throw DataError("train: non-finite feature value");
  }

  const std::size_t f = features.cols();
  switch (config.kind) {
    case ClassifierKind::naive_bayes:
      return {config.kind, f, detail::train_naive_bayes(features, labels, config.naive_bayes)};
    case ClassifierKind::logistic_regression:
      return {config.kind, f, detail::train_logistic(features, labels, config.logistic)};
    case ClassifierKind::decision_tree:
      return {config.kind, f, build_tree(features, labels, {}, config.tree, config.seed)};
    case ClassifierKind::knn:
      return {config.kind, f, detail::train_knn(features, labels, config.knn)};
    case ClassifierKind::random_forest:
      return {config.kind, f, detail::train_forest(features, labels, config.forest, config.seed)};
    case ClassifierKind::linear_svm:
      return {config.kind, f, detail::train_svm(features, labels, config.svm, config.seed)};
    case ClassifierKind::mlp:
      return {config.kind, f, detail::train_mlp(features, labels, config.mlp, config.seed)};
    case ClassifierKind::adaboost:
      return {config.kind, f, detail::train_adaboost(features, labels, config.adaboost)};
  }
  throw ConfigError("train: unhandled classifier kind");
}

std::vector<double> predict_scores(const TrainedModel& model, const Matrix& features) {
  check_shape(model, features);
  if (const auto* knn = model.as<KnnModel>()) return detail::score_knn(*knn, features);

  std::vector<double> scores(features.rows());
  for (std::size_t r = 0; r < features.rows(); ++r) {
    const auto row = features.row(r);
    scores[r] = std::visit(
        [&](const auto& m) -> double {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, NaiveBayesModel>) {
            return detail::score_naive_bayes(m, row);
          } else if constexpr (std::is_same_v<T, LogisticModel>) {
            return detail::score_logistic(m, row);
          } else if constexpr (std::is_same_v<T, TreeModel>) {
            return m.leaf_value(row);
          } else if constexpr (std::is_same_v<T, ForestModel>) {
            return detail::score_forest(m, row);
          } else if constexpr (std::is_same_v<T, SvmModel>) {
            return detail::score_svm(m, row);
          } else if constexpr (std::is_same_v<T, MlpModel>) {
            return mlp_forward(m, row);
          } else if constexpr (std::is_same_v<T, AdaBoostModel>) {
            return sigmoid(detail::adaboost_margin(m, row));
          } else {
            return 0.0;  // KnnModel handled above
          }
        },
        model.params());
  }
  return scores;
}

Labels threshold_scores(std::span<const double> scores) {
  Labels out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) out[i] = scores[i] >= 0.5 ? 1 : 0;
  return out;
}

Labels predict_labels(const TrainedModel& model, const Matrix& features) {
  return threshold_scores(predict_scores(model, features));
}

}  // namespace diabml
