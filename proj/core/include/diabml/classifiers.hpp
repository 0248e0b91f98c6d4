#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "diabml/dataio.hpp"
#include "diabml/matrix.hpp"

namespace diabml {

enum class ClassifierKind {
  naive_bayes,
  logistic_regression,
  decision_tree,
  knn,
  random_forest,
  linear_svm,
  mlp,
  adaboost,
};

/// All kinds, in the row order of the accuracy comparison table.
inline constexpr std::array<ClassifierKind, 8> kAllClassifierKinds = {
    ClassifierKind::naive_bayes,   ClassifierKind::linear_svm,    ClassifierKind::logistic_regression,
    ClassifierKind::decision_tree, ClassifierKind::knn,           ClassifierKind::random_forest,
    ClassifierKind::mlp,           ClassifierKind::adaboost,
};

std::string_view to_string(ClassifierKind kind);
/// Accepts the snake_case names above; throws ConfigError otherwise.
ClassifierKind parse_classifier_kind(std::string_view name);

struct NaiveBayesSettings {
  double variance_floor = 1e-9;
};

struct LogisticSettings {
  double learning_rate = 0.1;
  std::size_t epochs = 500;
};

struct TreeSettings {
  std::size_t max_depth = 12;
  std::size_t min_samples_split = 2;
  /// Features tried per split; 0 means all of them.
  std::size_t max_features = 0;
};

struct KnnSettings {
  std::size_t k = 5;
  unsigned threads = 0;
};

struct ForestSettings {
  std::size_t trees = 100;
  std::size_t max_depth = 12;
  /// Features tried per split; 0 means floor(sqrt(F)).
  std::size_t max_features = 0;
  unsigned threads = 0;
};

struct SvmSettings {
  double lambda = 1e-4;
  std::size_t epochs = 20;
};

struct MlpSettings {
  std::size_t hidden_units = 32;
  double learning_rate = 0.1;
  std::size_t epochs = 50;
  double init_range = 0.5;
};

struct AdaBoostSettings {
  std::size_t rounds = 100;
};

/// Selects a classifier and carries every kind's settings; only the block
/// matching `kind` is read during training.
struct ClassifierConfig {
  ClassifierKind kind = ClassifierKind::decision_tree;
  std::uint64_t seed = 42;

  NaiveBayesSettings naive_bayes;
  LogisticSettings logistic;
  TreeSettings tree;
  KnnSettings knn;
  ForestSettings forest;
  SvmSettings svm;
  MlpSettings mlp;
  AdaBoostSettings adaboost;

  void validate() const;
};

// Learned parameters, one struct per kind.

struct NaiveBayesModel {
  std::array<double, 2> log_prior{};
  std::array<std::vector<double>, 2> mean;
  std::array<std::vector<double>, 2> variance;
};

/// P(class 1 | x) = exp(bias + w.x) / (1 + exp(bias + w.x)).
struct LogisticModel {
  double bias = 0.0;
  std::vector<double> weights;
};

struct TreeNode {
  /// -1 marks a leaf.
  int feature = -1;
  double threshold = 0.0;
  int left = -1;   // rows with x[feature] <= threshold
  int right = -1;  // rows with x[feature] > threshold
  /// Weighted class-1 fraction of the training rows that reached the node.
  double value = 0.0;
};

struct TreeModel {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double leaf_value(std::span<const double> row) const;
  std::size_t depth() const;
};

struct KnnModel {
  std::size_t k = 5;
  unsigned threads = 0;
  Matrix points;
  Labels labels;
};

struct ForestModel {
  std::vector<TreeModel> trees;
};

struct SvmModel {
  double bias = 0.0;
  std::vector<double> weights;
};

/// One hidden layer of logistic units feeding a logistic output.
struct MlpModel {
  std::size_t inputs = 0;
  std::size_t hidden = 0;
  std::vector<double> w1;  // hidden x inputs, row-major by hidden unit
  std::vector<double> b1;  // hidden
  std::vector<double> w2;  // hidden
  double b2 = 0.0;
};

struct Stump {
  std::size_t feature = 0;
  double threshold = 0.0;
  /// +1: predict class 1 when x > threshold; -1: predict class 1 when x <= threshold.
  int polarity = 1;
  double alpha = 0.0;
};

struct AdaBoostModel {
  std::vector<Stump> stumps;
};

using ModelParams = std::variant<NaiveBayesModel, LogisticModel, TreeModel, KnnModel, ForestModel,
                                 SvmModel, MlpModel, AdaBoostModel>;

class TrainedModel {
 public:
  TrainedModel(ClassifierKind kind, std::size_t feature_count, ModelParams params);

  ClassifierKind kind() const noexcept { return kind_; }
  std::size_t feature_count() const noexcept { return feature_count_; }
  const ModelParams& params() const noexcept { return params_; }

  template <typename T>
  const T* as() const noexcept {
    return std::get_if<T>(&params_);
  }

 private:
  ClassifierKind kind_;
  std::size_t feature_count_;
  ModelParams params_;
};

TrainedModel train(const ClassifierConfig& config, const Matrix& features, std::span<const int> labels);

/// Class-1 confidence per row, in [0, 1].
std::vector<double> predict_scores(const TrainedModel& model, const Matrix& features);

/// 1 exactly where the score is >= 0.5.
Labels predict_labels(const TrainedModel& model, const Matrix& features);
Labels threshold_scores(std::span<const double> scores);

/// Versioned text format: header line, kind tag, then parameter arrays with
/// shortest round-trip decimal rendering of every real.
void write_model(std::ostream& out, const TrainedModel& model);
TrainedModel read_model(std::istream& in);

// Building blocks, exposed for composition and verification.

double sigmoid(double z);

struct LogisticGradient {
  double loss = 0.0;  // mean log-loss
  double bias = 0.0;
  std::vector<double> weights;
};
LogisticGradient logistic_loss_gradient(const LogisticModel& model, const Matrix& features,
                                        std::span<const int> labels);

struct MlpGradient {
  double loss = 0.0;  // mean log-loss
  MlpModel grad;      // same layout as the model
};
double mlp_forward(const MlpModel& model, std::span<const double> row);
MlpGradient mlp_loss_gradient(const MlpModel& model, const Matrix& features, std::span<const int> labels);

/// CART with Gini impurity. `weights` may be empty (all ones); rows with zero
/// weight are ignored. `seed` drives per-split feature sampling.
TreeModel build_tree(const Matrix& features, std::span<const int> labels, std::span<const double> weights,
                     const TreeSettings& settings, std::uint64_t seed);

}  // namespace diabml
