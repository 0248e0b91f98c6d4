// Gaussian naive Bayes, logistic regression and the linear SVM.

#include <cmath>
#include <numbers>
#include <numeric>

#include "classifiers_internal.hpp"
#include "diabml/rng.hpp"

namespace diabml {

namespace detail {

NaiveBayesModel train_naive_bayes(const Matrix& x, std::span<const int> y, const NaiveBayesSettings& s) {
  const std::size_t f = x.cols();
  NaiveBayesModel m;
  std::array<double, 2> count{};
  for (int cls : {0, 1}) {
    m.mean[cls].assign(f, 0.0);
    m.variance[cls].assign(f, 0.0);
  }
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const int cls = y[r];
    count[cls] += 1.0;
    const auto row = x.row(r);
    for (std::size_t c = 0; c < f; ++c) m.mean[cls][c] += row[c];
  }
  for (int cls : {0, 1}) {
    for (double& v : m.mean[cls]) v /= count[cls];
  }
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const int cls = y[r];
    const auto row = x.row(r);
    for (std::size_t c = 0; c < f; ++c) {
      const double d = row[c] - m.mean[cls][c];
      m.variance[cls][c] += d * d;
    }
  }
  const double total = count[0] + count[1];
  for (int cls : {0, 1}) {
    for (double& v : m.variance[cls]) v = std::max(v / count[cls], s.variance_floor);
    m.log_prior[cls] = std::log(count[cls] / total);
  }
  return m;
}

double score_naive_bayes(const NaiveBayesModel& m, std::span<const double> row) {
  std::array<double, 2> log_post = m.log_prior;
  for (int cls : {0, 1}) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      const double var = m.variance[cls][c];
      const double d = row[c] - m.mean[cls][c];
      log_post[cls] += -0.5 * std::log(2.0 * std::numbers::pi * var) - d * d / (2.0 * var);
    }
  }
  // normalized posterior of class 1
  return sigmoid(log_post[1] - log_post[0]);
}

double score_logistic(const LogisticModel& m, std::span<const double> row) {
  return sigmoid(m.bias + std::inner_product(row.begin(), row.end(), m.weights.begin(), 0.0));
}

LogisticModel train_logistic(const Matrix& x, std::span<const int> y, const LogisticSettings& s) {
  LogisticModel m;
  m.weights.assign(x.cols(), 0.0);
  for (std::size_t epoch = 0; epoch < s.epochs; ++epoch) {
    const auto g = logistic_loss_gradient(m, x, y);
    require_finite(g.loss, ClassifierKind::logistic_regression, "loss");
    m.bias -= s.learning_rate * g.bias;
    for (std::size_t c = 0; c < m.weights.size(); ++c) m.weights[c] -= s.learning_rate * g.weights[c];
  }
  require_finite(m.bias, ClassifierKind::logistic_regression, "bias");
  return m;
}

// Pegasos-style subgradient descent. The bias is handled as a weight on a
// constant input and shares the L2 shrinkage.
SvmModel train_svm(const Matrix& x, std::span<const int> y, const SvmSettings& s, std::uint64_t seed) {
  SvmModel m;
  m.weights.assign(x.cols(), 0.0);
  Rng rng(seed);
  std::vector<std::size_t> order(x.rows());
  std::iota(order.begin(), order.end(), 0);
  std::size_t t = 0;
  for (std::size_t epoch = 0; epoch < s.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t r : order) {
      ++t;
      const double eta = 1.0 / (s.lambda * static_cast<double>(t));
      const double target = y[r] == 1 ? 1.0 : -1.0;
      const auto row = x.row(r);
      const double margin =
          target * (m.bias + std::inner_product(row.begin(), row.end(), m.weights.begin(), 0.0));
      const double shrink = 1.0 - eta * s.lambda;
      for (double& w : m.weights) w *= shrink;
      m.bias *= shrink;
      if (margin < 1.0) {
        for (std::size_t c = 0; c < row.size(); ++c) m.weights[c] += eta * target * row[c];
        m.bias += eta * target;
      }
    }
    require_finite(m.bias, ClassifierKind::linear_svm, "bias");
  }
  for (double w : m.weights) require_finite(w, ClassifierKind::linear_svm, "weight");
  return m;
}

double score_svm(const SvmModel& m, std::span<const double> row) {
  return sigmoid(m.bias + std::inner_product(row.begin(), row.end(), m.weights.begin(), 0.0));
}

}  // namespace detail

LogisticGradient logistic_loss_gradient(const LogisticModel& model, const Matrix& features,
                                        std::span<const int> labels) {
  LogisticGradient g;
  g.weights.assign(features.cols(), 0.0);
  const auto n = static_cast<double>(features.rows());
  for (std::size_t r = 0; r < features.rows(); ++r) {
    const auto row = features.row(r);
    const double z = model.bias + std::inner_product(row.begin(), row.end(), model.weights.begin(), 0.0);
    const double target = labels[r] == 1 ? 1.0 : 0.0;
    // log(1 + e^z) - t z, evaluated without overflow
    const double softplus = z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    g.loss += softplus - target * z;
    const double residual = sigmoid(z) - target;
    g.bias += residual;
    for (std::size_t c = 0; c < row.size(); ++c) g.weights[c] += residual * row[c];
  }
  g.loss /= n;
  g.bias /= n;
  for (double& w : g.weights) w /= n;
  return g;
}

}  // namespace diabml
