// Single-hidden-layer perceptron trained by per-sample gradient descent on log-loss.

#include <cmath>
#include <numeric>

#include "classifiers_internal.hpp"
#include "diabml/rng.hpp"

namespace diabml {

namespace {

struct Activations {
  std::vector<double> hidden;
  double output = 0.0;
};

void forward(const MlpModel& m, std::span<const double> row, Activations& a) {
  a.hidden.resize(m.hidden);
  double z2 = m.b2;
  for (std::size_t h = 0; h < m.hidden; ++h) {
    const double* w = m.w1.data() + h * m.inputs;
    double z = m.b1[h];
    for (std::size_t i = 0; i < m.inputs; ++i) z += w[i] * row[i];
    a.hidden[h] = sigmoid(z);
    z2 += m.w2[h] * a.hidden[h];
  }
  a.output = sigmoid(z2);
}

double log_loss(double p, double target) {
  constexpr double eps = 1e-300;
  return -(target * std::log(std::max(p, eps)) + (1.0 - target) * std::log(std::max(1.0 - p, eps)));
}

// Accumulates scale * dLoss/dparams for one sample into g.
void backward(const MlpModel& m, std::span<const double> row, const Activations& a, double target,
              double scale, MlpModel& g) {
  const double delta_out = (a.output - target) * scale;
  g.b2 += delta_out;
  for (std::size_t h = 0; h < m.hidden; ++h) {
    g.w2[h] += delta_out * a.hidden[h];
    const double delta_h = delta_out * m.w2[h] * a.hidden[h] * (1.0 - a.hidden[h]);
    g.b1[h] += delta_h;
    double* gw = g.w1.data() + h * m.inputs;
    for (std::size_t i = 0; i < m.inputs; ++i) gw[i] += delta_h * row[i];
  }
}

MlpModel zeros_like(const MlpModel& m) {
  MlpModel z;
  z.inputs = m.inputs;
  z.hidden = m.hidden;
  z.w1.assign(m.w1.size(), 0.0);
  z.b1.assign(m.b1.size(), 0.0);
  z.w2.assign(m.w2.size(), 0.0);
  z.b2 = 0.0;
  return z;
}

}  // namespace

double mlp_forward(const MlpModel& model, std::span<const double> row) {
  Activations a;
  forward(model, row, a);
  return a.output;
}

MlpGradient mlp_loss_gradient(const MlpModel& model, const Matrix& features, std::span<const int> labels) {
  MlpGradient out;
  out.grad = zeros_like(model);
  const double scale = 1.0 / static_cast<double>(features.rows());
  Activations a;
  for (std::size_t r = 0; r < features.rows(); ++r) {
    const auto row = features.row(r);
    const double target = labels[r] == 1 ? 1.0 : 0.0;
    forward(model, row, a);
    out.loss += log_loss(a.output, target) * scale;
    backward(model, row, a, target, scale, out.grad);
  }
  return out;
}

namespace detail {

MlpModel train_mlp(const Matrix& x, std::span<const int> y, const MlpSettings& s, std::uint64_t seed) {
  Rng rng(seed);
  MlpModel m;
  m.inputs = x.cols();
  m.hidden = s.hidden_units;
  auto init = [&] { return rng.uniform(-s.init_range, s.init_range); };
  m.w1.resize(m.hidden * m.inputs);
  for (double& w : m.w1) w = init();
  m.b1.resize(m.hidden);
  for (double& b : m.b1) b = init();
  m.w2.resize(m.hidden);
  for (double& w : m.w2) w = init();
  m.b2 = init();

  std::vector<std::size_t> order(x.rows());
  std::iota(order.begin(), order.end(), 0);
  Activations a;
  MlpModel step = zeros_like(m);
  for (std::size_t epoch = 0; epoch < s.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t r : order) {
      const auto row = x.row(r);
      forward(m, row, a);
      std::fill(step.w1.begin(), step.w1.end(), 0.0);
      std::fill(step.b1.begin(), step.b1.end(), 0.0);
      std::fill(step.w2.begin(), step.w2.end(), 0.0);
      step.b2 = 0.0;
      backward(m, row, a, y[r] == 1 ? 1.0 : 0.0, s.learning_rate, step);
      for (std::size_t i = 0; i < m.w1.size(); ++i) m.w1[i] -= step.w1[i];
      for (std::size_t i = 0; i < m.b1.size(); ++i) m.b1[i] -= step.b1[i];
      for (std::size_t i = 0; i < m.w2.size(); ++i) m.w2[i] -= step.w2[i];
      m.b2 -= step.b2;
    }
    require_finite(m.b2, ClassifierKind::mlp, "output bias");
  }
  for (double w : m.w1) require_finite(w, ClassifierKind::mlp, "hidden weight");
  return m;
}

}  // namespace detail

}  // namespace diabml
