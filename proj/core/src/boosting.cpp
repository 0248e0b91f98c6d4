// Discrete AdaBoost over depth-1 stumps.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "classifiers_internal.hpp"

namespace diabml::detail {

namespace {

// Smallest error admitted into the alpha formula; a perfect stump gets the
// weight of this error rate.
constexpr double kMinError = 1e-10;

struct StumpFit {
  Stump stump;
  double error = 1.0;
};

// Weighted-error-minimizing stump. `sorted[f]` holds row indices ordered by
// feature f. The -infinity threshold (every row on the right) is a candidate.
StumpFit fit_stump(const Matrix& x, std::span<const int> y, std::span<const double> w,
                   const std::vector<std::vector<std::size_t>>& sorted) {
  double pos_total = 0.0;
  double neg_total = 0.0;
  for (std::size_t r = 0; r < y.size(); ++r) (y[r] == 1 ? pos_total : neg_total) += w[r];

  StumpFit best;
  auto consider = [&](std::size_t f, double thr, double left_pos, double left_neg) {
    // polarity +1 predicts 1 on the right, -1 predicts 1 on the left
    const double err_plus = left_pos + (neg_total - left_neg);
    const double err_minus = left_neg + (pos_total - left_pos);
    if (err_plus < best.error) best = {{f, thr, 1, 0.0}, err_plus};
    if (err_minus < best.error) best = {{f, thr, -1, 0.0}, err_minus};
  };

  for (std::size_t f = 0; f < x.cols(); ++f) {
    consider(f, -std::numeric_limits<double>::infinity(), 0.0, 0.0);
    const auto& order = sorted[f];
    double left_pos = 0.0;
    double left_neg = 0.0;
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
      const std::size_t r = order[i];
      (y[r] == 1 ? left_pos : left_neg) += w[r];
      const double a = x(r, f);
      const double b = x(order[i + 1], f);
      if (!(a < b)) continue;
      double mid = a + (b - a) / 2.0;
      if (mid >= b) mid = a;
      consider(f, mid, left_pos, left_neg);
    }
  }
  return best;
}

int stump_vote(const Stump& s, std::span<const double> row) {
  const bool right = row[s.feature] > s.threshold;
  return (right == (s.polarity > 0)) ? 1 : -1;
}

}  // namespace

AdaBoostModel train_adaboost(const Matrix& x, std::span<const int> y, const AdaBoostSettings& s) {
  const std::size_t n = x.rows();
  std::vector<std::vector<std::size_t>> sorted(x.cols());
  for (std::size_t f = 0; f < x.cols(); ++f) {
    auto& order = sorted[f];
    order.resize(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x(a, f) < x(b, f); });
  }

  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  AdaBoostModel model;
  for (std::size_t round = 0; round < s.rounds; ++round) {
    StumpFit fit = fit_stump(x, y, w, sorted);
    if (fit.error >= 0.5) break;
    const double err = std::max(fit.error, kMinError);
    fit.stump.alpha = 0.5 * std::log((1.0 - err) / err);
    require_finite(fit.stump.alpha, ClassifierKind::adaboost, "stump weight");
    model.stumps.push_back(fit.stump);
    if (fit.error <= 0.0) break;

    double norm = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const int target = y[r] == 1 ? 1 : -1;
      w[r] *= std::exp(-fit.stump.alpha * target * stump_vote(fit.stump, x.row(r)));
      norm += w[r];
    }
    for (double& v : w) v /= norm;
  }
  return model;
}

double adaboost_margin(const AdaBoostModel& m, std::span<const double> row) {
  double sum = 0.0;
  for (const auto& s : m.stumps) sum += s.alpha * stump_vote(s, row);
  return sum;
}

}  // namespace diabml::detail
