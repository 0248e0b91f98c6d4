#include "diabml/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "diabml/error.hpp"
#include "diabml/format.hpp"

namespace diabml {

ConfusionCounts confusion(std::span<const int> truth, std::span<const int> predicted) {
  if (truth.size() != predicted.size()) {
    throw DataError("confusion: truth has " + std::to_string(truth.size()) + " entries, predictions " +
                    std::to_string(predicted.size()));
  }
  if (truth.empty()) throw DataError("confusion: empty input");
  ConfusionCounts c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool actual = truth[i] == 1;
    const bool guess = predicted[i] == 1;
    if (actual && guess) {
      ++c.tp;
    } else if (actual) {
      ++c.fn;
    } else if (guess) {
      ++c.fp;
    } else {
      ++c.tn;
    }
  }
  return c;
}

MetricsReport compute_metrics(const ConfusionCounts& c) {
  if (c.total() == 0) throw DataError("compute_metrics: all counts are zero");
  const auto tp = static_cast<double>(c.tp);
  const auto fp = static_cast<double>(c.fp);
  const auto tn = static_cast<double>(c.tn);
  const auto fn = static_cast<double>(c.fn);

  auto ratio = [](double num, double den, bool& undefined) {
    if (den == 0.0) {
      undefined = true;
      return 0.0;
    }
    return num / den;
  };

  MetricsReport m;
  m.accuracy = (tp + tn) / (tp + fn + tn + fp);
  m.sensitivity = ratio(tp, tp + fn, m.sensitivity_undefined);
  m.specificity = ratio(tn, tn + fp, m.specificity_undefined);
  m.precision = ratio(tp, tp + fp, m.precision_undefined);
  m.f1 = ratio(2.0 * tp, 2.0 * tp + fn + fp, m.f1_undefined);
  const double den = std::sqrt((tp + fp) * (tp + fn) * (tn + fp) * (tn + fn));
  m.mcc = ratio(tp * tn - fp * fn, den, m.mcc_undefined);
  return m;
}

RocCurve roc_curve(std::span<const int> truth, std::span<const double> scores) {
  if (truth.size() != scores.size()) throw DataError("roc_curve: truth and scores differ in length");
  std::size_t positives = 0;
  for (int y : truth) positives += (y == 1);
  const std::size_t negatives = truth.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw DataError("roc_curve: both classes must be present");
  }

  std::vector<std::size_t> order(truth.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve curve{{0.0, 0.0}};
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double s = scores[order[i]];
    while (i < order.size() && scores[order[i]] == s) {
      (truth[order[i]] == 1 ? tp : fp) += 1;
      ++i;
    }
    curve.push_back({static_cast<double>(fp) / static_cast<double>(negatives),
                     static_cast<double>(tp) / static_cast<double>(positives)});
  }
  // the last group always lands on (1,1); make that exact
  curve.back() = {1.0, 1.0};
  return curve;
}

double auc(const RocCurve& curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    area += (curve[i].fpr - curve[i - 1].fpr) * (curve[i].tpr + curve[i - 1].tpr) / 2.0;
  }
  return area;
}

nlohmann::json to_json(const ConfusionCounts& c) {
  return {{"tp", c.tp}, {"fp", c.fp}, {"tn", c.tn}, {"fn", c.fn}};
}

nlohmann::json to_json(const MetricsReport& m) {
  nlohmann::json j = {
      {"accuracy", m.accuracy}, {"sensitivity", m.sensitivity}, {"specificity", m.specificity},
      {"precision", m.precision}, {"f1", m.f1},                 {"mcc", m.mcc},
  };
  nlohmann::json undefined = nlohmann::json::array();
  if (m.sensitivity_undefined) undefined.push_back("sensitivity");
  if (m.specificity_undefined) undefined.push_back("specificity");
  if (m.precision_undefined) undefined.push_back("precision");
  if (m.f1_undefined) undefined.push_back("f1");
  if (m.mcc_undefined) undefined.push_back("mcc");
  j["undefined"] = std::move(undefined);
  return j;
}

std::string roc_to_csv(const RocCurve& curve) {
  std::string out = "fpr,tpr\n";
  for (const auto& p : curve) {
    out += format_real(p.fpr);
    out += ',';
    out += format_real(p.tpr);
    out += '\n';
  }
  return out;
}

}  // namespace diabml
