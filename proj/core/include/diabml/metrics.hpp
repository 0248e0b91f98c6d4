#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace diabml {

/// Confusion counts with class 1 as the positive (diabetic) class.
struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const noexcept { return tp + fp + tn + fn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

/// Metrics derived from one confusion matrix. A metric whose denominator is
/// zero is reported as 0.0 and its `*_undefined` flag is set.
struct MetricsReport {
  double accuracy = 0.0;
  double sensitivity = 0.0;
  double specificity = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
  double mcc = 0.0;

  bool sensitivity_undefined = false;
  bool specificity_undefined = false;
  bool precision_undefined = false;
  bool f1_undefined = false;
  bool mcc_undefined = false;
};

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  friend bool operator==(const RocPoint&, const RocPoint&) = default;
};

/// Points from (0,0) to (1,1), non-decreasing in both coordinates.
using RocCurve = std::vector<RocPoint>;

ConfusionCounts confusion(std::span<const int> truth, std::span<const int> predicted);

MetricsReport compute_metrics(const ConfusionCounts& counts);

/// One point per group of tied scores, visited by descending score.
RocCurve roc_curve(std::span<const int> truth, std::span<const double> scores);

/// Trapezoidal area under the curve.
double auc(const RocCurve& curve);

nlohmann::json to_json(const ConfusionCounts& counts);
nlohmann::json to_json(const MetricsReport& report);

/// "fpr,tpr" header followed by one line per point.
std::string roc_to_csv(const RocCurve& curve);

}  // namespace diabml
