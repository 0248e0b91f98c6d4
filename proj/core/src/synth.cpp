#include <algorithm>
#include <cmath>
#include <numeric>

#include "diabml/error.hpp"
#include "diabml/pipeline.hpp"
#include "diabml/rng.hpp"

namespace diabml {

Dataset synth_dataset(std::uint64_t seed, std::size_t rows, const std::vector<std::size_t>& informative,
                      std::size_t noise_features, double flip_rate, double imbalance) {
  if (!(flip_rate >= 0.0 && flip_rate < 0.5)) throw ConfigError("synth: flip_rate must lie in [0, 0.5)");
  if (!(imbalance > 0.0 && imbalance <= 1.0)) throw ConfigError("synth: imbalance must lie in (0, 1]");
  if (rows == 0) throw ConfigError("synth: rows must be positive");
  const std::size_t total = informative.size() + noise_features;
  const FeatureSubset planted(informative, total);  // validates indices
  if (planted.size() == 0) throw ConfigError("synth: at least one informative feature is required");

  Dataset data;
  for (std::size_t c = 0; c < total; ++c) data.feature_names.push_back("f" + std::to_string(c + 1));

  Rng feature_rng(derive_seed(seed, 1));
  data.features = Matrix(rows, total);
  for (std::size_t r = 0; r < rows; ++r) {
    for (double& v : data.features.row(r)) v = feature_rng.uniform();
  }

  Rng weight_rng(derive_seed(seed, 2));
  std::vector<double> weights(informative.size());
  for (double& w : weights) w = weight_rng.uniform(0.8, 1.2);

  std::vector<double> score(rows, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < informative.size(); ++j) score[r] += weights[j] * data.features(r, informative[j]);
  }

  // the top round(rows * imbalance) scores are positive
  std::vector<std::size_t> order(rows);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
  const auto positives = static_cast<std::size_t>(std::llround(static_cast<double>(rows) * imbalance));
  data.labels.assign(rows, 0);
  for (std::size_t i = 0; i < positives; ++i) data.labels[order[i]] = 1;

  Rng flip_rng(derive_seed(seed, 3));
  for (auto& y : data.labels) {
    if (flip_rng.bernoulli(flip_rate)) y = 1 - y;
  }
  return data;
}

}  // namespace diabml
