#include "diabml/balance.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "diabml/error.hpp"
#include "diabml/parallel.hpp"
#include "diabml/rng.hpp"

namespace diabml {

void SmoteConfig::validate() const {
  if (k_neighbors < 1) throw ConfigError("SMOTE k_neighbors must be >= 1");
  if (!(target_ratio > 0.0 && target_ratio <= 1.0)) {
    throw ConfigError("SMOTE target_ratio must lie in (0, 1]");
  }
}

std::vector<std::vector<std::size_t>> minority_neighbors(const Matrix& points, std::size_t k,
                                                         unsigned threads) {
  const std::size_t n = points.rows();
  if (n < 2 || k < 1 || k > n - 1) {
    throw DataError("minority_neighbors: need k in [1, " + std::to_string(n == 0 ? 0 : n - 1) +
                    "] for " + std::to_string(n) + " points, got k = " + std::to_string(k));
  }
  std::vector<std::vector<std::size_t>> result(n);
  parallel_for(n, threads, [&](std::size_t i) {
    // (squared distance, index); lexicographic order gives the lower-index tie rule
    std::vector<std::pair<double, std::size_t>> dist;
    dist.reserve(n - 1);
    const auto pi = points.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const auto pj = points.row(j);
      double d = 0.0;
      for (std::size_t c = 0; c < pi.size(); ++c) {
        const double diff = pi[c] - pj[c];
        d += diff * diff;
      }
      dist.emplace_back(d, j);
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
    auto& out = result[i];
    out.reserve(k);
    for (std::size_t m = 0; m < k; ++m) out.push_back(dist[m].second);
  });
  return result;
}

std::size_t smote_deficit(std::size_t minority, std::size_t majority, double target_ratio) {
  const auto target = static_cast<std::size_t>(std::ceil(target_ratio * static_cast<double>(majority)));
  return target > minority ? target - minority : 0;
}

SmoteResult smote_oversample(const Matrix& features, std::span<const int> labels,
                             const SmoteConfig& config) {
  config.validate();
  if (features.rows() != labels.size()) {
    throw DataError("smote_oversample: feature rows and labels differ in length");
  }
  const auto counts = count_classes(labels);
  if (counts.positives == 0 || counts.negatives == 0) {
    throw DataError("smote_oversample: input contains a single class");
  }

  SmoteResult result;
  result.minority_label = counts.positives <= counts.negatives ? 1 : 0;
  const std::size_t minority_count = std::min(counts.positives, counts.negatives);
  const std::size_t majority_count = std::max(counts.positives, counts.negatives);
  if (minority_count <= config.k_neighbors) {
    throw DataError("smote_oversample: minority class has " + std::to_string(minority_count) +
                    " rows, needs more than k_neighbors = " + std::to_string(config.k_neighbors));
  }

  result.features = features;
  result.labels.assign(labels.begin(), labels.end());

  const std::size_t deficit = smote_deficit(minority_count, majority_count, config.target_ratio);
  if (deficit == 0) return result;

  RowIndices minority_rows;
  minority_rows.reserve(minority_count);
  for (std::size_t r = 0; r < labels.size(); ++r) {
    if (labels[r] == result.minority_label) minority_rows.push_back(r);
  }
  const Matrix minority = features.take_rows(minority_rows);
  const auto neighbors = minority_neighbors(minority, config.k_neighbors, config.threads);

  Rng rng(config.seed);
  RowIndices order(minority_count);
  for (std::size_t i = 0; i < minority_count; ++i) order[i] = i;
  rng.shuffle(order);

  result.features.reserve_rows(features.rows() + deficit);
  result.labels.reserve(labels.size() + deficit);
  result.origins.reserve(deficit);
  std::vector<double> synthetic(features.cols());
  for (std::size_t s = 0; s < deficit; ++s) {
    const std::size_t p = order[s % minority_count];
    const std::size_t q = neighbors[p][rng.index(config.k_neighbors)];
    const double lambda = rng.uniform_closed();
    const auto pr = minority.row(p);
    const auto qr = minority.row(q);
    for (std::size_t c = 0; c < synthetic.size(); ++c) {
      // clamp away the rounding error that can push the result one ulp past q
      synthetic[c] = std::clamp(pr[c] + lambda * (qr[c] - pr[c]), std::min(pr[c], qr[c]),
                                std::max(pr[c], qr[c]));
    }
    result.features.append_row(synthetic);
    result.labels.push_back(result.minority_label);
    result.origins.push_back({minority_rows[p], minority_rows[q], lambda});
  }
  return result;
}

}  // namespace diabml
