// k-nearest-neighbour voting.

#include <algorithm>
#include <cmath>
#include <queue>

#include "classifiers_internal.hpp"
#include "diabml/parallel.hpp"

namespace diabml::detail {

KnnModel train_knn(const Matrix& x, std::span<const int> y, const KnnSettings& s) {
  KnnModel m;
  m.k = std::min(s.k, x.rows());
  m.threads = s.threads;
  m.points = x;
  m.labels.assign(y.begin(), y.end());
  return m;
}

std::vector<double> score_knn(const KnnModel& m, const Matrix& x) {
  std::vector<double> scores(x.rows());
  const std::size_t n = m.points.rows();
  const std::size_t k = m.k;
  parallel_for(x.rows(), m.threads, [&](std::size_t q) {
    const auto query = x.row(q);
    // max-heap on (distance, index): top is the current k-th neighbour
    std::priority_queue<std::pair<double, std::size_t>> heap;
    for (std::size_t j = 0; j < n; ++j) {
      const auto p = m.points.row(j);
      const double bound = heap.size() == k ? heap.top().first : INFINITY;
      double d = 0.0;
      for (std::size_t c = 0; c < p.size() && d <= bound; ++c) {
        const double diff = query[c] - p[c];
        d += diff * diff;
      }
      if (heap.size() < k) {
        heap.emplace(d, j);
      } else if (d < bound) {
        // equal distance keeps the earlier (lower-index) neighbour
        heap.pop();
        heap.emplace(d, j);
      }
    }
    std::size_t positive = 0;
    while (!heap.empty()) {
      positive += m.labels[heap.top().second] == 1 ? 1 : 0;
      heap.pop();
    }
    double score = static_cast<double>(positive) / static_cast<double>(k);
    // a split vote resolves to class 0, so keep its score just under the threshold
    if (2 * positive == k) score = std::nextafter(0.5, 0.0);
    scores[q] = score;
  });
  return scores;
}

}  // namespace diabml::detail
