#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "diabml/dataio.hpp"
#include "diabml/matrix.hpp"

namespace diabml {

struct SmoteConfig {
  std::size_t k_neighbors = 5;
  /// Minority:majority size ratio to reach after augmentation.
  double target_ratio = 1.0;
  std::uint64_t seed = 42;
  /// Worker threads for the neighbor search; 0 = hardware concurrency.
  unsigned threads = 0;

  void validate() const;
};

/// For each point, the indices of its k nearest other points by Euclidean
/// distance. Ties go to the lower index.
std::vector<std::vector<std::size_t>> minority_neighbors(const Matrix& points, std::size_t k,
                                                         unsigned threads = 1);

/// Where a synthetic row came from: row = parent + lambda * (neighbor - parent).
/// parent and neighbor index into the original feature matrix.
struct SyntheticOrigin {
  std::size_t parent = 0;
  std::size_t neighbor = 0;
  double lambda = 0.0;
};

struct SmoteResult {
  Matrix features;
  Labels labels;
  /// One entry per appended synthetic row, in output order.
  std::vector<SyntheticOrigin> origins;
  int minority_label = 1;
};

/// Number of synthetic rows needed to lift `minority` to ceil(ratio * majority).
std::size_t smote_deficit(std::size_t minority, std::size_t majority, double target_ratio);

/// Oversamples the minority class. Original rows are kept unchanged and in
/// order; synthetic minority rows are appended after them.
SmoteResult smote_oversample(const Matrix& features, std::span<const int> labels,
                             const SmoteConfig& config);

}  // namespace diabml
