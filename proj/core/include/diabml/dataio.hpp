#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "diabml/matrix.hpp"

namespace diabml {

using Labels = std::vector<int>;
using RowIndices = std::vector<std::size_t>;

inline constexpr const char* kDefaultLabelColumn = "Diabetes_binary";

/// Feature matrix with binary labels (0 = non-diabetic, 1 = diabetic).
struct Dataset {
  std::vector<std::string> feature_names;
  Matrix features;
  Labels labels;

  std::size_t rows() const noexcept { return features.rows(); }
  std::size_t cols() const noexcept { return features.cols(); }

  /// Throws DataError when a shape or value invariant is broken.
  void validate() const;

  Dataset take_rows(std::span<const std::size_t> rows) const;
  Dataset take_cols(std::span<const std::size_t> cols) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

struct ClassCounts {
  std::size_t negatives = 0;
  std::size_t positives = 0;
};
ClassCounts count_classes(std::span<const int> labels);

struct CleanReport {
  std::size_t rows_in = 0;
  std::size_t duplicate_rows_dropped = 0;
  std::size_t invalid_rows_dropped = 0;
  std::size_t rows_out = 0;

  /// Flat "key: value" lines, one per field.
  std::string to_text() const;

  friend bool operator==(const CleanReport&, const CleanReport&) = default;
};

struct CleanResult {
  Dataset data;
  CleanReport report;
};

/// Per-column MinMax bounds.
struct ScalerParams {
  std::vector<double> minimum;
  std::vector<double> maximum;

  std::size_t cols() const noexcept { return minimum.size(); }
};

struct SplitIndices {
  RowIndices train_rows;
  RowIndices test_rows;
};

/// Reads a headered comma-separated file. The label column is removed from
/// the features; remaining columns keep header order.
Dataset load_csv(const std::filesystem::path& path,
                 const std::string& label_column = kDefaultLabelColumn);

/// Same as load_csv over in-memory text. `source` names the input in errors.
Dataset parse_csv(std::string_view text, const std::string& label_column,
                  const std::string& source = "<memory>");

/// Headered CSV text: feature columns in order, then the label column.
/// Reals use the shortest round-trip rendering.
std::string to_csv(const Dataset& data, const std::string& label_column = kDefaultLabelColumn);
/// Creates missing parent directories; throws IoError.
void save_csv(const Dataset& data, const std::filesystem::path& path,
              const std::string& label_column = kDefaultLabelColumn);

/// Drops rows with non-finite features and exact duplicates (features and
/// label), keeping the first occurrence and the survivors' relative order.
CleanResult clean(const Dataset& data);

ScalerParams fit_minmax(const Dataset& data, std::span<const std::size_t> rows);
/// Fits over every row.
ScalerParams fit_minmax(const Dataset& data);

/// (x - min) / (max - min) per cell, clamped into [0, 1]; constant columns
/// map to 0.
Dataset apply_minmax(const Dataset& data, const ScalerParams& params);

/// Applies the scaler to a single raw feature row.
std::vector<double> apply_minmax(std::span<const double> row, const ScalerParams& params);

/// Per-class seeded shuffle; each class contributes round(size * fraction)
/// rows to the test part. Both index lists are returned in ascending order.
SplitIndices stratified_split(std::span<const int> labels, double test_fraction,
                              std::uint64_t seed);
SplitIndices stratified_split(const Dataset& data, double test_fraction, std::uint64_t seed);

}  // namespace diabml
