#pragma once

// Per-kind trainers and scorers behind the public dispatch in classifiers.cpp.

#include <span>
#include <vector>

#include "diabml/classifiers.hpp"

namespace diabml::detail {

NaiveBayesModel train_naive_bayes(const Matrix& x, std::span<const int> y, const NaiveBayesSettings& s);
double score_naive_bayes(const NaiveBayesModel& m, std::span<const double> row);

LogisticModel train_logistic(const Matrix& x, std::span<const int> y, const LogisticSettings& s);
double score_logistic(const LogisticModel& m, std::span<const double> row);

SvmModel train_svm(const Matrix& x, std::span<const int> y, const SvmSettings& s, std::uint64_t seed);
double score_svm(const SvmModel& m, std::span<const double> row);

ForestModel train_forest(const Matrix& x, std::span<const int> y, const ForestSettings& s,
                         std::uint64_t seed);
double score_forest(const ForestModel& m, std::span<const double> row);

/// Rows sorted by (x(r, col), r).
std::vector<std::size_t> sorted_rows(const Matrix& x, std::span<const std::size_t> rows, std::size_t col);
/// Same tree as build_tree with unit weights over the rows in `orders`, which
/// holds one sorted_rows list per column of x.
TreeModel build_tree_presorted(const Matrix& x, std::span<const int> y,
                               std::span<const std::vector<std::size_t>* const> orders, const TreeSettings& settings,
                               std::uint64_t seed);

KnnModel train_knn(const Matrix& x, std::span<const int> y, const KnnSettings& s);
std::vector<double> score_knn(const KnnModel& m, const Matrix& x);

MlpModel train_mlp(const Matrix& x, std::span<const int> y, const MlpSettings& s, std::uint64_t seed);

AdaBoostModel train_adaboost(const Matrix& x, std::span<const int> y, const AdaBoostSettings& s);
double adaboost_margin(const AdaBoostModel& m, std::span<const double> row);

void require_finite(double value, ClassifierKind kind, const char* what);

}  // namespace diabml::detail
