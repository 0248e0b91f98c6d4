#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "diabml/balance.hpp"
#include "diabml/error.hpp"

using namespace diabml;

namespace {

// exhaustive all-pairs sort, ties by lower index
std::vector<std::vector<std::size_t>> brute_neighbors(const Matrix& m, std::size_t k) {
  std::vector<std::vector<std::size_t>> out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    std::vector<std::pair<double, std::size_t>> d;
    for (std::size_t j = 0; j < m.rows(); ++j) {
      if (j == i) continue;
      double s = 0;
      for (std::size_t c = 0; c < m.cols(); ++c) s += (m(i, c) - m(j, c)) * (m(i, c) - m(j, c));
      d.push_back({s, j});
    }
    std::sort(d.begin(), d.end());
    for (std::size_t t = 0; t < k; ++t) out[i].push_back(d[t].second);
  }
  return out;
}

}  // namespace

TEST(Neighbors, ByInspection) {
  const auto m = Matrix::from_rows({{0, 0}, {1, 1}, {10, 10}});
  EXPECT_EQ(minority_neighbors(m, 1), (std::vector<std::vector<std::size_t>>{{1}, {0}, {1}}));
}

TEST(Neighbors, IdenticalPointsNameEachOther) {
  const auto m = Matrix::from_rows({{3, 3}, {3, 3}});
  EXPECT_EQ(minority_neighbors(m, 1), (std::vector<std::vector<std::size_t>>{{1}, {0}}));
}

TEST(Neighbors, MatchesBruteForce) {
  std::mt19937_64 gen(1);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix m(20, 3);
    for (std::size_t r = 0; r < 20; ++r) {
      for (double& v : m.row(r)) v = static_cast<double>(gen() % 5);  // many distance ties
    }
    EXPECT_EQ(minority_neighbors(m, 3, 2), brute_neighbors(m, 3));
  }
}

TEST(Neighbors, TooFewPoints) {
  EXPECT_THROW(minority_neighbors(Matrix::from_rows({{0.0}, {1.0}}), 2), DataError);
}

TEST(Smote, ParityArithmetic) {
  Matrix x(120, 2);
  Labels y(120, 0);
  std::mt19937_64 gen(3);
  for (std::size_t r = 0; r < 120; ++r) {
    x(r, 0) = static_cast<double>(gen() % 1000);
    x(r, 1) = static_cast<double>(gen() % 1000);
    if (r < 20) y[r] = 1;
  }
  const auto res = smote_oversample(x, y, {});
  EXPECT_EQ(std::count(res.labels.begin(), res.labels.end(), 0), 100);
  EXPECT_EQ(std::count(res.labels.begin(), res.labels.end(), 1), 100);
  EXPECT_EQ(res.origins.size(), 80u);
  for (std::size_t r = 0; r < 120; ++r) {
    for (std::size_t c = 0; c < 2; ++c) EXPECT_EQ(res.features(r, c), x(r, c));
  }
}

TEST(Smote, MidpointInterpolation) {
  // synthetic = p + lambda (q - p); for p=(0,0), q=(1,1) every point sits on the diagonal
  const auto x = Matrix::from_rows({{0, 0}, {1, 1}, {5, 5}, {6, 6}, {7, 7}, {8, 8}});
  const Labels y{1, 1, 0, 0, 0, 0};
  SmoteConfig cfg;
  cfg.k_neighbors = 1;
  const auto res = smote_oversample(x, y, cfg);
  ASSERT_EQ(res.origins.size(), 2u);
  for (std::size_t i = 0; i < res.origins.size(); ++i) {
    const auto& o = res.origins[i];
    const auto row = res.features.row(6 + i);
    const double expect = x(o.parent, 0) + o.lambda * (x(o.neighbor, 0) - x(o.parent, 0));
    EXPECT_DOUBLE_EQ(row[0], expect);
    EXPECT_DOUBLE_EQ(row[0], row[1]);
  }
  // lambda = 0.5 itself
  const double p = 0.0, q = 1.0;
  EXPECT_EQ(p + 0.5 * (q - p), 0.5);
}

TEST(Smote, BalancedInputUnchanged) {
  const auto x = Matrix::from_rows({{0}, {1}, {2}, {3}});
  const Labels y{0, 1, 0, 1};
  SmoteConfig cfg;
  cfg.k_neighbors = 1;
  const auto res = smote_oversample(x, y, cfg);
  EXPECT_EQ(res.features, x);
  EXPECT_EQ(res.labels, y);
}

TEST(Smote, IdenticalMinorityGivesIdenticalSynthetics) {
  const auto x = Matrix::from_rows({{2, 3}, {2, 3}, {2, 3}, {0, 0}, {1, 0}, {0, 1}, {1, 1}, {9, 9}, {8, 8}});
  const Labels y{1, 1, 1, 0, 0, 0, 0, 0, 0};
  SmoteConfig cfg;
  cfg.k_neighbors = 2;
  const auto res = smote_oversample(x, y, cfg);
  for (std::size_t r = x.rows(); r < res.features.rows(); ++r) {
    EXPECT_EQ(res.features(r, 0), 2.0);
    EXPECT_EQ(res.features(r, 1), 3.0);
  }
}

TEST(Smote, DeficitFormula) {
  EXPECT_EQ(smote_deficit(20, 100, 1.0), 80u);
  EXPECT_EQ(smote_deficit(20, 100, 0.5), 30u);
  EXPECT_EQ(smote_deficit(60, 100, 0.5), 0u);
  EXPECT_EQ(smote_deficit(1, 3, 0.5), 1u);  // ceil(1.5) = 2
}

TEST(Smote, DeterministicAndSeeded) {
  Matrix x(40, 3);
  Labels y(40, 0);
  std::mt19937_64 gen(7);
  for (std::size_t r = 0; r < 40; ++r) {
    for (double& v : x.row(r)) v = static_cast<double>(gen() % 100) / 10.0;
    y[r] = r % 4 == 0;
  }
  SmoteConfig a;
  const auto r1 = smote_oversample(x, y, a);
  const auto r2 = smote_oversample(x, y, a);
  EXPECT_EQ(r1.features, r2.features);
  a.seed = 43;
  EXPECT_NE(smote_oversample(x, y, a).features, r1.features);
}

TEST(Smote, Errors) {
  const auto x = Matrix::from_rows({{0}, {1}, {2}});
  EXPECT_THROW(smote_oversample(x, Labels{1, 1, 1}, {}), DataError);
  SmoteConfig cfg;
  cfg.k_neighbors = 2;
  EXPECT_THROW(smote_oversample(x, Labels{0, 0, 1}, cfg), DataError);
  cfg.k_neighbors = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.target_ratio = 1.5;
  EXPECT_THROW(cfg.validate(), ConfigError);
}
