#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "diabml/error.hpp"
#include "diabml/metrics.hpp"

using namespace diabml;

namespace {

// four-way tally, written independently of confusion()
ConfusionCounts tally(const std::vector<int>& truth, const std::vector<int>& pred) {
  ConfusionCounts c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == 1 && pred[i] == 1) c.tp++;
    if (truth[i] == 0 && pred[i] == 1) c.fp++;
    if (truth[i] == 0 && pred[i] == 0) c.tn++;
    if (truth[i] == 1 && pred[i] == 0) c.fn++;
  }
  return c;
}

// P(s+ > s-) + 0.5 P(tie) over all positive/negative pairs
double pairwise_auc(const std::vector<int>& truth, const std::vector<double>& s) {
  double wins = 0;
  double pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (truth[i] != 1) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (truth[j] != 0) continue;
      pairs += 1;
      if (s[i] > s[j]) wins += 1;
      else if (s[i] == s[j]) wins += 0.5;
    }
  }
  return wins / pairs;
}

}  // namespace

TEST(Confusion, PerfectPrediction) {
  const auto c = confusion(std::vector<int>{1, 0, 1}, std::vector<int>{1, 0, 1});
  EXPECT_EQ(c, (ConfusionCounts{2, 0, 1, 0}));
}

TEST(Confusion, TotalInversion) {
  const auto c = confusion(std::vector<int>{1, 1, 0, 0}, std::vector<int>{0, 0, 1, 1});
  EXPECT_EQ(c.tp, 0u);
  EXPECT_EQ(c.tn, 0u);
  EXPECT_EQ(c.fp, 2u);
  EXPECT_EQ(c.fn, 2u);
}

TEST(Confusion, MatchesTallyOracle) {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + gen() % 40;
    std::vector<int> t(n), p(n);
    for (std::size_t i = 0; i < n; ++i) {
      t[i] = static_cast<int>(gen() % 2);
      p[i] = static_cast<int>(gen() % 2);
    }
    ASSERT_EQ(confusion(t, p), tally(t, p));
  }
}

TEST(Confusion, RejectsBadInput) {
  EXPECT_THROW(confusion(std::vector<int>{1, 0}, std::vector<int>{1}), DataError);
  EXPECT_THROW(confusion(std::vector<int>{}, std::vector<int>{}), DataError);
}

TEST(ComputeMetrics, SymmetricCounts) {
  const auto m = compute_metrics({40, 10, 40, 10});
  EXPECT_NEAR(m.accuracy, 0.8, 1e-12);
  EXPECT_NEAR(m.sensitivity, 0.8, 1e-12);
  EXPECT_NEAR(m.specificity, 0.8, 1e-12);
  EXPECT_NEAR(m.precision, 0.8, 1e-12);
  EXPECT_NEAR(m.f1, 0.8, 1e-12);
  EXPECT_NEAR(m.mcc, 0.6, 1e-12);
}

TEST(ComputeMetrics, PerfectClassifier) {
  const auto m = compute_metrics({1, 0, 1, 0});
  for (double v : {m.accuracy, m.sensitivity, m.specificity, m.precision, m.f1, m.mcc}) EXPECT_DOUBLE_EQ(v, 1.0);
}

TEST(ComputeMetrics, MccWorkedExample) {
  // tp=6 fp=2 tn=5 fn=3: (30 - 6) / sqrt(8 * 9 * 7 * 8)
  const auto m = compute_metrics({6, 2, 5, 3});
  EXPECT_NEAR(m.mcc, 24.0 / std::sqrt(4032.0), 1e-12);
  EXPECT_NEAR(m.mcc, 0.3780, 1e-4);
}

TEST(ComputeMetrics, ZeroDenominatorsFlagged) {
  const auto m = compute_metrics({0, 0, 5, 0});  // no predicted or actual positives
  EXPECT_TRUE(m.sensitivity_undefined);
  EXPECT_TRUE(m.precision_undefined);
  EXPECT_TRUE(m.f1_undefined);
  EXPECT_TRUE(m.mcc_undefined);
  EXPECT_FALSE(m.specificity_undefined);
  EXPECT_EQ(m.sensitivity, 0.0);
  EXPECT_EQ(m.mcc, 0.0);
  EXPECT_EQ(m.specificity, 1.0);
  EXPECT_THROW(compute_metrics({0, 0, 0, 0}), DataError);
}

TEST(ComputeMetrics, Identities) {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 2000; ++trial) {
    ConfusionCounts c{gen() % 50, gen() % 50, gen() % 50, gen() % 50};
    if (c.total() == 0) continue;
    const auto m = compute_metrics(c);
    if (c.tp + c.fn > 0) EXPECT_EQ(m.sensitivity, static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn));
    if (c.tp + c.fn > 0 && c.tp + c.fp > 0 && m.precision + m.sensitivity > 0) {
      EXPECT_NEAR(m.f1, 2 * m.precision * m.sensitivity / (m.precision + m.sensitivity), 1e-12);
    }
    // swapping predicted labels negates MCC
    const auto swapped = compute_metrics({c.fn, c.tn, c.fp, c.tp});
    EXPECT_EQ(swapped.mcc, -m.mcc);
    EXPECT_GE(m.mcc, -1.0);
    EXPECT_LE(m.mcc, 1.0);
  }
}

TEST(ComputeMetrics, PermutationInvariant) {
  std::mt19937_64 gen(5);
  std::vector<int> t(60), p(60);
  for (std::size_t i = 0; i < t.size(); ++i) {
    t[i] = static_cast<int>(gen() % 2);
    p[i] = static_cast<int>(gen() % 2);
  }
  const auto before = confusion(t, p);
  std::vector<std::size_t> perm(t.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), gen);
  std::vector<int> t2, p2;
  for (std::size_t i : perm) {
    t2.push_back(t[i]);
    p2.push_back(p[i]);
  }
  EXPECT_EQ(confusion(t2, p2), before);
}

TEST(Roc, PerfectRankingPassesThroughTopLeft) {
  const auto curve = roc_curve(std::vector<int>{1, 1, 0, 0}, std::vector<double>{0.9, 0.8, 0.3, 0.1});
  EXPECT_NE(std::find(curve.begin(), curve.end(), RocPoint{0.0, 1.0}), curve.end());
  EXPECT_DOUBLE_EQ(auc(curve), 1.0);
}

TEST(Roc, AllTiedIsTwoPoints) {
  const auto curve = roc_curve(std::vector<int>{1, 0, 1, 0}, std::vector<double>{0.5, 0.5, 0.5, 0.5});
  ASSERT_EQ(curve.size(), 2u);
  EXPECT_EQ(curve[0], (RocPoint{0, 0}));
  EXPECT_EQ(curve[1], (RocPoint{1, 1}));
  EXPECT_DOUBLE_EQ(auc(curve), 0.5);
}

TEST(Roc, SingleClassRejected) {
  EXPECT_THROW(roc_curve(std::vector<int>{1, 1}, std::vector<double>{0.1, 0.2}), DataError);
}

TEST(Roc, MatchesThresholdSweep) {
  std::mt19937_64 gen(21);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> t(50);
    std::vector<double> s(50);
    for (std::size_t i = 0; i < t.size(); ++i) {
      t[i] = i < 2 ? static_cast<int>(i) : static_cast<int>(gen() % 2);
      s[i] = static_cast<double>(gen() % 12) / 11.0;  // coarse grid forces ties
    }
    const auto curve = roc_curve(t, s);
    std::set<double, std::greater<>> thresholds(s.begin(), s.end());
    const double pos = static_cast<double>(std::count(t.begin(), t.end(), 1));
    const double neg = static_cast<double>(t.size()) - pos;
    ASSERT_EQ(curve.size(), thresholds.size() + 1);
    EXPECT_EQ(curve.front(), (RocPoint{0, 0}));
    std::size_t k = 1;
    for (double th : thresholds) {
      double tp = 0, fp = 0;
      for (std::size_t i = 0; i < t.size(); ++i) {
        if (s[i] >= th) (t[i] == 1 ? tp : fp) += 1;
      }
      EXPECT_NEAR(curve[k].tpr, tp / pos, 1e-15);
      EXPECT_NEAR(curve[k].fpr, fp / neg, 1e-15);
      ++k;
    }
    EXPECT_EQ(curve.back(), (RocPoint{1, 1}));
    for (std::size_t i = 1; i < curve.size(); ++i) {
      EXPECT_GE(curve[i].fpr, curve[i - 1].fpr);
      EXPECT_GE(curve[i].tpr, curve[i - 1].tpr);
    }
  }
}

TEST(Auc, ReferenceCurves) {
  EXPECT_DOUBLE_EQ(auc({{0, 0}, {0, 1}, {1, 1}}), 1.0);
  EXPECT_DOUBLE_EQ(auc({{0, 0}, {1, 1}}), 0.5);
}

TEST(Auc, MatchesPairwiseOracleAndInverts) {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<int> t(200);
    std::vector<double> s(200), inv(200);
    for (std::size_t i = 0; i < t.size(); ++i) {
      t[i] = i < 2 ? static_cast<int>(i) : static_cast<int>(gen() % 2);
      s[i] = trial % 2 ? std::round(u(gen) * 20) / 20 : u(gen);
      inv[i] = 1.0 - s[i];
    }
    const double a = auc(roc_curve(t, s));
    EXPECT_NEAR(a, pairwise_auc(t, s), 1e-9);
    EXPECT_NEAR(auc(roc_curve(t, inv)), 1.0 - a, 1e-12);
  }
}

TEST(MetricsIo, JsonAndCsv) {
  const auto j = to_json(compute_metrics({0, 0, 5, 0}));
  EXPECT_EQ(j.at("accuracy").get<double>(), 1.0);
  EXPECT_TRUE(j.contains("undefined"));
  EXPECT_EQ(roc_to_csv({{0, 0}, {1, 1}}), "fpr,tpr\n0,0\n1,1\n");
}
