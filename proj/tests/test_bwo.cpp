#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "diabml/bwo.hpp"
#include "diabml/error.hpp"
#include "diabml/pipeline.hpp"

using namespace diabml;

namespace {

void expect_valid(const FeatureSubset& s, std::size_t n, std::size_t total) {
  ASSERT_EQ(s.size(), n);
  std::set<std::size_t> seen;
  for (std::size_t i : s.indices()) {
    EXPECT_LT(i, total);
    EXPECT_TRUE(seen.insert(i).second);
  }
}

std::vector<Candidate> with_fitness(const std::vector<double>& f) {
  std::vector<Candidate> out;
  for (std::size_t i = 0; i < f.size(); ++i) out.push_back({FeatureSubset({i}, f.size()), f[i], i});
  return out;
}

double planted_overlap(const FeatureSubset& s) {
  double hit = 0;
  for (std::size_t i : s.indices()) hit += i < 9;
  return hit / 9.0;
}

}  // namespace

TEST(Subset, InvariantsAndFormatting) {
  const FeatureSubset s({8, 0, 3}, 21);
  EXPECT_EQ(s.one_based(), "1;4;9");
  EXPECT_TRUE(s.contains(3));
  EXPECT_FALSE(s.contains(4));
  EXPECT_THROW(FeatureSubset({1, 1}, 5), DataError);
  EXPECT_THROW(FeatureSubset({5}, 5), DataError);
}

TEST(InitPopulation, FullSetWhenNEqualsF) {
  BwoConfig cfg;
  cfg.population_size = 5;
  cfg.subset_size = 4;
  Rng rng(1);
  CandidateFactory f([](const FeatureSubset&) { return 0.5; });
  for (const auto& c : init_population(cfg, 4, rng, f)) EXPECT_EQ(c.subset.sorted(), (std::vector<std::size_t>{0, 1, 2, 3}));
}

TEST(InitPopulation, ValidAndDeterministic) {
  BwoConfig cfg;
  cfg.population_size = 10;
  Rng a(5), b(5);
  CandidateFactory fa([](const FeatureSubset&) { return 0.5; });
  CandidateFactory fb([](const FeatureSubset&) { return 0.5; });
  const auto pa = init_population(cfg, 21, a, fa);
  const auto pb = init_population(cfg, 21, b, fb);
  ASSERT_EQ(pa.size(), 10u);
  for (std::size_t i = 0; i < pa.size(); ++i) {
    expect_valid(pa[i].subset, 9, 21);
    EXPECT_EQ(pa[i].subset, pb[i].subset);
    EXPECT_EQ(pa[i].id, i);
  }
  cfg.subset_size = 22;
  EXPECT_THROW(cfg.validate(21), ConfigError);
}

TEST(SelectP1, Examples) {
  const auto pop = with_fitness({0.9, 0.5, 0.7});
  const auto top = select_p1(pop, 0.34);
  ASSERT_EQ(top.size(), 2u);  // ceil(0.34 * 3) = 2
  EXPECT_EQ(top[0].fitness, 0.9);
  const auto one = select_p1(pop, 0.33);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].fitness, 0.9);
  const auto all = select_p1(pop, 1.0);
  EXPECT_EQ(all[0].fitness, 0.9);
  EXPECT_EQ(all[1].fitness, 0.7);
  EXPECT_EQ(all[2].fitness, 0.5);
  const auto flat = select_p1(with_fitness({0.5, 0.5, 0.5, 0.5, 0.5}), 0.4);
  ASSERT_EQ(flat.size(), 2u);
  EXPECT_EQ(flat[0].id, 0u);
  EXPECT_EQ(flat[1].id, 1u);
}

TEST(Crossover, IdentityMaskAndEqualParents) {
  const FeatureSubset a({0, 1, 2, 3}, 10), b({6, 7, 8, 9}, 10);
  Rng rng(1);
  const auto [c1, c2] = crossover(a, b, std::vector<bool>(4, true), 10, rng);
  EXPECT_EQ(c1, a);
  EXPECT_EQ(c2, b);
  const Candidate ca{a, 0.5, 0};
  for (const auto& child : procreate_pair(ca, ca, 3, 10, rng)) EXPECT_EQ(child, a);
}

TEST(Crossover, ChildrenAlwaysValid) {
  std::vector<std::size_t> lo(9), hi(9);
  for (std::size_t i = 0; i < 9; ++i) {
    lo[i] = i;
    hi[i] = 12 + i;
  }
  const Candidate a{FeatureSubset(lo, 21), 0, 0}, b{FeatureSubset(hi, 21), 0, 1};
  Rng rng(2);
  for (int i = 0; i < 1000; ++i) {
    const auto kids = procreate_pair(a, b, 1, 21, rng);
    ASSERT_EQ(kids.size(), 2u);
    for (const auto& k : kids) expect_valid(k, 9, 21);
  }
  // overlapping parents force collisions that repair must resolve
  const Candidate c{FeatureSubset({0, 1, 2, 3}, 6), 0, 0}, d{FeatureSubset({3, 2, 1, 0}, 6), 0, 1};
  for (int i = 0; i < 1000; ++i) {
    for (const auto& k : procreate_pair(c, d, 2, 6, rng)) expect_valid(k, 4, 6);
  }
}

TEST(Repair, Examples) {
  Rng rng(3);
  const std::vector<std::size_t> raw{3, 3, 7};
  const auto r = repair(raw, 3, 10, rng);
  expect_valid(r, 3, 10);
  EXPECT_EQ(r.indices()[0], 3u);
  EXPECT_EQ(r.indices()[1], 7u);
  EXPECT_TRUE(r.indices()[2] != 3 && r.indices()[2] != 7);

  const std::vector<std::size_t> ok{4, 1, 9};
  EXPECT_EQ(repair(ok, 3, 10, rng).indices(), ok);

  const std::vector<std::size_t> missing{0, 1, 1, 3};
  EXPECT_EQ(repair(missing, 4, 4, rng).indices(), (std::vector<std::size_t>{0, 1, 3, 2}));
  EXPECT_THROW(repair(ok, 11, 10, rng), Error);
}

TEST(Cannibalize, Examples) {
  const auto pop = with_fitness({0.1, 0.9, 0.5, 0.3, 0.7, 0.2, 0.8, 0.4, 0.6, 0.0});
  const auto same = cannibalize(pop, 0.0);
  ASSERT_EQ(same.size(), 10u);
  EXPECT_EQ(same.front().fitness, 0.9);
  EXPECT_EQ(same.back().fitness, 0.0);
  const auto half = cannibalize(pop, 0.5);
  ASSERT_EQ(half.size(), 5u);
  for (const auto& c : half) EXPECT_GE(c.fitness, 0.5);
  const auto two = cannibalize(with_fitness({0.2, 0.8}), 0.99);
  ASSERT_EQ(two.size(), 1u);
  EXPECT_EQ(two[0].fitness, 0.8);
}

TEST(Mutate, Examples) {
  Rng rng(4);
  const Candidate full{FeatureSubset::all(5), 0, 0};
  EXPECT_EQ(mutate(full, 5, rng), full.subset);

  const Candidate small{FeatureSubset({0, 1, 2}, 4), 0, 0};
  for (int i = 0; i < 50; ++i) {
    const auto m = mutate(small, 4, rng);
    EXPECT_TRUE(m.contains(3));
    EXPECT_EQ(m.contains(0) + m.contains(1) + m.contains(2), 2);
  }

  std::vector<std::size_t> lo(9);
  for (std::size_t i = 0; i < 9; ++i) lo[i] = i;
  const Candidate c{FeatureSubset(lo, 21), 0, 0};
  for (int i = 0; i < 1000; ++i) {
    const auto m = mutate(c, 21, rng);
    expect_valid(m, 9, 21);
    std::size_t outside = 0;
    for (std::size_t j : m.indices()) outside += j >= 9;
    EXPECT_EQ(outside, 1u);
  }
}

TEST(Optimize, ConstantLandscape) {
  BwoConfig cfg;
  cfg.max_iterations = 10;
  const auto r = bwo_optimize([](const FeatureSubset&) { return 0.5; }, cfg, 21);
  EXPECT_EQ(r.best.fitness, 0.5);
  EXPECT_EQ(r.trace.best_fitness, std::vector<double>(11, 0.5));
}

TEST(Optimize, PlantedOptimumOverTenSeeds) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    BwoConfig cfg;
    cfg.population_size = 30;
    cfg.seed = seed;
    const auto r = bwo_optimize(planted_overlap, cfg, 21);
    EXPECT_EQ(r.best.fitness, 1.0) << "seed " << seed;
    EXPECT_EQ(r.best.subset.sorted(), (std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6, 7, 8}));
    for (std::size_t i = 1; i < r.trace.best_fitness.size(); ++i) {
      EXPECT_GE(r.trace.best_fitness[i], r.trace.best_fitness[i - 1]);
    }
  }
}

TEST(Optimize, DeterministicAndBookkeeping) {
  BwoConfig cfg;
  cfg.max_iterations = 15;
  std::size_t calls = 0;
  auto counted = [&calls](const FeatureSubset& s) {
    ++calls;
    return planted_overlap(s);
  };
  const auto a = bwo_optimize(counted, cfg, 21);
  const auto b = bwo_optimize(planted_overlap, cfg, 21);
  EXPECT_EQ(a.trace.best_fitness, b.trace.best_fitness);
  EXPECT_EQ(a.trace.best_subset, b.trace.best_subset);
  EXPECT_EQ(a.trace.to_csv(), b.trace.to_csv());
  EXPECT_EQ(a.trace.distinct_evaluations, calls);

  // population + per iteration: 2 children per pair of p1 (24 -> 12 pairs) and ceil(0.4 * 24) mutants
  const std::size_t p1 = 24;
  EXPECT_EQ(a.trace.fitness_evaluations, 40 + 15 * ((p1 / 2) * 2 + 10));
}

TEST(Optimize, ThreadsDoNotChangeResult) {
  BwoConfig cfg;
  cfg.max_iterations = 10;
  const auto one = bwo_optimize(planted_overlap, cfg, 21);
  cfg.threads = 4;
  const auto four = bwo_optimize(planted_overlap, cfg, 21);
  EXPECT_EQ(one.trace.best_subset, four.trace.best_subset);
  EXPECT_EQ(one.best.id, four.best.id);
}

TEST(Optimize, PatienceStopsEarly) {
  BwoConfig cfg;
  cfg.patience = 3;
  const auto r = bwo_optimize([](const FeatureSubset&) { return 0.25; }, cfg, 21);
  EXPECT_EQ(r.trace.best_fitness.size(), 4u);
}

TEST(Optimize, FitnessErrorsCarryContext) {
  BwoConfig cfg;
  try {
    bwo_optimize([](const FeatureSubset&) -> double { throw DataError("boom"); }, cfg, 21);
    FAIL();
  } catch (const Error& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("iteration 0"), std::string::npos);
    EXPECT_NE(msg.find("candidate"), std::string::npos);
    EXPECT_NE(msg.find("boom"), std::string::npos);
  }
  EXPECT_THROW(bwo_optimize([](const FeatureSubset&) { return 1.5; }, cfg, 21), Error);
}

TEST(TraceCsv, Format) {
  BwoTrace t;
  t.best_fitness = {0.5, 0.75};
  t.best_subset = {FeatureSubset({2, 0}, 5), FeatureSubset({4, 1}, 5)};
  EXPECT_EQ(t.to_csv(), "iteration,best_fitness,best_subset\n0,0.5,1;3\n1,0.75,2;5\n");
}

TEST(AccuracyFitness, PerfectValidationIsOne) {
  Dataset d;
  d.feature_names = {"a", "b"};
  d.features = Matrix::from_rows({{0, 5}, {1, 5}, {0, 6}, {1, 6}, {0, 7}, {1, 7}});
  d.labels = {0, 1, 0, 1, 0, 1};
  const std::vector<std::size_t> train{0, 1, 2, 3}, val{4, 5};
  EXPECT_EQ(accuracy_fitness(d, train, val, SurrogateConfig::default_surrogate_classifier(), FeatureSubset({0}, 2)),
            1.0);
}

TEST(AccuracyFitness, MatchesDirectClassifier) {
  const auto d = synth_dataset(3, 600, {0, 1, 2}, 5, 0.05, 0.5);
  std::vector<std::size_t> train, val;
  for (std::size_t r = 0; r < d.rows(); ++r) (r % 4 == 0 ? val : train).push_back(r);
  const FeatureSubset s({4, 0, 2}, d.cols());
  ClassifierConfig cfg;
  cfg.kind = ClassifierKind::naive_bayes;
  const double got = accuracy_fitness(d, train, val, cfg, s);

  const auto cols = s.indices();
  const auto model = diabml::train(cfg, d.features.take_rows(train).take_cols(cols), d.take_rows(train).labels);
  const auto pred = predict_labels(model, d.features.take_rows(val).take_cols(cols));
  double correct = 0;
  for (std::size_t i = 0; i < val.size(); ++i) correct += pred[i] == d.labels[val[i]];
  EXPECT_EQ(got, correct / static_cast<double>(val.size()));
}

TEST(AccuracyFitness, TreeFastPathMatchesGenericTrain) {
  const auto d = synth_dataset(4, 1500, {0, 1, 2, 3}, 6, 0.1, 0.3);
  std::vector<std::size_t> rows(d.rows());
  std::iota(rows.begin(), rows.end(), 0);
  SurrogateConfig sc;
  const AccuracyFitness fast(d, rows, sc);
  for (const auto& s : {FeatureSubset({0, 1, 2}, 10), FeatureSubset({9, 3, 5, 0}, 10), FeatureSubset::all(10)}) {
    EXPECT_EQ(fast(s), accuracy_fitness(d, fast.train_rows(), fast.validation_rows(), sc.classifier, s));
  }
}

TEST(AccuracyFitness, InformativeBeatsNoiseOnTenSeeds) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto d = synth_dataset(seed, 2000, {0, 1, 2, 3, 4, 5, 6, 7, 8}, 12, 0.05, 0.5);
    std::vector<std::size_t> rows(d.rows());
    std::iota(rows.begin(), rows.end(), 0);
    const AccuracyFitness fit(d, rows, SurrogateConfig{});
    EXPECT_GT(fit(FeatureSubset({0, 1, 2, 3, 4, 5, 6, 7, 8}, 21)),
              fit(FeatureSubset({12, 13, 14, 15, 16, 17, 18, 19, 20}, 21)))
        << "seed " << seed;
  }
}

TEST(AccuracyFitness, SubsampleCapAndDisjointRows) {
  const auto d = synth_dataset(5, 3000, {0, 1}, 2, 0.0, 0.2);
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < d.rows(); r += 2) rows.push_back(r);
  SurrogateConfig sc;
  sc.max_train_rows = 400;
  const AccuracyFitness fit(d, rows, sc);
  EXPECT_EQ(fit.train_rows().size() + fit.validation_rows().size(), 400u);
  std::set<std::size_t> seen;
  for (auto r : fit.train_rows()) EXPECT_TRUE(seen.insert(r).second);
  for (auto r : fit.validation_rows()) EXPECT_TRUE(seen.insert(r).second);
  for (auto r : seen) EXPECT_EQ(r % 2, 0u);
}
