#include <benchmark/benchmark.h>

#include <numeric>

#include "diabml/balance.hpp"
#include "diabml/bwo.hpp"
#include "diabml/classifiers.hpp"
#include "diabml/metrics.hpp"
#include "diabml/pipeline.hpp"

using namespace diabml;

namespace {

const std::vector<std::size_t> kPlanted{0, 1, 2, 3, 4, 5, 6, 7, 8};

Dataset data_of(std::size_t rows) { return synth_dataset(1, rows, kPlanted, 12, 0.05, 0.14); }

void BM_Smote(benchmark::State& state) {
  const auto d = data_of(static_cast<std::size_t>(state.range(0)));
  SmoteConfig cfg;
  cfg.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(smote_oversample(d.features, d.labels, cfg));
}
BENCHMARK(BM_Smote)->Arg(2000)->Arg(8000)->Unit(benchmark::kMillisecond);

void BM_TreeBuild(benchmark::State& state) {
  const auto d = data_of(static_cast<std::size_t>(state.range(0)));
  TreeSettings s;
  s.max_depth = 8;
  for (auto _ : state) benchmark::DoNotOptimize(build_tree(d.features, d.labels, {}, s, 1));
}
BENCHMARK(BM_TreeBuild)->Arg(4000)->Arg(20000)->Unit(benchmark::kMillisecond);

// one BWO fitness evaluation with the default tree surrogate
void BM_SurrogateFitness(benchmark::State& state) {
  const auto d = data_of(static_cast<std::size_t>(state.range(0)));
  RowIndices rows(d.rows());
  std::iota(rows.begin(), rows.end(), 0);
  const AccuracyFitness fitness(d, rows, SurrogateConfig{});
  std::size_t shift = 0;
  for (auto _ : state) {
    std::vector<std::size_t> subset;
    for (std::size_t i = 0; i < 9; ++i) subset.push_back((i + shift) % 21);
    ++shift;
    benchmark::DoNotOptimize(fitness(FeatureSubset(subset, 21)));
  }
}
BENCHMARK(BM_SurrogateFitness)->Arg(4000)->Arg(20000)->Unit(benchmark::kMillisecond);

void BM_RocAuc(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<int> truth(n);
  std::vector<double> scores(n);
  for (std::size_t i = 0; i < n; ++i) {
    truth[i] = static_cast<int>(i % 7 == 0);
    scores[i] = static_cast<double>((i * 2654435761u) % 1000) / 1000.0;
  }
  for (auto _ : state) benchmark::DoNotOptimize(auc(roc_curve(truth, scores)));
}
BENCHMARK(BM_RocAuc)->Arg(50000);

}  // namespace
BENCHMARK_MAIN();
