#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "diabml/classifiers.hpp"
#include "diabml/dataio.hpp"
#include "diabml/rng.hpp"

namespace diabml {

/// Ordered list of distinct zero-based feature indices. Position matters for
/// crossover; identity for caching is the sorted index set.
class FeatureSubset {
 public:
  FeatureSubset() = default;
  /// Throws DataError on duplicates or indices >= total_features.
  FeatureSubset(std::vector<std::size_t> indices, std::size_t total_features);

  static FeatureSubset all(std::size_t total_features);

  const std::vector<std::size_t>& indices() const noexcept { return indices_; }
  std::size_t size() const noexcept { return indices_.size(); }
  bool contains(std::size_t feature) const;
  std::vector<std::size_t> sorted() const;

  /// Sorted one-based indices joined by `sep`, e.g. "1;4;9".
  std::string one_based(char sep = ';') const;

  friend bool operator==(const FeatureSubset&, const FeatureSubset&) = default;

 private:
  std::vector<std::size_t> indices_;
};

/// A population member. Fitness is assigned once, at creation.
struct Candidate {
  FeatureSubset subset;
  double fitness = 0.0;
  std::uint64_t id = 0;
};

struct BwoConfig {
  std::size_t population_size = 40;
  std::size_t max_iterations = 50;
  double procreation_rate = 0.6;   // fraction of the population entering p1
  double cannibalism_rate = 0.44;  // fraction of offspring discarded
  double mutation_rate = 0.4;      // fraction of p1 mutated
  std::size_t subset_size = 9;
  std::size_t offspring_pairs_per_mating = 1;
  std::uint64_t seed = 42;
  /// Stop after this many iterations without a best-fitness gain > 1e-9; 0 disables.
  std::size_t patience = 0;
  /// Workers for fitness evaluation within one generation; 0 = hardware concurrency.
  unsigned threads = 1;

  void validate(std::size_t total_features) const;
};

struct BwoTrace {
  /// Entry 0 is the initial population; entry i the population after iteration i.
  std::vector<double> best_fitness;
  std::vector<FeatureSubset> best_subset;
  /// Fitness assignments: initial population plus every offspring and mutant.
  std::size_t fitness_evaluations = 0;
  /// Calls that reached the fitness function (cache misses).
  std::size_t distinct_evaluations = 0;

  /// "iteration,best_fitness,best_subset" with one-based, semicolon-joined subsets.
  std::string to_csv() const;
};

struct BwoResult {
  Candidate best;
  BwoTrace trace;
};

/// Maps a subset to a score in [0, 1], higher is better. Must be deterministic.
using FitnessFunction = std::function<double(const FeatureSubset&)>;

/// Assigns creation ids and cached fitness values to new candidates. Ids are
/// assigned in input order, so results do not depend on evaluation threads.
class CandidateFactory {
 public:
  CandidateFactory(FitnessFunction fitness, unsigned threads = 1);

  std::vector<Candidate> make(std::vector<FeatureSubset> subsets);

  std::size_t assignments() const noexcept { return assignments_; }
  std::size_t evaluations() const noexcept { return evaluations_; }

 private:
  FitnessFunction fitness_;
  unsigned threads_;
  std::map<std::vector<std::size_t>, double> cache_;
  std::uint64_t next_id_ = 0;
  std::size_t assignments_ = 0;
  std::size_t evaluations_ = 0;
};

std::vector<Candidate> init_population(const BwoConfig& config, std::size_t total_features, Rng& rng,
                                       CandidateFactory& factory);

/// Best ceil(rate * size) candidates by fitness (ties: lower id), best first.
std::vector<Candidate> select_p1(const std::vector<Candidate>& population, double rate);

/// Mask crossover: child one takes a's index where mask[i] is set, else b's;
/// child two takes the complement. Both children are repaired.
std::pair<FeatureSubset, FeatureSubset> crossover(const FeatureSubset& a, const FeatureSubset& b,
                                                  const std::vector<bool>& mask, std::size_t total_features,
                                                  Rng& rng);

/// 2 * pairs children, each pair from a fresh uniform mask.
std::vector<FeatureSubset> procreate_pair(const Candidate& a, const Candidate& b, std::size_t pairs,
                                          std::size_t total_features, Rng& rng);

/// Removes duplicate indices (first kept) and fills up to n with distinct
/// indices drawn uniformly from those absent.
FeatureSubset repair(std::span<const std::size_t> raw, std::size_t n, std::size_t total_features, Rng& rng);

/// Sorts best-first and drops the worst floor(rate * count).
std::vector<Candidate> cannibalize(std::vector<Candidate> candidates, double rate);

/// Replaces one uniformly chosen position with a uniformly chosen absent index.
/// Returns the subset unchanged when it already holds every feature.
FeatureSubset mutate(const Candidate& candidate, std::size_t total_features, Rng& rng);

BwoResult bwo_optimize(const FitnessFunction& fitness, const BwoConfig& config, std::size_t total_features);

/// Fitness-surrogate recipe for wrapper selection.
struct SurrogateConfig {
  ClassifierConfig classifier = default_surrogate_classifier();
  std::size_t max_train_rows = 20000;
  double validation_fraction = 0.25;
  std::uint64_t seed = 7;

  static ClassifierConfig default_surrogate_classifier();
};

/// Accuracy on `validation_rows` of a classifier trained on `train_rows`,
/// both restricted to the subset's columns. The classifier seed is derived
/// from config.seed and the subset.
double accuracy_fitness(const Dataset& data, std::span<const std::size_t> train_rows,
                        std::span<const std::size_t> validation_rows, const ClassifierConfig& config,
                        const FeatureSubset& subset);

/// Wrapper fitness over a fixed row pool: draws a stratified sub-sample of at
/// most max_train_rows rows and holds out validation_fraction of it.
class AccuracyFitness {
 public:
  AccuracyFitness(const Dataset& data, std::span<const std::size_t> rows, const SurrogateConfig& config);

  double operator()(const FeatureSubset& subset) const;

  /// Row indices of `data` used for fitting and scoring.
  const RowIndices& train_rows() const noexcept { return train_rows_; }
  const RowIndices& validation_rows() const noexcept { return validation_rows_; }

 private:
  ClassifierConfig classifier_;
  RowIndices train_rows_;
  RowIndices validation_rows_;
  // selected rows copied out, training rows first, then validation rows
  Dataset pool_;
  RowIndices pool_train_;
  RowIndices pool_validation_;
  // per-column sorted training rows, reused by every tree surrogate evaluation
  std::vector<std::vector<std::size_t>> column_orders_;
};

}  // namespace diabml
