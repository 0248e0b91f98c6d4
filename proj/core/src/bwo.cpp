#include "diabml/bwo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "classifiers_internal.hpp"
#include "diabml/error.hpp"
#include "diabml/format.hpp"
#include "diabml/parallel.hpp"

namespace diabml {

namespace {

bool better(const Candidate& a, const Candidate& b) {
  if (a.fitness != b.fitness) return a.fitness > b.fitness;
  return a.id < b.id;
}

std::size_t ceil_count(double rate, std::size_t n) {
  return static_cast<std::size_t>(std::ceil(rate * static_cast<double>(n)));
}

}  // namespace

// --- FeatureSubset ---

FeatureSubset::FeatureSubset(std::vector<std::size_t> indices, std::size_t total_features)
    : indices_(std::move(indices)) {
  std::vector<bool> seen(total_features, false);
  for (std::size_t i : indices_) {
    if (i >= total_features) {
      throw DataError("feature index " + std::to_string(i) + " out of range for " +
                      std::to_string(total_features) + " features");
    }
    if (seen[i]) throw DataError("feature index " + std::to_string(i) + " repeated in subset");
    seen[i] = true;
  }
}

FeatureSubset FeatureSubset::all(std::size_t total_features) {
  std::vector<std::size_t> idx(total_features);
  std::iota(idx.begin(), idx.end(), 0);
  return FeatureSubset(std::move(idx), total_features);
}

bool FeatureSubset::contains(std::size_t feature) const {
  return std::find(indices_.begin(), indices_.end(), feature) != indices_.end();
}

std::vector<std::size_t> FeatureSubset::sorted() const {
  auto s = indices_;
  std::sort(s.begin(), s.end());
  return s;
}

std::string FeatureSubset::one_based(char sep) const {
  std::string out;
  for (std::size_t i : sorted()) {
    if (!out.empty()) out += sep;
    out += std::to_string(i + 1);
  }
  return out;
}

// --- config / trace ---

void BwoConfig::validate(std::size_t total_features) const {
  if (population_size == 0) throw ConfigError("BWO population_size must be >= 1");
  if (max_iterations == 0) throw ConfigError("BWO max_iterations must be >= 1");
  if (!(procreation_rate > 0.0 && procreation_rate <= 1.0)) throw ConfigError("BWO procreation_rate must lie in (0, 1]");
  if (!(cannibalism_rate >= 0.0 && cannibalism_rate < 1.0)) throw ConfigError("BWO cannibalism_rate must lie in [0, 1)");
  if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) throw ConfigError("BWO mutation_rate must lie in [0, 1]");
  if (subset_size == 0) throw ConfigError("BWO subset_size must be >= 1");
  if (offspring_pairs_per_mating == 0) throw ConfigError("BWO offspring_pairs_per_mating must be >= 1");
  if (subset_size > total_features) {
    throw ConfigError("BWO subset_size " + std::to_string(subset_size) + " exceeds the " +
                      std::to_string(total_features) + " available features");
  }
}

std::string BwoTrace::to_csv() const {
  std::ostringstream os;
  os << "iteration,best_fitness,best_subset\n";
  for (std::size_t i = 0; i < best_fitness.size(); ++i) {
    os << i << ',' << format_real(best_fitness[i]) << ',' << best_subset[i].one_based(';') << '\n';
  }
  return os.str();
}

// --- CandidateFactory ---

CandidateFactory::CandidateFactory(FitnessFunction fitness, unsigned threads)
    : fitness_(std::move(fitness)), threads_(threads) {}

std::vector<Candidate> CandidateFactory::make(std::vector<FeatureSubset> subsets) {
  // distinct uncached keys, in first-appearance order
  std::vector<std::vector<std::size_t>> keys(subsets.size());
  std::vector<std::size_t> pending;
  std::map<std::vector<std::size_t>, std::size_t> pending_slot;
  for (std::size_t i = 0; i < subsets.size(); ++i) {
    keys[i] = subsets[i].sorted();
    if (!cache_.contains(keys[i]) && !pending_slot.contains(keys[i])) {
      pending_slot.emplace(keys[i], pending.size());
      pending.push_back(i);
    }
  }

  std::vector<double> values(pending.size());
  parallel_for(pending.size(), threads_, [&](std::size_t p) {
    const std::size_t i = pending[p];
    double v = 0.0;
    try {
      v = fitness_(subsets[i]);
    } catch (const std::exception& e) {
      throw Error("fitness evaluation failed for candidate " + std::to_string(next_id_ + i) + " (features " +
                  subsets[i].one_based(';') + "): " + e.what());
    }
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error("fitness for candidate " + std::to_string(next_id_ + i) + " is outside [0, 1]");
    }
    values[p] = v;
  });
  for (std::size_t p = 0; p < pending.size(); ++p) cache_.emplace(keys[pending[p]], values[p]);
  evaluations_ += pending.size();

  std::vector<Candidate> out;
  out.reserve(subsets.size());
  for (std::size_t i = 0; i < subsets.size(); ++i) {
    out.push_back({std::move(subsets[i]), cache_.at(keys[i]), next_id_++});
  }
  assignments_ += out.size();
  return out;
}

// --- operators ---

std::vector<Candidate> init_population(const BwoConfig& config, std::size_t total_features, Rng& rng,
                                       CandidateFactory& factory) {
  config.validate(total_features);
  std::vector<FeatureSubset> subsets;
  subsets.reserve(config.population_size);
  for (std::size_t i = 0; i < config.population_size; ++i) {
    subsets.emplace_back(rng.sample_without_replacement(total_features, config.subset_size), total_features);
  }
  return factory.make(std::move(subsets));
}

std::vector<Candidate> select_p1(const std::vector<Candidate>& population, double rate) {
  auto sorted = population;
  std::sort(sorted.begin(), sorted.end(), better);
  sorted.resize(std::min(sorted.size(), ceil_count(rate, population.size())));
  return sorted;
}

FeatureSubset repair(std::span<const std::size_t> raw, std::size_t n, std::size_t total_features, Rng& rng) {
  if (n > total_features) {
    throw ConfigError("repair: subset size " + std::to_string(n) + " exceeds " + std::to_string(total_features) +
                      " features");
  }
  std::vector<bool> present(total_features, false);
  std::vector<std::size_t> out;
  out.reserve(n);
  for (std::size_t i : raw) {
    if (i >= total_features) throw DataError("repair: feature index " + std::to_string(i) + " out of range");
    if (present[i] || out.size() == n) continue;
    present[i] = true;
    out.push_back(i);
  }
  if (out.size() < n) {
    std::vector<std::size_t> absent;
    for (std::size_t i = 0; i < total_features; ++i) {
      if (!present[i]) absent.push_back(i);
    }
    for (std::size_t j : rng.sample_without_replacement(absent.size(), n - out.size())) {
      out.push_back(absent[j]);
    }
  }
  return FeatureSubset(std::move(out), total_features);
}

std::pair<FeatureSubset, FeatureSubset> crossover(const FeatureSubset& a, const FeatureSubset& b,
                                                  const std::vector<bool>& mask, std::size_t total_features,
                                                  Rng& rng) {
  const auto& pa = a.indices();
  const auto& pb = b.indices();
  if (pa.size() != pb.size()) throw DataError("crossover: parents differ in subset size");
  if (mask.size() != pa.size()) throw DataError("crossover: mask length differs from subset size");
  const std::size_t n = pa.size();
  std::vector<std::size_t> c1(n), c2(n);
  for (std::size_t i = 0; i < n; ++i) {
    c1[i] = mask[i] ? pa[i] : pb[i];
    c2[i] = mask[i] ? pb[i] : pa[i];
  }
  auto first = repair(c1, n, total_features, rng);
  auto second = repair(c2, n, total_features, rng);
  return {std::move(first), std::move(second)};
}

std::vector<FeatureSubset> procreate_pair(const Candidate& a, const Candidate& b, std::size_t pairs,
                                          std::size_t total_features, Rng& rng) {
  std::vector<FeatureSubset> children;
  children.reserve(2 * pairs);
  std::vector<bool> mask(a.subset.size());
  for (std::size_t p = 0; p < pairs; ++p) {
    for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = rng.bernoulli(0.5);
    auto [c1, c2] = crossover(a.subset, b.subset, mask, total_features, rng);
    children.push_back(std::move(c1));
    children.push_back(std::move(c2));
  }
  return children;
}

std::vector<Candidate> cannibalize(std::vector<Candidate> candidates, double rate) {
  std::sort(candidates.begin(), candidates.end(), better);
  const auto removed = static_cast<std::size_t>(std::floor(rate * static_cast<double>(candidates.size())));
  candidates.resize(candidates.size() - std::min(removed, candidates.size()));
  return candidates;
}

FeatureSubset mutate(const Candidate& candidate, std::size_t total_features, Rng& rng) {
  const auto& idx = candidate.subset.indices();
  const std::size_t n = idx.size();
  if (n >= total_features) return candidate.subset;
  std::vector<bool> present(total_features, false);
  for (std::size_t i : idx) present[i] = true;
  std::vector<std::size_t> absent;
  absent.reserve(total_features - n);
  for (std::size_t i = 0; i < total_features; ++i) {
    if (!present[i]) absent.push_back(i);
  }
  auto out = idx;
  const std::size_t pos = rng.index(n);
  out[pos] = absent[rng.index(absent.size())];
  return FeatureSubset(std::move(out), total_features);
}

// --- optimizer loop ---

BwoResult bwo_optimize(const FitnessFunction& fitness, const BwoConfig& config, std::size_t total_features) {
  config.validate(total_features);
  Rng rng(config.seed);
  CandidateFactory factory(fitness, config.threads);
  BwoResult result;
  auto& trace = result.trace;

  auto in_iteration = [](std::size_t it, auto&& body) {
    try {
      return body();
    } catch (const Error& e) {
      throw Error("BWO iteration " + std::to_string(it) + ": " + e.what());
    }
  };

  auto population = in_iteration(0, [&] { return init_population(config, total_features, rng, factory); });
  std::sort(population.begin(), population.end(), better);
  trace.best_fitness.push_back(population.front().fitness);
  trace.best_subset.push_back(population.front().subset);

  std::size_t stale = 0;
  for (std::size_t it = 1; it <= config.max_iterations; ++it) {
    const auto p1 = select_p1(population, config.procreation_rate);

    // procreation: disjoint random pairs from p1
    auto mates = p1;
    rng.shuffle(mates);
    std::vector<FeatureSubset> offspring;
    for (std::size_t i = 0; i + 1 < mates.size(); i += 2) {
      auto kids = procreate_pair(mates[i], mates[i + 1], config.offspring_pairs_per_mating, total_features, rng);
      std::move(kids.begin(), kids.end(), std::back_inserter(offspring));
    }
    auto p2 = cannibalize(in_iteration(it, [&] { return factory.make(std::move(offspring)); }),
                          config.cannibalism_rate);

    // mutation of a random share of p1
    const std::size_t n_mutants = std::min(p1.size(), ceil_count(config.mutation_rate, p1.size()));
    std::vector<FeatureSubset> mutants;
    for (std::size_t j : rng.sample_without_replacement(p1.size(), n_mutants)) {
      mutants.push_back(mutate(p1[j], total_features, rng));
    }
    auto p3 = in_iteration(it, [&] { return factory.make(std::move(mutants)); });

    population.insert(population.end(), std::make_move_iterator(p2.begin()), std::make_move_iterator(p2.end()));
    population.insert(population.end(), std::make_move_iterator(p3.begin()), std::make_move_iterator(p3.end()));
    std::sort(population.begin(), population.end(), better);
    population.resize(std::min(population.size(), config.population_size));

    const double previous = trace.best_fitness.back();
    trace.best_fitness.push_back(population.front().fitness);
    trace.best_subset.push_back(population.front().subset);

    stale = population.front().fitness > previous + 1e-9 ? 0 : stale + 1;
    if (config.patience > 0 && stale >= config.patience) break;
  }

  result.best = population.front();
  trace.fitness_evaluations = factory.assignments();
  trace.distinct_evaluations = factory.evaluations();
  return result;
}

// --- classifier-accuracy fitness ---

ClassifierConfig SurrogateConfig::default_surrogate_classifier() {
  ClassifierConfig c;
  c.kind = ClassifierKind::decision_tree;
  c.tree.max_depth = 8;
  return c;
}

namespace {

std::uint64_t subset_seed(std::uint64_t seed, const FeatureSubset& subset) {
  for (std::size_t i : subset.sorted()) seed = derive_seed(seed, i);
  return seed;
}

double validation_accuracy(const TrainedModel& model, const Dataset& data,
                           std::span<const std::size_t> validation_rows, std::span<const std::size_t> cols) {
  const Matrix x_val = data.features.take_rows(validation_rows).take_cols(cols);
  const Labels predicted = predict_labels(model, x_val);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < validation_rows.size(); ++i) {
    correct += predicted[i] == data.labels[validation_rows[i]] ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(validation_rows.size());
}

}  // namespace

double accuracy_fitness(const Dataset& data, std::span<const std::size_t> train_rows,
                        std::span<const std::size_t> validation_rows, const ClassifierConfig& config,
                        const FeatureSubset& subset) {
  if (validation_rows.empty()) throw DataError("accuracy_fitness: no validation rows");
  const auto cols = subset.indices();
  const Matrix x_train = data.features.take_rows(train_rows).take_cols(cols);
  Labels y_train;
  y_train.reserve(train_rows.size());
  for (std::size_t r : train_rows) y_train.push_back(data.labels[r]);

  ClassifierConfig cfg = config;
  cfg.seed = subset_seed(config.seed, subset);
  const TrainedModel model = train(cfg, x_train, y_train);
  return validation_accuracy(model, data, validation_rows, cols);
}

double AccuracyFitness::operator()(const FeatureSubset& subset) const {
  if (column_orders_.empty()) return accuracy_fitness(pool_, pool_train_, pool_validation_, classifier_, subset);
  // tree surrogate: same model as train(), without re-sorting every column
  const auto cols = subset.indices();
  const Matrix x_train = pool_.features.take_rows(pool_train_).take_cols(cols);
  std::vector<const std::vector<std::size_t>*> orders;
  for (std::size_t c : cols) orders.push_back(&column_orders_[c]);
  const std::span<const int> y_train(pool_.labels.data(), pool_train_.size());
  TreeModel tree = detail::build_tree_presorted(x_train, y_train, orders, classifier_.tree,
                                                subset_seed(classifier_.seed, subset));
  const TrainedModel model(ClassifierKind::decision_tree, cols.size(), std::move(tree));
  return validation_accuracy(model, pool_, pool_validation_, cols);
}

AccuracyFitness::AccuracyFitness(const Dataset& data, std::span<const std::size_t> rows,
                                 const SurrogateConfig& config)
    : classifier_(config.classifier) {
  Labels pool_labels;
  pool_labels.reserve(rows.size());
  for (std::size_t r : rows) pool_labels.push_back(data.labels[r]);

  // stratified sub-sample, then stratified holdout inside it
  RowIndices sample(rows.begin(), rows.end());
  if (rows.size() > config.max_train_rows) {
    const double keep = static_cast<double>(config.max_train_rows) / static_cast<double>(rows.size());
    const auto picked = stratified_split(pool_labels, keep, derive_seed(config.seed, 1)).test_rows;
    sample.clear();
    for (std::size_t i : picked) sample.push_back(rows[i]);
  }
  Labels sample_labels;
  for (std::size_t r : sample) sample_labels.push_back(data.labels[r]);
  const auto holdout = stratified_split(sample_labels, config.validation_fraction, derive_seed(config.seed, 2));
  for (std::size_t i : holdout.train_rows) train_rows_.push_back(sample[i]);
  for (std::size_t i : holdout.test_rows) validation_rows_.push_back(sample[i]);

  RowIndices pooled = train_rows_;
  pooled.insert(pooled.end(), validation_rows_.begin(), validation_rows_.end());
  pool_ = data.take_rows(pooled);
  pool_train_.resize(train_rows_.size());
  std::iota(pool_train_.begin(), pool_train_.end(), 0);
  pool_validation_.resize(validation_rows_.size());
  std::iota(pool_validation_.begin(), pool_validation_.end(), train_rows_.size());

  if (classifier_.kind == ClassifierKind::decision_tree) {
    classifier_.validate();
    pool_.validate();
    for (std::size_t c = 0; c < pool_.cols(); ++c) {
      column_orders_.push_back(detail::sorted_rows(pool_.features, pool_train_, c));
    }
  }
}


}  // namespace diabml
