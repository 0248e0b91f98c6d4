#include "diabml/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>

#include "diabml/error.hpp"
#include "diabml/rng.hpp"

namespace diabml {

namespace {

// seed streams derived from the master seed
enum SeedStream : std::uint64_t { kSmoteStream = 101, kBwoStream = 102, kSurrogateStream = 103, kClassifierStream = 104 };

template <typename F>
auto run_stage(RunReport& report, const std::string& stage, F&& body) {
  const auto start = std::chrono::steady_clock::now();
  auto record = [&] {
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    report.timings.push_back({stage, elapsed.count()});
  };
  try {
    if constexpr (std::is_void_v<decltype(body())>) {
      body();
      record();
    } else {
      auto out = body();
      record();
      return out;
    }
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

struct Prepared {
  Dataset cleaned;
  CleanReport clean;
  SplitIndices split;
  std::vector<StageTiming> timings;
};

Prepared prepare(const PipelineConfig& config, const Dataset& raw) {
  RunReport scratch;
  Prepared p;
  auto cleaned = run_stage(scratch, "clean", [&] {
    raw.validate();
    return clean(raw);
  });
  p.cleaned = std::move(cleaned.data);
  p.clean = cleaned.report;
  p.split = run_stage(scratch, "split",
                      [&] { return stratified_split(p.cleaned, config.test_fraction, config.seed); });
  p.timings = std::move(scratch.timings);
  return p;
}

Dataset load_raw(const PipelineConfig& config, std::vector<StageTiming>& timings) {
  RunReport scratch;
  auto raw = run_stage(scratch, "load", [&] { return load_csv(config.data_path, config.label_column); });
  timings = std::move(scratch.timings);
  return raw;
}

RunReport run_prepared(const PipelineConfig& config, const Prepared& prep, bool feature_selection,
                       bool imbalance_handling, std::string variant, bool train_classifiers = true) {
  config.validate();
  RunReport report;
  report.variant = std::move(variant);
  report.feature_selection = feature_selection;
  report.imbalance_handling = imbalance_handling;
  report.feature_names = prep.cleaned.feature_names;
  report.label_column = config.label_column;
  report.clean = prep.clean;
  report.timings = prep.timings;

  const auto& data = prep.cleaned;
  const auto& split = prep.split;
  auto& prov = report.provenance;
  prov.train_rows = split.train_rows;
  prov.test_rows = split.test_rows;

  // normalization
  RowIndices all_rows(data.rows());
  std::iota(all_rows.begin(), all_rows.end(), 0);
  prov.scaler_rows = config.normalization == NormalizationOrder::fit_on_train ? split.train_rows : all_rows;
  const Dataset normalized = run_stage(report, "normalize", [&] {
    report.scaler = fit_minmax(data, prov.scaler_rows);
    return apply_minmax(data, report.scaler);
  });

  Dataset train = normalized.take_rows(split.train_rows);
  const Dataset test = normalized.take_rows(split.test_rows);
  report.train_before_smote = count_classes(train.labels);
  report.test_counts = count_classes(test.labels);

  // imbalance handling on the training rows
  std::size_t original_train_rows = train.rows();
  if (imbalance_handling) {
    run_stage(report, "smote", [&] {
      SmoteConfig smote = config.smote;
      smote.seed = derive_seed(config.seed, kSmoteStream);
      smote.threads = config.threads;
      auto balanced = smote_oversample(train.features, train.labels, smote);
      train.features = std::move(balanced.features);
      train.labels = std::move(balanced.labels);
    });
    prov.smote_rows = split.train_rows;
  }
  report.train_after_smote = count_classes(train.labels);

  // feature selection on the (possibly augmented) training rows
  if (feature_selection) {
    run_stage(report, "select", [&] {
      SurrogateConfig surrogate = config.surrogate;
      surrogate.seed = derive_seed(config.seed, kSurrogateStream);
      RowIndices pool(train.rows());
      std::iota(pool.begin(), pool.end(), 0);
      const AccuracyFitness fitness(train, pool, surrogate);
      for (std::size_t r : fitness.train_rows()) {
        if (r < original_train_rows) {
          prov.selection_rows.push_back(split.train_rows[r]);
        } else {
          ++prov.selection_synthetic_rows;
        }
      }
      for (std::size_t r : fitness.validation_rows()) {
        if (r < original_train_rows) {
          prov.selection_rows.push_back(split.train_rows[r]);
        } else {
          ++prov.selection_synthetic_rows;
        }
      }
      std::sort(prov.selection_rows.begin(), prov.selection_rows.end());

      BwoConfig bwo = config.bwo;
      bwo.seed = derive_seed(config.seed, kBwoStream);
      auto result = bwo_optimize([&fitness](const FeatureSubset& s) { return fitness(s); }, bwo, train.cols());
      report.selected = result.best.subset;
      report.selection_fitness = result.best.fitness;
      report.trace = std::move(result.trace);
    });
  } else {
    report.selected = FeatureSubset::all(train.cols());
  }

  if (!train_classifiers) return report;

  const auto cols = report.selected.indices();
  const Matrix x_train = train.features.take_cols(cols);
  const Matrix x_test = test.features.take_cols(cols);
  prov.classifier_rows = split.train_rows;

  for (ClassifierKind kind : config.classifiers) {
    const std::string name(to_string(kind));
    ClassifierConfig cc = config.classifier;
    cc.kind = kind;
    cc.seed = derive_seed(config.seed, kClassifierStream + static_cast<std::uint64_t>(kind));
    cc.knn.threads = config.threads;
    cc.forest.threads = config.threads;

    ClassifierResult res;
    res.kind = kind;
    auto model = run_stage(report, "train:" + name, [&] { return diabml::train(cc, x_train, train.labels); });
    run_stage(report, "evaluate:" + name, [&] {
      const auto scores = predict_scores(model, x_test);
      const auto labels = threshold_scores(scores);
      res.confusion = confusion(test.labels, labels);
      res.metrics = compute_metrics(res.confusion);
      res.roc = roc_curve(test.labels, scores);
      res.auc = auc(res.roc);
    });
    res.model = std::move(model);
    report.results.push_back(std::move(res));
  }
  return report;
}

}  // namespace

const ClassifierResult& RunReport::result(ClassifierKind kind) const {
  for (const auto& r : results) {
    if (r.kind == kind) return r;
  }
  throw ConfigError("report has no result for classifier '" + std::string(to_string(kind)) + "'");
}

const MetricsReport& ComparisonTable::cell(ClassifierKind kind, std::size_t variant) const {
  return variants.at(variant).result(kind).metrics;
}

RunReport run_experiment(const PipelineConfig& config, const Dataset& raw) {
  config.validate();
  const Prepared prep = prepare(config, raw);
  return run_prepared(config, prep, config.feature_selection, config.imbalance_handling, "run");
}

RunReport run_experiment(const PipelineConfig& config) {
  config.validate();
  std::vector<StageTiming> load_timing;
  const Dataset raw = load_raw(config, load_timing);
  RunReport report = run_experiment(config, raw);
  report.timings.insert(report.timings.begin(), load_timing.begin(), load_timing.end());
  return report;
}

RunReport select_features(const PipelineConfig& config, const Dataset& raw) {
  config.validate();
  const Prepared prep = prepare(config, raw);
  return run_prepared(config, prep, true, config.imbalance_handling, "select", false);
}

RunReport select_features(const PipelineConfig& config) {
  config.validate();
  std::vector<StageTiming> load_timing;
  const Dataset raw = load_raw(config, load_timing);
  RunReport report = select_features(config, raw);
  report.timings.insert(report.timings.begin(), load_timing.begin(), load_timing.end());
  return report;
}

ComparisonTable compare_variants(const PipelineConfig& config, const Dataset& raw) {
  config.validate();
  const Prepared prep = prepare(config, raw);
  ComparisonTable table;
  table.classifiers = config.classifiers;
  for (std::size_t v = 0; v < kVariantNames.size(); ++v) {
    const bool fs = v >= 2;
    const bool smote = v % 2 == 1;
    table.variants[v] = run_prepared(config, prep, fs, smote, std::string(kVariantNames[v]));
  }
  return table;
}

ComparisonTable compare_variants(const PipelineConfig& config) {
  config.validate();
  std::vector<StageTiming> load_timing;
  const Dataset raw = load_raw(config, load_timing);
  ComparisonTable table = compare_variants(config, raw);
  auto& first = table.variants[0].timings;
  first.insert(first.begin(), load_timing.begin(), load_timing.end());
  return table;
}

}  // namespace diabml
