// diabml command-line tool.
//
//   diabml validate --data FILE            load + clean, print the clean report
//   diabml run      --data FILE [...]      one experiment, report files under --output
//   diabml compare  --data FILE [...]      the four ablation variants
//   diabml select   --data FILE [...]      BWO only, prints the subset and trace
//   diabml predict  --model FILE (--row V,V,... | --input FILE)
//   diabml synth    --out FILE [...]       write a synthetic CSV
//
// Pipeline settings come from --config FILE ("key: value" lines) and from one
// --<key> flag per setting; flags win.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "diabml/error.hpp"
#include "diabml/format.hpp"
#include "diabml/pipeline.hpp"

namespace {

using namespace diabml;

struct SettingFlags {
  std::string config_file;
  std::map<std::string, std::string> values;
};

void add_setting_flags(CLI::App* app, SettingFlags& flags) {
  app->add_option("--config", flags.config_file, "settings file with 'key: value' lines")->check(CLI::ExistingFile);
  for (const auto& [key, help] : setting_keys()) {
    app->add_option_function<std::string>(
        "--" + key, [&flags, key = key](const std::string& v) { flags.values[key] = v; }, help);
  }
}

PipelineConfig build_config(const SettingFlags& flags) {
  PipelineConfig config;
  try {
    if (!flags.config_file.empty()) {
      for (const auto& [k, v] : read_settings_file(flags.config_file)) apply_setting(config, k, v);
    }
    for (const auto& [k, v] : flags.values) apply_setting(config, k, v);
    config.validate();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError("config", e.what());
  }
  if (config.data_path.empty()) throw StageError("config", "no input data; pass --data or set 'data' in --config");
  return config;
}

void print_timings(const std::vector<StageTiming>& timings, const std::string& prefix = "") {
  for (const auto& t : timings) {
    std::fprintf(stderr, "time %s%s %.3fs\n", prefix.c_str(), t.stage.c_str(), t.seconds);
  }
}

void print_results(const RunReport& report) {
  std::cout << "classifier,accuracy,sensitivity,specificity,precision,f1,mcc,auc\n";
  for (const auto& r : report.results) {
    const auto& m = r.metrics;
    std::cout << to_string(r.kind) << ',' << format_real(m.accuracy) << ',' << format_real(m.sensitivity) << ','
              << format_real(m.specificity) << ',' << format_real(m.precision) << ',' << format_real(m.f1) << ','
              << format_real(m.mcc) << ',' << format_real(r.auc) << '\n';
  }
}

void print_selection(const RunReport& report) {
  std::cout << "selected:";
  for (std::size_t i : report.selected.sorted()) std::cout << ' ' << i + 1 << ':' << report.feature_names[i];
  std::cout << '\n';
}

int cmd_validate(const PipelineConfig& config) {
  Dataset raw;
  try {
    raw = load_csv(config.data_path, config.label_column);
  } catch (const std::exception& e) {
    throw StageError("load", e.what());
  }
  CleanResult cleaned;
  try {
    cleaned = clean(raw);
  } catch (const std::exception& e) {
    throw StageError("clean", e.what());
  }
  const auto counts = count_classes(cleaned.data.labels);
  std::cout << cleaned.report.to_text();
  std::cout << "features: " << cleaned.data.cols() << '\n';
  std::cout << "negatives: " << counts.negatives << '\n';
  std::cout << "positives: " << counts.positives << '\n';
  return 0;
}

int cmd_run(const PipelineConfig& config) {
  const RunReport report = run_experiment(config);
  print_timings(report.timings);
  try {
    emit_report(report, config.output_dir, config.write_models);
  } catch (const std::exception& e) {
    throw StageError("report", e.what());
  }
  print_selection(report);
  print_results(report);
  return 0;
}

int cmd_compare(const PipelineConfig& config, bool write_models) {
  const ComparisonTable table = compare_variants(config);
  for (std::size_t v = 0; v < kVariantNames.size(); ++v) {
    print_timings(table.variants[v].timings, std::string(kVariantNames[v]) + ":");
  }
  try {
    emit_report(table, config.output_dir, write_models);
  } catch (const std::exception& e) {
    throw StageError("report", e.what());
  }
  std::cout << comparison_csv(table);
  return 0;
}

int cmd_select(const PipelineConfig& config) {
  const RunReport report = select_features(config);
  print_timings(report.timings);
  print_selection(report);
  std::cout << "fitness: " << format_real(report.selection_fitness) << '\n';
  if (report.trace) std::cout << report.trace->to_csv();
  return 0;
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::vector<double> parse_row(const std::vector<std::string>& cells, const std::string& where) {
  std::vector<double> row;
  for (const auto& c : cells) {
    try {
      row.push_back(parse_real_strict(c));
    } catch (const std::exception& e) {
      throw DataError(where + ": " + e.what());
    }
  }
  return row;
}

int cmd_predict(const std::string& model_path, const std::string& row_text, const std::string& input_path) {
  const ModelBundle bundle = [&] {
    try {
      return load_bundle(model_path);
    } catch (const std::exception& e) {
      throw StageError("load", e.what());
    }
  }();
  const std::size_t width = bundle.feature_names.size();

  std::vector<std::vector<double>> rows;
  try {
    if (!row_text.empty()) {
      rows.push_back(parse_row(split_commas(row_text), "--row"));
      if (rows.back().size() != width) {
        throw DataError("--row has " + std::to_string(rows.back().size()) + " values, model expects " +
                        std::to_string(width));
      }
    } else {
      // columns are matched by header name; extra columns (e.g. the label) are ignored
      std::ifstream in(input_path);
      if (!in) throw IoError("cannot open '" + input_path + "'");
      std::string line;
      if (!std::getline(in, line)) throw DataError(input_path + ": empty file");
      if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const auto header = split_commas(line);
      std::vector<std::size_t> column(width);
      for (std::size_t j = 0; j < width; ++j) {
        std::size_t c = 0;
        while (c < header.size() && header[c] != bundle.feature_names[j]) ++c;
        if (c == header.size()) throw DataError(input_path + ": missing column '" + bundle.feature_names[j] + "'");
        column[j] = c;
      }
      std::size_t line_no = 1;
      while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split_commas(line);
        if (cells.size() != header.size()) {
          throw DataError(input_path + ":" + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                          " cells");
        }
        std::vector<std::string> picked;
        for (std::size_t c : column) picked.push_back(cells[c]);
        rows.push_back(parse_row(picked, input_path + ":" + std::to_string(line_no)));
      }
    }
  } catch (const std::exception& e) {
    throw StageError("input", e.what());
  }

  std::cout << "label,score\n";
  for (const auto& row : rows) {
    Prediction p;
    try {
      p = predict_row(bundle, row);
    } catch (const std::exception& e) {
      throw StageError("predict", e.what());
    }
    std::cout << p.label << ',' << format_real(p.score) << '\n';
  }
  return 0;
}

struct SynthOptions {
  std::string out;
  std::uint64_t seed = 42;
  std::size_t rows = 20000;
  std::string informative = "1;2;3;4;5;6;7;8;9";
  std::size_t noise = 12;
  double flip = 0.05;
  double imbalance = 0.14;
  std::string label_column = kDefaultLabelColumn;
};

int cmd_synth(const SynthOptions& o) {
  Dataset data;
  try {
    std::vector<std::size_t> informative;
    std::stringstream ss(o.informative);
    std::string cell;
    while (std::getline(ss, cell, ';')) {
      if (cell.empty()) continue;
      const double v = parse_real_strict(cell);
      if (v < 1 || v != static_cast<double>(static_cast<std::size_t>(v))) {
        throw ConfigError("--informative expects one-based indices, got '" + cell + "'");
      }
      informative.push_back(static_cast<std::size_t>(v) - 1);
    }
    data = synth_dataset(o.seed, o.rows, informative, o.noise, o.flip, o.imbalance);
  } catch (const std::exception& e) {
    throw StageError("synth", e.what());
  }
  try {
    save_csv(data, o.out, o.label_column);
  } catch (const std::exception& e) {
    throw StageError("write", e.what());
  }
  const auto counts = count_classes(data.labels);
  std::cout << "rows: " << data.rows() << "\nfeatures: " << data.cols() << "\npositives: " << counts.positives
            << "\nnegatives: " << counts.negatives << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"diabml: BWO feature selection, SMOTE and eight classifiers for binary tabular data"};
  app.require_subcommand(1);

  SettingFlags validate_flags, run_flags, compare_flags, select_flags;
  auto* validate = app.add_subcommand("validate", "load and clean the data, print the clean report");
  add_setting_flags(validate, validate_flags);
  auto* run = app.add_subcommand("run", "run one experiment and write its report");
  add_setting_flags(run, run_flags);
  auto* compare = app.add_subcommand("compare", "run the baseline/smote/fs/smote_fs variants");
  add_setting_flags(compare, compare_flags);
  bool compare_models = false;
  compare->add_flag("--models", compare_models, "also write model bundles per variant");
  auto* select = app.add_subcommand("select", "BWO feature selection only");
  add_setting_flags(select, select_flags);

  std::string model_path, row_text, input_path;
  auto* predict = app.add_subcommand("predict", "score rows with a saved model bundle");
  predict->add_option("--model", model_path, "model bundle written by run")->required()->check(CLI::ExistingFile);
  auto* row_opt = predict->add_option("--row", row_text, "comma-separated raw feature values in training order");
  auto* input_opt = predict->add_option("--input", input_path, "CSV whose header names the model's features");
  row_opt->excludes(input_opt);
  predict->callback([&] {
    if (row_text.empty() && input_path.empty()) throw CLI::RequiredError("--row or --input");
  });

  SynthOptions synth_opts;
  auto* synth = app.add_subcommand("synth", "write a synthetic dataset with planted informative features");
  synth->add_option("--out", synth_opts.out, "output CSV path")->required();
  synth->add_option("--seed", synth_opts.seed, "generator seed")->capture_default_str();
  synth->add_option("--rows", synth_opts.rows, "row count")->capture_default_str();
  synth->add_option("--informative", synth_opts.informative, "one-based informative columns, ';'-separated")
      ->capture_default_str();
  synth->add_option("--noise", synth_opts.noise, "noise column count")->capture_default_str();
  synth->add_option("--flip", synth_opts.flip, "label flip probability")->capture_default_str();
  synth->add_option("--imbalance", synth_opts.imbalance, "positive share before flips")->capture_default_str();
  synth->add_option("--label_column", synth_opts.label_column, "label column name")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) return cmd_validate(build_config(validate_flags));
    if (*run) return cmd_run(build_config(run_flags));
    if (*compare) return cmd_compare(build_config(compare_flags), compare_models);
    if (*select) return cmd_select(build_config(select_flags));
    if (*predict) return cmd_predict(model_path, row_text, input_path);
    if (*synth) return cmd_synth(synth_opts);
  } catch (const StageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: [internal] " << e.what() << '\n';
    return 1;
  }
  return 0;
}
