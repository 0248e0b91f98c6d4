#include "diabml/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "diabml/error.hpp"
#include "diabml/format.hpp"
#include "diabml/rng.hpp"

namespace diabml {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

bool parse_real(std::string_view cell, double& value) {
  if (cell.empty()) return false;
  if (cell.front() == '+') cell.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  return ec == std::errc() && ptr == cell.data() + cell.size() && std::isfinite(value);
}

// Strips a UTF-8 byte order mark if present.
std::string_view strip_bom(std::string_view text) {
  if (text.size() >= 3 && static_cast<unsigned char>(text[0]) == 0xEF &&
      static_cast<unsigned char>(text[1]) == 0xBB && static_cast<unsigned char>(text[2]) == 0xBF) {
    text.remove_prefix(3);
  }
  return text;
}

struct RowHash {
  const Dataset* data;
  std::size_t operator()(std::size_t r) const noexcept {
    std::uint64_t h = 1469598103934665603ULL ^ static_cast<std::uint64_t>(data->labels[r]);
    for (double v : data->features.row(r)) {
      if (v == 0.0) v = 0.0;  // fold -0.0
      std::uint64_t bits;
      std::memcpy(&bits, &v, sizeof bits);
      h = (h ^ bits) * 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

struct RowEqual {
  const Dataset* data;
  bool operator()(std::size_t a, std::size_t b) const noexcept {
    if (data->labels[a] != data->labels[b]) return false;
    const auto ra = data->features.row(a);
    const auto rb = data->features.row(b);
    return std::equal(ra.begin(), ra.end(), rb.begin());
  }
};

}  // namespace

void Dataset::validate() const {
  if (features.rows() != labels.size()) {
    throw DataError("dataset has " + std::to_string(features.rows()) + " feature rows but " +
                    std::to_string(labels.size()) + " labels");
  }
  if (features.cols() != feature_names.size()) {
    throw DataError("dataset has " + std::to_string(features.cols()) + " columns but " +
                    std::to_string(feature_names.size()) + " feature names");
  }
  for (std::size_t r = 0; r < labels.size(); ++r) {
    if (labels[r] != 0 && labels[r] != 1) {
      throw DataError("label at row " + std::to_string(r) + " is not binary");
    }
  }
  for (double v : features.values()) {
    if (!std::isfinite(v)) throw DataError("dataset contains a non-finite feature value");
  }
}

Dataset Dataset::take_rows(std::span<const std::size_t> rows) const {
  Dataset out;
  out.feature_names = feature_names;
  out.features = features.take_rows(rows);
  out.labels.reserve(rows.size());
  for (std::size_t r : rows) out.labels.push_back(labels[r]);
  return out;
}

Dataset Dataset::take_cols(std::span<const std::size_t> cols) const {
  Dataset out;
  out.feature_names.reserve(cols.size());
  for (std::size_t c : cols) out.feature_names.push_back(feature_names.at(c));
  out.features = features.take_cols(cols);
  out.labels = labels;
  return out;
}

ClassCounts count_classes(std::span<const int> labels) {
  ClassCounts c;
  for (int y : labels) (y == 1 ? c.positives : c.negatives) += 1;
  return c;
}

std::string CleanReport::to_text() const {
  std::ostringstream os;
  os << "rows_in: " << rows_in << '\n'
     << "duplicate_rows_dropped: " << duplicate_rows_dropped << '\n'
     << "invalid_rows_dropped: " << invalid_rows_dropped << '\n'
     << "rows_out: " << rows_out << '\n';
  return os.str();
}

Dataset parse_csv(std::string_view text, const std::string& label_column, const std::string& source) {
  text = strip_bom(text);
  std::size_t pos = 0;
  std::size_t line_no = 0;
  auto next_line = [&](std::string_view& line) {
    while (pos < text.size()) {
      const std::size_t nl = text.find('\n', pos);
      const std::size_t end = nl == std::string_view::npos ? text.size() : nl;
      line = text.substr(pos, end - pos);
      pos = end + 1;
      ++line_no;
      if (!trim(line).empty()) return true;
    }
    return false;
  };

  std::string_view header_line;
  if (!next_line(header_line)) throw DataError(source + ": missing header row");
  const auto header = split_fields(header_line);

  std::size_t label_idx = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == label_column) {
      label_idx = i;
      break;
    }
  }
  if (label_idx == header.size()) {
    throw DataError(source + ": label column '" + label_column + "' not found in header");
  }

  Dataset data;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i != label_idx) data.feature_names.emplace_back(header[i]);
  }
  const std::size_t n_features = data.feature_names.size();

  std::vector<double> values;
  std::vector<double> row(n_features);
  std::string_view line;
  while (next_line(line)) {
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw DataError(source + ": line " + std::to_string(line_no) + " has " +
                      std::to_string(fields.size()) + " fields, header has " +
                      std::to_string(header.size()));
    }
    std::size_t c = 0;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      double v = 0.0;
      if (!parse_real(fields[i], v)) {
        throw DataError(source + ": non-numeric cell '" + std::string(fields[i]) + "' at line " +
                        std::to_string(line_no) + ", column '" + std::string(header[i]) + "'");
      }
      if (i == label_idx) {
        if (v != 0.0 && v != 1.0) {
          throw DataError(source + ": label '" + std::string(fields[i]) + "' at line " +
                          std::to_string(line_no) + " is not 0 or 1");
        }
        data.labels.push_back(v == 1.0 ? 1 : 0);
      } else {
        row[c++] = v;
      }
    }
    values.insert(values.end(), row.begin(), row.end());
  }
  data.features = Matrix(data.labels.size(), n_features, std::move(values));
  return data;
}

Dataset load_csv(const std::filesystem::path& path, const std::string& label_column) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), label_column, path.string());
}

CleanResult clean(const Dataset& data) {
  CleanResult result;
  auto& report = result.report;
  report.rows_in = data.rows();

  std::unordered_map<std::size_t, std::vector<std::size_t>> seen;  // hash -> kept rows
  RowHash hasher{&data};
  RowEqual equal{&data};
  RowIndices keep;
  keep.reserve(data.rows());
  for (std::size_t r = 0; r < data.rows(); ++r) {
    const auto row = data.features.row(r);
    if (!std::all_of(row.begin(), row.end(), [](double v) { return std::isfinite(v); })) {
      ++report.invalid_rows_dropped;
      continue;
    }
    auto& bucket = seen[hasher(r)];
    if (std::any_of(bucket.begin(), bucket.end(), [&](std::size_t k) { return equal(k, r); })) {
      ++report.duplicate_rows_dropped;
      continue;
    }
    bucket.push_back(r);
    keep.push_back(r);
  }
  report.rows_out = keep.size();
  result.data = data.take_rows(keep);

  if (report.rows_out == 0) throw DataError("cleaning removed every row");
  const auto counts = count_classes(result.data.labels);
  if (counts.positives == 0 || counts.negatives == 0) {
    throw DataError("only one class remains after cleaning");
  }
  return result;
}

ScalerParams fit_minmax(const Dataset& data, std::span<const std::size_t> rows) {
  if (rows.empty()) throw DataError("fit_minmax: empty row list");
  const std::size_t cols = data.cols();
  ScalerParams p;
  p.minimum.assign(cols, 0.0);
  p.maximum.assign(cols, 0.0);
  bool first = true;
  for (std::size_t r : rows) {
    if (r >= data.rows()) throw DataError("fit_minmax: row index " + std::to_string(r) + " out of range");
    const auto row = data.features.row(r);
    for (std::size_t c = 0; c < cols; ++c) {
      if (first) {
        p.minimum[c] = p.maximum[c] = row[c];
      } else {
        p.minimum[c] = std::min(p.minimum[c], row[c]);
        p.maximum[c] = std::max(p.maximum[c], row[c]);
      }
    }
    first = false;
  }
  return p;
}

ScalerParams fit_minmax(const Dataset& data) {
  RowIndices all(data.rows());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return fit_minmax(data, all);
}

std::vector<double> apply_minmax(std::span<const double> row, const ScalerParams& params) {
  if (row.size() != params.cols()) {
    throw DataError("apply_minmax: row has " + std::to_string(row.size()) + " columns, scaler has " +
                    std::to_string(params.cols()));
  }
  std::vector<double> out(row.size());
  for (std::size_t c = 0; c < row.size(); ++c) {
    const double span = params.maximum[c] - params.minimum[c];
    if (span <= 0.0) {
      out[c] = 0.0;
    } else {
      out[c] = std::clamp((row[c] - params.minimum[c]) / span, 0.0, 1.0);
    }
  }
  return out;
}

Dataset apply_minmax(const Dataset& data, const ScalerParams& params) {
  if (data.cols() != params.cols()) {
    throw DataError("apply_minmax: dataset has " + std::to_string(data.cols()) +
                    " columns, scaler has " + std::to_string(params.cols()));
  }
  Dataset out = data;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    const auto scaled = apply_minmax(data.features.row(r), params);
    std::copy(scaled.begin(), scaled.end(), out.features.row(r).begin());
  }
  return out;
}

SplitIndices stratified_split(std::span<const int> labels, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError("test fraction must lie in (0, 1)");
  }
  SplitIndices split;
  for (int cls : {0, 1}) {
    RowIndices members;
    for (std::size_t r = 0; r < labels.size(); ++r) {
      if (labels[r] == cls) members.push_back(r);
    }
    if (members.empty()) throw DataError("stratified_split: class " + std::to_string(cls) + " is absent");
    const auto n_test = static_cast<std::size_t>(std::llround(members.size() * test_fraction));
    if (n_test == 0 || n_test >= members.size()) {
      throw DataError("stratified_split: class " + std::to_string(cls) + " with " +
                      std::to_string(members.size()) + " rows is too small for test fraction " +
                      std::to_string(test_fraction));
    }
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(cls)));
    rng.shuffle(members);
    split.test_rows.insert(split.test_rows.end(), members.begin(), members.begin() + n_test);
    split.train_rows.insert(split.train_rows.end(), members.begin() + n_test, members.end());
  }
  std::sort(split.train_rows.begin(), split.train_rows.end());
  std::sort(split.test_rows.begin(), split.test_rows.end());
  return split;
}

SplitIndices stratified_split(const Dataset& data, double test_fraction, std::uint64_t seed) {
  return stratified_split(std::span<const int>(data.labels), test_fraction, seed);
}

std::string to_csv(const Dataset& data, const std::string& label_column) {
  data.validate();
  std::string out;
  for (const auto& name : data.feature_names) out += name + ",";
  out += label_column + "\n";
  for (std::size_t r = 0; r < data.rows(); ++r) {
    for (double v : data.features.row(r)) out += format_real(v) + ",";
    out += std::to_string(data.labels[r]) + "\n";
  }
  return out;
}

void save_csv(const Dataset& data, const std::filesystem::path& path, const std::string& label_column) {
  const std::string text = to_csv(data, label_column);
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  out.close();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace diabml
