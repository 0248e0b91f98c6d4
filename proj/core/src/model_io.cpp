// Text serialization of trained models.
//
// Layout (one record per line, space-separated tokens):
//
//   diabml-model 1
//   kind <classifier kind>
//   features <count>
//   <kind-specific records>
//   end
//
// Reals are written with the shortest decimal form that reads back to the
// identical double.

#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "diabml/classifiers.hpp"
#include "diabml/error.hpp"
#include "diabml/format.hpp"

namespace diabml {

namespace {

constexpr const char* kMagic = "diabml-model";
constexpr int kVersion = 1;

void put(std::ostream& out, const std::string& key, const std::vector<double>& values) {
  out << key;
  if (!values.empty()) out << ' ' << format_reals(values);
  out << '\n';
}

void put(std::ostream& out, const std::string& key, double value) { out << key << ' ' << format_real(value) << '\n'; }

void write_tree(std::ostream& out, const TreeModel& tree) {
  out << "nodes " << tree.nodes.size() << '\n';
  for (const auto& n : tree.nodes) {
    out << "node " << n.feature << ' ' << format_real(n.threshold) << ' ' << n.left << ' ' << n.right << ' '
        << format_real(n.value) << '\n';
  }
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  // Next line split as (key, rest). Throws at end of input.
  std::pair<std::string, std::string> next() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      const auto sp = line.find(' ');
      if (sp == std::string::npos) return {line, ""};
      return {line.substr(0, sp), line.substr(sp + 1)};
    }
    throw DataError("model file: unexpected end of input after line " + std::to_string(line_no_));
  }

  std::string expect(const std::string& key) {
    auto [k, rest] = next();
    if (k != key) fail("expected '" + key + "', found '" + k + "'");
    return rest;
  }

  double real(const std::string& key) { return parse_real_strict(expect(key)); }
  std::vector<double> reals(const std::string& key) { return parse_reals(expect(key)); }
  std::size_t count(const std::string& key) {
    const std::string text = expect(key);
    std::size_t pos = 0;
    const auto v = std::stoull(text, &pos);
    if (pos != text.size()) fail("bad count '" + text + "'");
    return static_cast<std::size_t>(v);
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw DataError("model file line " + std::to_string(line_no_) + ": " + what);
  }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

TreeModel read_tree(Reader& r) {
  TreeModel tree;
  const std::size_t n = r.count("nodes");
  tree.nodes.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::istringstream ss(r.expect("node"));
    std::string thr, val;
    TreeNode node;
    if (!(ss >> node.feature >> thr >> node.left >> node.right >> val)) r.fail("malformed node");
    node.threshold = parse_real_strict(thr);
    node.value = parse_real_strict(val);
    tree.nodes.push_back(node);
  }
  for (const auto& node : tree.nodes) {
    if (node.feature >= 0 && (node.left < 0 || node.right < 0 || static_cast<std::size_t>(node.left) >= n ||
                              static_cast<std::size_t>(node.right) >= n)) {
      r.fail("node child index out of range");
    }
  }
  if (tree.nodes.empty()) r.fail("tree without nodes");
  return tree;
}

void check_size(Reader& r, const std::vector<double>& v, std::size_t n, const char* what) {
  if (v.size() != n) {
    r.fail(std::string(what) + " has " + std::to_string(v.size()) + " values, expected " + std::to_string(n));
  }
}

}  // namespace

void write_model(std::ostream& out, const TrainedModel& model) {
  out << kMagic << ' ' << kVersion << '\n';
  out << "kind " << to_string(model.kind()) << '\n';
  out << "features " << model.feature_count() << '\n';
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, NaiveBayesModel>) {
          put(out, "log_prior", std::vector<double>{m.log_prior[0], m.log_prior[1]});
          put(out, "mean0", m.mean[0]);
          put(out, "variance0", m.variance[0]);
          put(out, "mean1", m.mean[1]);
          put(out, "variance1", m.variance[1]);
        } else if constexpr (std::is_same_v<T, LogisticModel> || std::is_same_v<T, SvmModel>) {
          put(out, "bias", m.bias);
          put(out, "weights", m.weights);
        } else if constexpr (std::is_same_v<T, TreeModel>) {
          write_tree(out, m);
        } else if constexpr (std::is_same_v<T, ForestModel>) {
          out << "trees " << m.trees.size() << '\n';
          for (const auto& t : m.trees) write_tree(out, t);
        } else if constexpr (std::is_same_v<T, KnnModel>) {
          out << "k " << m.k << '\n';
          out << "points " << m.points.rows() << '\n';
          for (std::size_t r = 0; r < m.points.rows(); ++r) {
            const auto row = m.points.row(r);
            out << "point " << m.labels[r];
            for (double v : row) out << ' ' << format_real(v);
            out << '\n';
          }
        } else if constexpr (std::is_same_v<T, MlpModel>) {
          out << "hidden " << m.hidden << '\n';
          put(out, "w1", m.w1);
          put(out, "b1", m.b1);
          put(out, "w2", m.w2);
          put(out, "b2", m.b2);
        } else if constexpr (std::is_same_v<T, AdaBoostModel>) {
          out << "stumps " << m.stumps.size() << '\n';
          for (const auto& s : m.stumps) {
            out << "stump " << s.feature << ' ' << format_real(s.threshold) << ' ' << s.polarity << ' '
                << format_real(s.alpha) << '\n';
          }
        }
      },
      model.params());
  out << "end\n";
  if (!out) throw IoError("write_model: stream write failed");
}

TrainedModel read_model(std::istream& in) {
  Reader r(in);
  {
    auto [magic, version] = r.next();
    if (magic != kMagic) r.fail("not a model file");
    if (version != std::to_string(kVersion)) r.fail("unsupported model version '" + version + "'");
  }
  const ClassifierKind kind = parse_classifier_kind(r.expect("kind"));
  const std::size_t f = r.count("features");

  auto params = [&]() -> ModelParams {
    switch (kind) {
      case ClassifierKind::naive_bayes: {
        NaiveBayesModel m;
        const auto prior = r.reals("log_prior");
        check_size(r, prior, 2, "log_prior");
        m.log_prior = {prior[0], prior[1]};
        m.mean[0] = r.reals("mean0");
        m.variance[0] = r.reals("variance0");
        m.mean[1] = r.reals("mean1");
        m.variance[1] = r.reals("variance1");
        for (int c : {0, 1}) {
          check_size(r, m.mean[c], f, "mean");
          check_size(r, m.variance[c], f, "variance");
        }
        return m;
      }
      case ClassifierKind::logistic_regression: {
        LogisticModel m;
        m.bias = r.real("bias");
        m.weights = r.reals("weights");
        check_size(r, m.weights, f, "weights");
        return m;
      }
      case ClassifierKind::linear_svm: {
        SvmModel m;
        m.bias = r.real("bias");
        m.weights = r.reals("weights");
        check_size(r, m.weights, f, "weights");
        return m;
      }
      case ClassifierKind::decision_tree:
        return read_tree(r);
      case ClassifierKind::random_forest: {
        ForestModel m;
        const std::size_t n = r.count("trees");
        if (n == 0) r.fail("forest without trees");
        for (std::size_t i = 0; i < n; ++i) m.trees.push_back(read_tree(r));
        return m;
      }
      case ClassifierKind::knn: {
        KnnModel m;
        m.k = r.count("k");
        const std::size_t n = r.count("points");
        if (m.k == 0 || m.k > n) r.fail("k out of range");
        m.points = Matrix(n, f);
        m.labels.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
          const auto values = parse_reals(r.expect("point"));
          check_size(r, values, f + 1, "point");
          m.labels[i] = values[0] == 1.0 ? 1 : 0;
          std::copy(values.begin() + 1, values.end(), m.points.row(i).begin());
        }
        return m;
      }
      case ClassifierKind::mlp: {
        MlpModel m;
        m.inputs = f;
        m.hidden = r.count("hidden");
        m.w1 = r.reals("w1");
        m.b1 = r.reals("b1");
        m.w2 = r.reals("w2");
        m.b2 = r.real("b2");
        check_size(r, m.w1, m.hidden * f, "w1");
        check_size(r, m.b1, m.hidden, "b1");
        check_size(r, m.w2, m.hidden, "w2");
        return m;
      }
      case ClassifierKind::adaboost: {
        AdaBoostModel m;
        const std::size_t n = r.count("stumps");
        for (std::size_t i = 0; i < n; ++i) {
          std::istringstream ss(r.expect("stump"));
          std::string thr, alpha;
          Stump s;
          if (!(ss >> s.feature >> thr >> s.polarity >> alpha)) r.fail("malformed stump");
          if (s.feature >= f) r.fail("stump feature out of range");
          s.threshold = parse_real_strict(thr);
          s.alpha = parse_real_strict(alpha);
          m.stumps.push_back(s);
        }
        return m;
      }
    }
    r.fail("unhandled kind");
  }();
  r.expect("end");

  if (const auto* tree = std::get_if<TreeModel>(&params)) {
    for (const auto& n : tree->nodes) {
      if (n.feature >= static_cast<int>(f)) r.fail("node feature out of range");
    }
  }
  return TrainedModel(kind, f, std::move(params));
}

}  // namespace diabml
