// CART decision trees and bagged random forests.

#include <algorithm>
#include <cmath>
#include <numeric>

#include "classifiers_internal.hpp"
#include "diabml/error.hpp"
#include "diabml/parallel.hpp"
#include "diabml/rng.hpp"

namespace diabml {

namespace {

double gini(double weight, double positive_weight) {
  if (weight <= 0.0) return 0.0;
  const double p = positive_weight / weight;
  return 1.0 - p * p - (1.0 - p) * (1.0 - p);
}

struct SplitChoice {
  bool found = false;
  std::size_t feature = 0;
  double threshold = 0.0;
  double child_impurity = 0.0;  // weighted sum over both children
};

// Every feature keeps its own copy of the node's rows sorted by (value, row).
// A split stably partitions each copy, so children stay sorted without
// re-sorting.
class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, std::span<const int> y, std::span<const double> w, const TreeSettings& s,
              std::uint64_t seed)
      : x_(x), y_(y), w_(w), settings_(s), rng_(seed) {}

  TreeModel build(const std::vector<std::size_t>& rows) {
    const std::size_t f = x_.cols();
    const std::size_t n = rows.size();
    order_.assign(f * n, 0);
    std::vector<std::pair<double, std::size_t>> column(n);
    for (std::size_t c = 0; c < f; ++c) {
      for (std::size_t i = 0; i < n; ++i) column[i] = {x_(rows[i], c), rows[i]};
      std::sort(column.begin(), column.end());
      for (std::size_t i = 0; i < n; ++i) order_[c * n + i] = column[i].second;
    }
    return grow_from_orders(n);
  }

  /// orders[c] lists the training rows sorted by (x(r, c), r).
  TreeModel build_presorted(std::span<const std::vector<std::size_t>* const> orders) {
    const std::size_t n = orders.empty() ? 0 : orders.front()->size();
    order_.clear();
    order_.reserve(orders.size() * n);
    for (const auto* o : orders) order_.insert(order_.end(), o->begin(), o->end());
    return grow_from_orders(n);
  }

 private:
  TreeModel grow_from_orders(std::size_t n) {
    n_ = n;
    go_left_.assign(x_.rows(), 0);
    scratch_.resize(n);
    if (n > 0) grow(0, n, 0);
    return TreeModel{std::move(nodes_)};
  }

  double weight(std::size_t r) const { return w_.empty() ? 1.0 : w_[r]; }
  std::size_t* segment(std::size_t feature, std::size_t begin) { return order_.data() + feature * n_ + begin; }

  int grow(std::size_t begin, std::size_t end, std::size_t depth) {
    const std::size_t count = end - begin;
    double total = 0.0;
    double positive = 0.0;
    const std::size_t* rows = segment(0, begin);
    for (std::size_t i = 0; i < count; ++i) {
      total += weight(rows[i]);
      if (y_[rows[i]] == 1) positive += weight(rows[i]);
    }
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(TreeNode{-1, 0.0, -1, -1, total > 0.0 ? positive / total : 0.0});

    const bool pure = positive == 0.0 || positive == total;
    if (pure || depth >= settings_.max_depth || count < settings_.min_samples_split) return id;

    const SplitChoice split = best_split(begin, end, total, positive);
    // accept only splits that reduce impurity
    if (!split.found || split.child_impurity >= gini(total, positive) * total - 1e-12 * total) return id;

    std::size_t left_count = 0;
    const std::size_t* by_split = segment(split.feature, begin);
    for (std::size_t i = 0; i < count; ++i) {
      const bool left = x_(by_split[i], split.feature) <= split.threshold;
      go_left_[by_split[i]] = left ? 1 : 0;
      left_count += left ? 1 : 0;
    }
    for (std::size_t c = 0; c < x_.cols(); ++c) {
      std::size_t* seg = segment(c, begin);
      std::size_t l = 0;
      std::size_t r = left_count;
      for (std::size_t i = 0; i < count; ++i) scratch_[go_left_[seg[i]] ? l++ : r++] = seg[i];
      std::copy(scratch_.begin(), scratch_.begin() + static_cast<std::ptrdiff_t>(count), seg);
    }

    const int l = grow(begin, begin + left_count, depth + 1);
    const int rt = grow(begin + left_count, end, depth + 1);
    auto& node = nodes_[static_cast<std::size_t>(id)];
    node.feature = static_cast<int>(split.feature);
    node.threshold = split.threshold;
    node.left = l;
    node.right = rt;
    return id;
  }

  std::vector<std::size_t> candidate_features() {
    const std::size_t f = x_.cols();
    const std::size_t m = settings_.max_features;
    if (m == 0 || m >= f) {
      std::vector<std::size_t> all(f);
      std::iota(all.begin(), all.end(), 0);
      return all;
    }
    auto picked = rng_.sample_without_replacement(f, m);
    std::sort(picked.begin(), picked.end());
    return picked;
  }

  SplitChoice best_split(std::size_t begin, std::size_t end, double total, double positive) {
    SplitChoice best;
    const std::size_t count = end - begin;
    for (std::size_t f : candidate_features()) {
      const std::size_t* sorted = segment(f, begin);
      double left_w = 0.0;
      double left_pos = 0.0;
      for (std::size_t i = 0; i + 1 < count; ++i) {
        const std::size_t r = sorted[i];
        left_w += weight(r);
        if (y_[r] == 1) left_pos += weight(r);
        const double a = x_(r, f);
        const double b = x_(sorted[i + 1], f);
        if (!(a < b)) continue;
        const double right_w = total - left_w;
        if (left_w <= 0.0 || right_w <= 0.0) continue;
        const double impurity = left_w * gini(left_w, left_pos) + right_w * gini(right_w, positive - left_pos);
        if (!best.found || impurity < best.child_impurity) {
          double mid = a + (b - a) / 2.0;
          if (mid >= b) mid = a;
          best = {true, f, mid, impurity};
        }
      }
    }
    return best;
  }

  const Matrix& x_;
  std::span<const int> y_;
  std::span<const double> w_;
  const TreeSettings& settings_;
  Rng rng_;
  std::vector<TreeNode> nodes_;
  std::vector<std::size_t> order_;  // feature-major, n_ entries per feature
  std::size_t n_ = 0;
  std::vector<char> go_left_;
  std::vector<std::size_t> scratch_;
};

std::size_t subtree_depth(const std::vector<TreeNode>& nodes, int id) {
  const auto& n = nodes[static_cast<std::size_t>(id)];
  if (n.feature < 0) return 0;
  return 1 + std::max(subtree_depth(nodes, n.left), subtree_depth(nodes, n.right));
}

}  // namespace

double TreeModel::leaf_value(std::span<const double> row) const {
  std::size_t i = 0;
  while (nodes[i].feature >= 0) {
    const auto& n = nodes[i];
    i = static_cast<std::size_t>(row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
  }
  return nodes[i].value;
}

std::size_t TreeModel::depth() const { return nodes.empty() ? 0 : subtree_depth(nodes, 0); }

TreeModel build_tree(const Matrix& features, std::span<const int> labels, std::span<const double> weights,
                     const TreeSettings& settings, std::uint64_t seed) {
  std::vector<std::size_t> rows;
  rows.reserve(features.rows());
  for (std::size_t r = 0; r < features.rows(); ++r) {
    if (weights.empty() || weights[r] > 0.0) rows.push_back(r);
  }
  return TreeBuilder(features, labels, weights, settings, seed).build(rows);
}

namespace detail {

std::vector<std::size_t> sorted_rows(const Matrix& x, std::span<const std::size_t> rows, std::size_t col) {
  std::vector<std::pair<double, std::size_t>> column(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) column[i] = {x(rows[i], col), rows[i]};
  std::sort(column.begin(), column.end());
  std::vector<std::size_t> out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out[i] = column[i].second;
  return out;
}

TreeModel build_tree_presorted(const Matrix& x, std::span<const int> y,
                               std::span<const std::vector<std::size_t>* const> orders, const TreeSettings& settings,
                               std::uint64_t seed) {
  if (orders.size() != x.cols()) throw DataError("build_tree_presorted: one order per column required");
  return TreeBuilder(x, y, {}, settings, seed).build_presorted(orders);
}

ForestModel train_forest(const Matrix& x, std::span<const int> y, const ForestSettings& s, std::uint64_t seed) {
  const std::size_t n = x.rows();
  TreeSettings tree;
  tree.max_depth = s.max_depth;
  tree.max_features = s.max_features != 0
                          ? s.max_features
                          : std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(x.cols()))));
  ForestModel forest;
  forest.trees.resize(s.trees);
  parallel_for(s.trees, s.threads, [&](std::size_t t) {
    Rng rng(derive_seed(seed, 2 * t));
    // bootstrap sample of size n, expressed as per-row multiplicities
    std::vector<double> counts(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) counts[rng.index(n)] += 1.0;
    forest.trees[t] = build_tree(x, y, counts, tree, derive_seed(seed, 2 * t + 1));
  });
  return forest;
}

double score_forest(const ForestModel& m, std::span<const double> row) {
  std::size_t votes = 0;
  for (const auto& tree : m.trees) votes += tree.leaf_value(row) >= 0.5 ? 1 : 0;
  return static_cast<double>(votes) / static_cast<double>(m.trees.size());
}

}  // namespace detail

}  // namespace diabml
