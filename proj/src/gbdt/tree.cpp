#include <algorithm>
#include <cmath>
#include <numeric>

#include "loadscope/errors.hpp"
#include "loadscope/gbdt.hpp"

namespace loadscope::gbdt {

void HyperParams::validate() const {
  if (n_trees < 1 || max_depth < 0 || min_samples_leaf < 1 || early_stopping_rounds < 1) {
    throw Error(Errc::InvalidArgument, "integer hyperparameters must be >= 1 (max_depth >= 0)");
  }
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) throw Error(Errc::InvalidArgument, "learning_rate must be in (0, 1]");
  if (!(feature_fraction > 0.0 && feature_fraction <= 1.0) || !(row_subsample > 0.0 && row_subsample <= 1.0)) {
    throw Error(Errc::InvalidArgument, "fractions must be in (0, 1]");
  }
  if (!(l2_leaf_reg >= 0.0)) throw Error(Errc::InvalidArgument, "l2_leaf_reg must be >= 0");
}

double Tree::predict(std::span<const double> x) const { return nodes[static_cast<std::size_t>(leaf_index(x))].value; }

int Tree::leaf_index(std::span<const double> x) const {
  int i = 0;
  while (!nodes[static_cast<std::size_t>(i)].is_leaf()) {
    const TreeNode& n = nodes[static_cast<std::size_t>(i)];
    i = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return i;
}

int Tree::depth() const {
  std::vector<int> depth(nodes.size(), 0);
  int deepest = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const TreeNode& n = nodes[i];
    if (n.is_leaf()) continue;
    depth[static_cast<std::size_t>(n.left)] = depth[static_cast<std::size_t>(n.right)] = depth[i] + 1;
    deepest = std::max(deepest, depth[i] + 1);
  }
  return deepest;
}

SortedIndex::SortedIndex(const Matrix& X) : rows_(X.rows()), order_(X.rows() * X.cols()) {
  for (std::size_t f = 0; f < X.cols(); ++f) {
    auto begin = order_.begin() + static_cast<std::ptrdiff_t>(f * rows_);
    std::iota(begin, begin + static_cast<std::ptrdiff_t>(rows_), 0);
    std::stable_sort(begin, begin + static_cast<std::ptrdiff_t>(rows_),
                     [&](int a, int b) { return X(static_cast<std::size_t>(a), f) < X(static_cast<std::size_t>(b), f); });
  }
}

namespace {

struct Work {
  int node;
  std::size_t begin;
  std::size_t end;
  int depth;
};

}  // namespace

Tree fit_tree(const Matrix& X, std::span<const double> targets, const HyperParams& params, Rng& rng) {
  SortedIndex index(X);
  return fit_tree(X, index, targets, params, rng);
}

Tree fit_tree(const Matrix& X, const SortedIndex& index, std::span<const double> targets, const HyperParams& params,
              Rng& rng) {
  const std::size_t n = X.rows();
  const std::size_t p = X.cols();
  if (n == 0) throw Error(Errc::EmptyData, "no rows to fit a tree on");
  if (targets.size() != n) throw Error(Errc::LengthMismatch, "targets and rows differ");
  const double lambda = params.l2_leaf_reg;
  const auto min_leaf = static_cast<std::size_t>(params.min_samples_leaf);

  // Row subsample without replacement.
  std::vector<char> in_sample(n, 1);
  std::size_t m = n;
  if (params.row_subsample < 1.0) {
    m = static_cast<std::size_t>(std::llround(params.row_subsample * static_cast<double>(n)));
    m = std::min(n, std::max(m, std::min(n, 2 * min_leaf)));
    std::vector<std::size_t> rows(n);
    std::iota(rows.begin(), rows.end(), 0);
    for (std::size_t i = 0; i < m; ++i) std::swap(rows[i], rows[i + static_cast<std::size_t>(rng.below(n - i))]);
    std::fill(in_sample.begin(), in_sample.end(), 0);
    for (std::size_t i = 0; i < m; ++i) in_sample[rows[i]] = 1;
  }

  // Per-tree feature subsample, kept in ascending column order.
  std::vector<std::size_t> features(p);
  std::iota(features.begin(), features.end(), 0);
  std::size_t q = p;
  if (params.feature_fraction < 1.0 && p > 0) {
    q = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(params.feature_fraction * static_cast<double>(p))));
    for (std::size_t i = 0; i < q; ++i) std::swap(features[i], features[i + static_cast<std::size_t>(rng.below(p - i))]);
    features.resize(q);
    std::sort(features.begin(), features.end());
  }

  // Sorted sample rows per selected feature; every node owns the same
  // [begin, end) slice in each feature's array.
  std::vector<int> sorted(q * m);
  for (std::size_t fi = 0; fi < q; ++fi) {
    auto order = index.order(features[fi]);
    std::size_t k = 0;
    for (int r : order) {
      if (in_sample[static_cast<std::size_t>(r)]) sorted[fi * m + k++] = r;
    }
  }
  // Any feature array lists the node's rows; without features use a plain list.
  std::vector<int> plain;
  if (q == 0) {
    for (std::size_t r = 0; r < n; ++r) {
      if (in_sample[r]) plain.push_back(static_cast<int>(r));
    }
  }
  auto node_rows = [&](std::size_t begin, std::size_t end) -> std::span<const int> {
    if (q == 0) return {plain.data() + begin, end - begin};
    return {sorted.data() + begin, end - begin};
  };

  Tree tree;
  tree.nodes.push_back({});
  std::vector<Work> stack{{0, 0, m, 0}};
  std::vector<char> goes_left(n, 0);
  std::vector<int> scratch(m);

  while (!stack.empty()) {
    Work w = stack.back();
    stack.pop_back();
    const std::size_t count = w.end - w.begin;
    double sum = 0.0, sum_sq = 0.0;
    for (int r : node_rows(w.begin, w.end)) {
      double t = targets[static_cast<std::size_t>(r)];
      sum += t;
      sum_sq += t * t;
    }
    if (w.depth >= params.max_depth || count < 2 * min_leaf || q == 0) continue;  // stays a leaf

    const double parent = sum * sum / (static_cast<double>(count) + lambda);
    double best_gain = 0.0;
    std::size_t best_fi = 0, best_pos = 0;
    bool found = false;
    for (std::size_t fi = 0; fi < q; ++fi) {
      const std::size_t f = features[fi];
      const int* seg = sorted.data() + fi * m + w.begin;
      double left = 0.0;
      for (std::size_t i = 0; i + 1 < count; ++i) {
        const auto r = static_cast<std::size_t>(seg[i]);
        left += targets[r];
        const std::size_t nl = i + 1, nr = count - nl;
        if (nl < min_leaf) continue;
        if (nr < min_leaf) break;
        if (X(r, f) == X(static_cast<std::size_t>(seg[i + 1]), f)) continue;
        const double right = sum - left;
        const double gain = left * left / (static_cast<double>(nl) + lambda) +
                            right * right / (static_cast<double>(nr) + lambda) - parent;
        if (gain > best_gain) {
          best_gain = gain;
          best_fi = fi;
          best_pos = i;
          found = true;
        }
      }
    }
    if (!found || best_gain <= 1e-12 * std::max(sum_sq, 1e-300)) continue;

    const std::size_t f = features[best_fi];
    const int* seg = sorted.data() + best_fi * m + w.begin;
    const double lo = X(static_cast<std::size_t>(seg[best_pos]), f);
    const double hi = X(static_cast<std::size_t>(seg[best_pos + 1]), f);
    double threshold = lo + 0.5 * (hi - lo);
    if (!(threshold < hi)) threshold = lo;

    for (std::size_t i = 0; i < count; ++i) goes_left[static_cast<std::size_t>(seg[i])] = i <= best_pos ? 1 : 0;
    for (std::size_t fi = 0; fi < q; ++fi) {
      int* s = sorted.data() + fi * m + w.begin;
      std::size_t l = 0, r = best_pos + 1;
      for (std::size_t i = 0; i < count; ++i) {
        if (goes_left[static_cast<std::size_t>(s[i])]) {
          scratch[l++] = s[i];
        } else {
          scratch[r++] = s[i];
        }
      }
      std::copy(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(count), s);
    }

    const int left_id = static_cast<int>(tree.nodes.size());
    const int right_id = left_id + 1;
    tree.nodes.push_back({});
    tree.nodes.push_back({});
    TreeNode& node = tree.nodes[static_cast<std::size_t>(w.node)];
    node.feature = static_cast<int>(f);
    node.threshold = threshold;
    node.left = left_id;
    node.right = right_id;
    const std::size_t mid = w.begin + best_pos + 1;
    stack.push_back({right_id, mid, w.end, w.depth + 1});
    stack.push_back({left_id, w.begin, mid, w.depth + 1});
  }

  // Refit covers and leaf values on every training row.
  std::vector<double> sums(tree.nodes.size(), 0.0);
  for (auto& node : tree.nodes) node.cover = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    auto x = X.row(r);
    std::size_t i = 0;
    for (;;) {
      TreeNode& node = tree.nodes[i];
      node.cover += 1.0;
      sums[i] += targets[r];
      if (node.is_leaf()) break;
      i = static_cast<std::size_t>(x[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right);
    }
  }
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    tree.nodes[i].value = tree.nodes[i].cover + lambda > 0.0 ? sums[i] / (tree.nodes[i].cover + lambda) : 0.0;
  }
  return tree;
}

}  // namespace loadscope::gbdt
