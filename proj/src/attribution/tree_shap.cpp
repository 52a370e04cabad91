#include <algorithm>
#include <cmath>
#include <map>

#include "loadscope/attribution.hpp"
#include "loadscope/csv.hpp"
#include "loadscope/errors.hpp"

namespace loadscope {

namespace {

struct PathElement {
  int feature = -1;
  double zero_fraction = 0.0;
  double one_fraction = 0.0;
  double weight = 0.0;
};

void extend_path(PathElement* path, int depth, double zero_fraction, double one_fraction, int feature) {
  path[depth] = {feature, zero_fraction, one_fraction, depth == 0 ? 1.0 : 0.0};
  for (int i = depth - 1; i >= 0; --i) {
    path[i + 1].weight += one_fraction * path[i].weight * (i + 1) / static_cast<double>(depth + 1);
    path[i].weight = zero_fraction * path[i].weight * (depth - i) / static_cast<double>(depth + 1);
  }
}

void unwind_path(PathElement* path, int depth, int index) {
  const double one = path[index].one_fraction, zero = path[index].zero_fraction;
  double next = path[depth].weight;
  for (int i = depth - 1; i >= 0; --i) {
    if (one != 0.0) {
      const double tmp = path[i].weight;
      path[i].weight = next * (depth + 1) / ((i + 1) * one);
      next = tmp - path[i].weight * zero * (depth - i) / static_cast<double>(depth + 1);
    } else {
      path[i].weight = path[i].weight * (depth + 1) / (zero * (depth - i));
    }
  }
  for (int i = index; i < depth; ++i) {
    path[i].feature = path[i + 1].feature;
    path[i].zero_fraction = path[i + 1].zero_fraction;
    path[i].one_fraction = path[i + 1].one_fraction;
  }
}

double unwound_path_sum(const PathElement* path, int depth, int index) {
  const double one = path[index].one_fraction, zero = path[index].zero_fraction;
  double next = path[depth].weight, total = 0.0;
  for (int i = depth - 1; i >= 0; --i) {
    if (one != 0.0) {
      const double tmp = next * (depth + 1) / ((i + 1) * one);
      total += tmp;
      next = path[i].weight - tmp * zero * (depth - i) / static_cast<double>(depth + 1);
    } else {
      total += path[i].weight / zero / ((depth - i) / static_cast<double>(depth + 1));
    }
  }
  return total;
}

struct Walker {
  const gbdt::Tree& tree;
  std::span<const double> x;
  std::vector<double>& phi;

  void recurse(int node, PathElement* parent_path, int depth, double zero_fraction, double one_fraction, int feature) {
    PathElement* path = parent_path + depth + 1;
    std::copy(parent_path, parent_path + depth + 1, path);
    extend_path(path, depth, zero_fraction, one_fraction, feature);
    const gbdt::TreeNode& n = tree.nodes[static_cast<std::size_t>(node)];
    if (n.is_leaf()) {
      for (int i = 1; i <= depth; ++i) {
        const double w = unwound_path_sum(path, depth, i);
        phi[static_cast<std::size_t>(path[i].feature)] += w * (path[i].one_fraction - path[i].zero_fraction) * n.value;
      }
      return;
    }
    const bool go_left = x[static_cast<std::size_t>(n.feature)] <= n.threshold;
    const int hot = go_left ? n.left : n.right, cold = go_left ? n.right : n.left;
    const double hot_zero = tree.nodes[static_cast<std::size_t>(hot)].cover / n.cover;
    const double cold_zero = tree.nodes[static_cast<std::size_t>(cold)].cover / n.cover;
    double incoming_zero = 1.0, incoming_one = 1.0;
    int index = 0;
    while (index <= depth && path[index].feature != n.feature) ++index;
    if (index != depth + 1) {
      incoming_zero = path[index].zero_fraction;
      incoming_one = path[index].one_fraction;
      unwind_path(path, depth, index);
      --depth;
    }
    recurse(hot, path, depth + 1, hot_zero * incoming_zero, incoming_one, n.feature);
    recurse(cold, path, depth + 1, cold_zero * incoming_zero, 0.0, n.feature);
  }
};

void check_covers(const gbdt::Tree& tree) {
  for (const auto& n : tree.nodes) {
    if (!(n.cover > 0.0)) throw Error(Errc::MissingCovers, "tree node without positive cover");
  }
}

}  // namespace

double tree_conditional_expectation(const gbdt::Tree& tree, std::span<const double> x, const std::vector<bool>& known) {
  auto walk = [&](auto&& self, int node) -> double {
    const auto& n = tree.nodes[static_cast<std::size_t>(node)];
    if (n.is_leaf()) return n.value;
    if (known[static_cast<std::size_t>(n.feature)]) {
      return self(self, x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
    }
    const auto& l = tree.nodes[static_cast<std::size_t>(n.left)];
    const auto& r = tree.nodes[static_cast<std::size_t>(n.right)];
    return (l.cover * self(self, n.left) + r.cover * self(self, n.right)) / n.cover;
  };
  return walk(walk, 0);
}

ShapRow tree_shap(const gbdt::Ensemble& e, std::span<const double> x, ShapUnits units) {
  const std::size_t p = e.feature_names.size();
  if (x.size() < p) throw Error(Errc::ColumnMismatch, "row has fewer values than model features");
  ShapRow out;
  out.phi.assign(p, 0.0);
  double expected = 0.0;
  std::vector<double> tree_phi(p);
  std::vector<PathElement> buffer;
  const std::vector<bool> none(p, false);
  for (const auto& tree : e.trees) {
    check_covers(tree);
    const auto d = static_cast<std::size_t>(tree.depth()) + 2;
    buffer.assign((d + 1) * (d + 2) / 2 + 1, {});
    std::fill(tree_phi.begin(), tree_phi.end(), 0.0);
    Walker{tree, x, tree_phi}.recurse(0, buffer.data(), 0, 1.0, 1.0, -1);
    for (std::size_t j = 0; j < p; ++j) out.phi[j] += e.learning_rate * tree_phi[j];
    expected += tree_conditional_expectation(tree, x, none);
  }
  out.base = e.base_score + e.learning_rate * expected;
  if (units == ShapUnits::Target) {
    for (double& v : out.phi) v *= e.target_std;
    out.base = e.target_mean + e.target_std * out.base;
  }
  return out;
}

ShapMatrix shap_values(const gbdt::Ensemble& e, const NamedMatrix& X, ShapUnits units) {
  const NamedMatrix bound = X.names == e.feature_names ? X : X.reordered(e.feature_names);
  ShapMatrix out;
  out.names = e.feature_names;
  out.values = Matrix(bound.rows(), bound.cols());
  for (std::size_t r = 0; r < bound.rows(); ++r) {
    ShapRow row = tree_shap(e, bound.values.row(r), units);
    std::copy(row.phi.begin(), row.phi.end(), out.values.row(r).begin());
    out.base = row.base;
  }
  if (bound.rows() == 0) out.base = tree_shap(e, std::vector<double>(e.feature_names.size(), 0.0), units).base;
  return out;
}

namespace {

std::vector<ShapImportance> ranked(std::vector<ShapImportance> v) {
  std::sort(v.begin(), v.end(), [](const ShapImportance& a, const ShapImportance& b) {
    if (a.mean_abs_shap != b.mean_abs_shap) return a.mean_abs_shap > b.mean_abs_shap;
    return a.feature < b.feature;
  });
  for (std::size_t i = 0; i < v.size(); ++i) v[i].rank = static_cast<int>(i) + 1;
  return v;
}

}  // namespace

std::vector<ShapImportance> shap_summary(const ShapMatrix& shap) {
  if (shap.values.rows() == 0) throw Error(Errc::EmptyData, "no samples to summarize");
  std::vector<ShapImportance> out;
  for (std::size_t j = 0; j < shap.names.size(); ++j) {
    double acc = 0.0;
    for (std::size_t r = 0; r < shap.values.rows(); ++r) acc += std::abs(shap.values(r, j));
    out.push_back({shap.names[j], acc / static_cast<double>(shap.values.rows()), 0});
  }
  return ranked(std::move(out));
}

std::vector<ShapImportance> average_summaries(const std::vector<std::vector<ShapImportance>>& summaries) {
  if (summaries.empty()) return {};
  std::map<std::string, double> acc;
  for (const auto& s : summaries) {
    for (const auto& item : s) acc[item.feature] += item.mean_abs_shap;
  }
  std::vector<ShapImportance> out;
  for (const auto& [name, total] : acc) out.push_back({name, total / static_cast<double>(summaries.size()), 0});
  return ranked(std::move(out));
}

std::vector<DependencePoint> dependence_data(const NamedMatrix& X, const ShapMatrix& shap, std::size_t i,
                                             std::size_t j) {
  if (i == j) throw Error(Errc::BadFeature, "dependence needs two distinct features");
  if (i >= shap.names.size() || j >= shap.names.size()) throw Error(Errc::BadFeature, "feature index out of range");
  const NamedMatrix bound = X.names == shap.names ? X : X.reordered(shap.names);
  if (bound.rows() != shap.values.rows()) throw Error(Errc::Misaligned, "X and SHAP rows differ");
  std::vector<DependencePoint> out(bound.rows());
  for (std::size_t r = 0; r < bound.rows(); ++r) out[r] = {bound.values(r, i), shap.values(r, i), bound.values(r, j)};
  return out;
}

void write_shap_values_csv(const ShapMatrix& shap, const std::filesystem::path& path) {
  csv::FileWriter w(path);
  w.row({"sample", "feature", "shap_value"});
  for (std::size_t r = 0; r < shap.values.rows(); ++r) {
    for (std::size_t j = 0; j < shap.names.size(); ++j) {
      w.row({std::to_string(r), shap.names[j], csv::format_double(shap.values(r, j))});
    }
  }
}

void write_shap_summary_csv(const std::vector<ShapImportance>& summary, const std::filesystem::path& path) {
  csv::FileWriter w(path);
  w.row({"feature", "mean_abs_shap", "rank"});
  for (const auto& s : summary) w.row({s.feature, csv::format_double(s.mean_abs_shap), std::to_string(s.rank)});
}

}  // namespace loadscope
