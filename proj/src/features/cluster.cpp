#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "loadscope/features.hpp"
#include "loadscope/kernels.hpp"

namespace loadscope {

namespace {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

std::vector<double> ClusterResult::heights() const {
  std::vector<double> h;
  h.reserve(merges.size());
  for (const auto& m : merges) h.push_back(m.height);
  return h;
}

std::vector<int> ClusterResult::labels(std::size_t k) const {
  const std::size_t n = items();
  if (k < 1 || k > n) throw Error(Errc::BadK, "k=" + std::to_string(k) + " with " + std::to_string(n) + " items");
  std::vector<std::size_t> rep(n + merges.size());
  std::iota(rep.begin(), rep.begin() + static_cast<std::ptrdiff_t>(n), 0);
  UnionFind uf(n);
  for (std::size_t i = 0; i < n - k; ++i) {
    rep[n + i] = rep[merges[i].left];
    uf.unite(rep[merges[i].left], rep[merges[i].right]);
  }
  std::vector<int> labels(n);
  std::map<std::size_t, int> seen;
  for (std::size_t i = 0; i < n; ++i) {
    auto root = uf.find(i);
    auto [it, inserted] = seen.emplace(root, static_cast<int>(seen.size()));
    labels[i] = it->second;
  }
  return labels;
}

ClusterResult cluster_textual_features(const NamedMatrix& table) {
  const std::size_t n = table.cols();
  if (n < 3) throw Error(Errc::TooFewFeatures, std::to_string(n) + " feature columns");
  Matrix series = table.values.transposed();  // one contiguous row per feature

  // Ward cost of merging two clusters = increase in within-cluster sum of
  // squares; for singletons that is half the squared Euclidean distance.
  std::vector<double> cost(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double d = 0.5 * kernels::squared_distance(series.row(i), series.row(j));
      cost[i * n + j] = cost[j * n + i] = d;
    }
  }
  std::vector<std::size_t> size(n, 1);
  std::vector<char> active(n, 1);

  struct RawMerge {
    std::size_t a, b;
    double height;
  };
  std::vector<RawMerge> raw;
  raw.reserve(n - 1);

  // Nearest-neighbour chain; valid because Ward linkage is reducible.
  std::vector<std::size_t> chain;
  std::size_t remaining = n;
  while (remaining > 1) {
    if (chain.empty()) {
      for (std::size_t i = 0; i < n; ++i) {
        if (active[i]) {
          chain.push_back(i);
          break;
        }
      }
    }
    std::size_t a = chain.back();
    std::size_t prev = chain.size() >= 2 ? chain[chain.size() - 2] : n;
    std::size_t best = n;
    double best_cost = std::numeric_limits<double>::infinity();
    if (prev != n) {
      best = prev;
      best_cost = cost[a * n + prev];
    }
    for (std::size_t c = 0; c < n; ++c) {
      if (!active[c] || c == a) continue;
      if (cost[a * n + c] < best_cost) {
        best_cost = cost[a * n + c];
        best = c;
      }
    }
    if (best != prev) {
      chain.push_back(best);
      continue;
    }
    chain.pop_back();
    chain.pop_back();
    std::size_t keep = std::min(a, best), drop = std::max(a, best);
    raw.push_back({keep, drop, best_cost});
    const double na = static_cast<double>(size[a]), nb = static_cast<double>(size[best]);
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == a || k == best) continue;
      const double nk = static_cast<double>(size[k]);
      double updated = ((na + nk) * cost[a * n + k] + (nb + nk) * cost[best * n + k] - nk * best_cost) / (na + nb + nk);
      cost[keep * n + k] = cost[k * n + keep] = updated;
    }
    size[keep] += size[drop];
    active[drop] = 0;
    --remaining;
  }

  // Chain order is not height order; a stable sort keeps every merge after
  // the merges that built its operands.
  std::stable_sort(raw.begin(), raw.end(), [](const RawMerge& x, const RawMerge& y) { return x.height < y.height; });

  ClusterResult result;
  result.names = table.names;
  UnionFind uf(n);
  std::vector<std::size_t> cluster_of_root(n);
  std::iota(cluster_of_root.begin(), cluster_of_root.end(), 0);
  std::vector<std::size_t> cluster_size(n, 1);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    std::size_t ra = uf.find(raw[i].a), rb = uf.find(raw[i].b);
    std::size_t ca = cluster_of_root[ra], cb = cluster_of_root[rb];
    std::size_t merged = cluster_size[ra] + cluster_size[rb];
    result.merges.push_back({std::min(ca, cb), std::max(ca, cb), raw[i].height, merged});
    uf.unite(ra, rb);
    std::size_t root = uf.find(ra);
    cluster_of_root[root] = n + i;
    cluster_size[root] = merged;
  }
  return result;
}

std::vector<double> within_cluster_profile(const std::vector<double>& heights) {
  const std::size_t n = heights.size() + 1;
  std::vector<double> w(n, 0.0);
  // W(k) sums the first n - k merge heights.
  double acc = 0.0;
  for (std::size_t merges = 0; merges < n; ++merges) {
    if (merges > 0) acc += heights[merges - 1];
    w[n - merges - 1] = acc;
  }
  return w;
}

int select_k_elbow(const std::vector<double>& heights) {
  if (heights.size() < 4) throw Error(Errc::TooFewMerges, std::to_string(heights.size()) + " merges");
  auto w = within_cluster_profile(heights);
  const std::size_t n = w.size();
  double scale = 0.0;
  for (double v : w) scale = std::max(scale, std::abs(v));
  const double eps = 1e-12 * std::max(scale, 1.0);
  int best_k = 2;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 2; k + 1 <= n; ++k) {
    double curvature = w[k - 2] - 2.0 * w[k - 1] + w[k];
    if (curvature > best + eps) {
      best = curvature;
      best_k = static_cast<int>(k);
    }
  }
  return best_k;
}

std::vector<Centroid> extract_centroids(const ClusterResult& result, std::size_t k, const DailyTable& table) {
  if (k < 1 || k > result.items()) throw Error(Errc::BadK, "k=" + std::to_string(k));
  if (table.table.names != result.names) throw Error(Errc::ColumnMismatch, "table columns differ from clustered items");
  auto labels = result.labels(k);
  Matrix series = table.table.values.transposed();
  std::vector<Centroid> out(k);
  std::vector<std::vector<std::size_t>> members(k);
  for (std::size_t i = 0; i < labels.size(); ++i) members[static_cast<std::size_t>(labels[i])].push_back(i);
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t best = members[c].front();
    double best_cost = std::numeric_limits<double>::infinity();
    for (std::size_t i : members[c]) {
      double cost = 0.0;
      for (std::size_t j : members[c]) cost += kernels::squared_distance(series.row(i), series.row(j));
      if (cost < best_cost) {
        best_cost = cost;
        best = i;
      }
    }
    Centroid& centroid = out[c];
    centroid.cluster = static_cast<int>(c) + 1;
    centroid.medoid_column = best;
    centroid.medoid_name = result.names[best];
    for (std::size_t i : members[c]) centroid.members.push_back(result.names[i]);
    centroid.series = table.series(best);
    centroid.series.name = "c" + std::to_string(centroid.cluster) + "_" + centroid.medoid_name;
  }
  return out;
}

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) throw Error(Errc::LengthMismatch, "labelings differ in length");
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> ra, rb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint[{a[i], b[i]}] += 1.0;
    ra[a[i]] += 1.0;
    rb[b[i]] += 1.0;
  }
  auto c2 = [](double x) { return x * (x - 1.0) / 2.0; };
  double index = 0.0, sa = 0.0, sb = 0.0;
  for (const auto& [_, v] : joint) index += c2(v);
  for (const auto& [_, v] : ra) sa += c2(v);
  for (const auto& [_, v] : rb) sb += c2(v);
  double total = c2(static_cast<double>(a.size()));
  double expected = sa * sb / total;
  double maximum = 0.5 * (sa + sb);
  if (maximum == expected) return 1.0;
  return (index - expected) / (maximum - expected);
}

}  // namespace loadscope
