#include <cmath>

#include "loadscope/errors.hpp"
#include "loadscope/gbdt.hpp"

namespace loadscope::gbdt {

void SearchSpace::validate() const {
  auto bad_int = [](Range<int> r, int min) { return r.lo > r.hi || r.lo < min; };
  auto bad_frac = [](Range<double> r) { return r.lo > r.hi || r.lo <= 0.0 || r.hi > 1.0; };
  if (!grid.empty()) return;
  if (bad_int(n_trees, 1) || bad_int(max_depth, 0) || bad_int(min_samples_leaf, 1) || bad_frac(learning_rate) ||
      bad_frac(feature_fraction) || bad_frac(row_subsample) || l2_leaf_reg.lo > l2_leaf_reg.hi ||
      l2_leaf_reg.lo < 0.0 || (l2_leaf_reg.lo == 0.0 && l2_leaf_reg.hi > 0.0) || early_stopping_rounds < 1) {
    throw Error(Errc::EmptySpace, "search ranges are empty or outside the parameter domain");
  }
}

HyperParams SearchSpace::sample(Rng& rng) const {
  auto uniform_int = [&](Range<int> r) {
    return r.lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(r.hi - r.lo + 1)));
  };
  auto log_uniform = [&](Range<double> r) {
    if (r.lo == r.hi) return r.lo;
    return std::exp(rng.uniform(std::log(r.lo), std::log(r.hi)));
  };
  HyperParams p;
  p.n_trees = uniform_int(n_trees);
  p.learning_rate = log_uniform(learning_rate);
  p.max_depth = uniform_int(max_depth);
  p.min_samples_leaf = uniform_int(min_samples_leaf);
  p.l2_leaf_reg = log_uniform(l2_leaf_reg);
  p.feature_fraction = rng.uniform(feature_fraction.lo, feature_fraction.hi);
  p.row_subsample = rng.uniform(row_subsample.lo, row_subsample.hi);
  if (feature_fraction.lo == feature_fraction.hi) p.feature_fraction = feature_fraction.lo;
  if (row_subsample.lo == row_subsample.hi) p.row_subsample = row_subsample.lo;
  p.early_stopping_rounds = early_stopping_rounds;
  return p;
}

TuneResult tune(const SearchSpace& space, int budget, std::uint64_t seed, const Objective& objective) {
  if (budget < 1) throw Error(Errc::InvalidArgument, "tuning budget must be >= 1");
  space.validate();
  Rng rng(seed);
  std::vector<HyperParams> configs;
  if (!space.grid.empty()) {
    for (std::size_t i = 0; i < space.grid.size() && static_cast<int>(i) < budget; ++i) configs.push_back(space.grid[i]);
  } else {
    for (int i = 0; i < budget; ++i) configs.push_back(space.sample(rng));
  }
  TuneResult result;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    double score = objective(configs[i]);
    result.trials.push_back({static_cast<int>(i), configs[i], score});
    if (i == 0 || score < result.best_val_mse) {
      result.best = configs[i];
      result.best_val_mse = score;
    }
  }
  return result;
}

TuneResult tune(const SearchSpace& space, int budget, std::uint64_t seed, const Dataset& train, const Dataset& val) {
  return tune(space, budget, seed, [&](const HyperParams& p) {
    Ensemble e = fit_ensemble(train, val, p, seed);
    auto pred = e.predict(val.X);
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) acc += (pred[i] - val.y[i]) * (pred[i] - val.y[i]);
    return pred.empty() ? 0.0 : acc / static_cast<double>(pred.size());
  });
}

}  // namespace loadscope::gbdt
