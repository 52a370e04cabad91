#include <cmath>

#include "loadscope/errors.hpp"
#include "loadscope/gbdt.hpp"
#include "loadscope/stats.hpp"

namespace loadscope::gbdt {

double Ensemble::predict_raw(std::span<const double> x) const {
  double acc = 0.0;
  for (const auto& t : trees) acc += t.predict(x);
  return base_score + learning_rate * acc;
}

std::vector<double> Ensemble::predict(const NamedMatrix& X) const {
  const NamedMatrix* input = &X;
  NamedMatrix reordered;
  if (X.names != feature_names) {
    reordered = X.reordered(feature_names);
    input = &reordered;
  }
  std::vector<double> out(input->rows());
  for (std::size_t r = 0; r < out.size(); ++r) out[r] = predict_row(input->values.row(r));
  return out;
}

namespace {

double mse(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
  return a.empty() ? 0.0 : acc / static_cast<double>(a.size());
}

}  // namespace

Ensemble fit_ensemble(const Dataset& train, const Dataset& val, const HyperParams& params, std::uint64_t seed) {
  params.validate();
  const std::size_t n = train.rows();
  if (n == 0) throw Error(Errc::EmptyData, "empty training set");
  if (train.y.size() != n) throw Error(Errc::LengthMismatch, "training targets and rows differ");
  for (double v : train.y) {
    if (!std::isfinite(v)) throw Error(Errc::NonFinite, "training target");
  }

  Ensemble e;
  e.feature_names = train.X.names;
  e.learning_rate = params.learning_rate;
  e.params = params;
  e.target_mean = stats::mean(train.y);
  double sd = std::sqrt(stats::variance(train.y));
  e.target_std = sd > 1e-12 * std::max(1.0, std::abs(e.target_mean)) ? sd : 1.0;

  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = (train.y[i] - e.target_mean) / e.target_std;
  e.base_score = stats::mean(z);

  const bool has_val = val.rows() > 0;
  NamedMatrix val_x;
  std::vector<double> zv;
  if (has_val) {
    val_x = val.X.names == e.feature_names ? val.X : val.X.reordered(e.feature_names);
    zv.resize(val.rows());
    for (std::size_t i = 0; i < zv.size(); ++i) zv[i] = (val.y[i] - e.target_mean) / e.target_std;
  }

  std::vector<double> pred(n, e.base_score), vpred(zv.size(), e.base_score), resid(n);
  SortedIndex index(train.X.values);
  Rng rng(seed);
  double best_val = has_val ? mse(vpred, zv) : 0.0;
  std::size_t best_iter = 0;
  int since_best = 0;

  for (int t = 0; t < params.n_trees; ++t) {
    for (std::size_t i = 0; i < n; ++i) resid[i] = z[i] - pred[i];
    Tree tree = fit_tree(train.X.values, index, resid, params, rng);
    for (std::size_t i = 0; i < n; ++i) pred[i] += e.learning_rate * tree.predict(train.X.values.row(i));
    e.train_mse.push_back(mse(pred, z));
    e.trees.push_back(std::move(tree));
    if (has_val) {
      for (std::size_t i = 0; i < vpred.size(); ++i) vpred[i] += e.learning_rate * e.trees.back().predict(val_x.values.row(i));
      double vm = mse(vpred, zv);
      e.val_mse.push_back(vm);
      if (vm < best_val) {
        best_val = vm;
        best_iter = e.trees.size();
        since_best = 0;
      } else if (++since_best >= params.early_stopping_rounds) {
        break;
      }
    } else {
      best_iter = e.trees.size();
    }
    if (e.train_mse.back() <= 1e-30) {
      if (!has_val) best_iter = e.trees.size();
      break;
    }
  }
  e.trees.resize(best_iter);
  return e;
}

}  // namespace loadscope::gbdt
