#include <algorithm>
#include <cmath>
#include <numeric>

#include "loadscope/errors.hpp"
#include "loadscope/gbdt.hpp"
#include "loadscope/stats.hpp"

namespace loadscope::gbdt {

double GaussianEnsemble::predict_sigma(std::span<const double> x) const {
  double var = std::exp(logvar.predict_row(x) + logvar_offset);
  return std::sqrt(std::max(var, variance_floor));
}

GaussianEnsemble::Prediction GaussianEnsemble::predict(const NamedMatrix& X) const {
  const NamedMatrix* input = &X;
  NamedMatrix reordered;
  if (X.names != mu.feature_names) {
    reordered = X.reordered(mu.feature_names);
    input = &reordered;
  }
  Prediction out;
  out.mu.resize(input->rows());
  out.sigma.resize(input->rows());
  for (std::size_t r = 0; r < input->rows(); ++r) {
    out.mu[r] = predict_mu(input->values.row(r));
    out.sigma[r] = predict_sigma(input->values.row(r));
  }
  return out;
}

namespace {

Dataset take_rows(const Dataset& d, const std::vector<std::size_t>& rows) {
  Dataset out;
  out.X.names = d.X.names;
  out.X.values = d.X.values.select_rows(rows);
  for (auto r : rows) out.y.push_back(d.y[r]);
  return out;
}

}  // namespace

GaussianEnsemble fit_gaussian(const Dataset& train, const Dataset& val, const HyperParams& params, std::uint64_t seed,
                              const GaussianOptions& options) {
  const std::size_t n = train.rows();
  if (n == 0) throw Error(Errc::EmptyData, "empty training set");
  GaussianEnsemble g;
  g.mu = fit_ensemble(train, val, params, seed);

  const double mean = stats::mean(train.y);
  double sd = std::sqrt(stats::variance(train.y));
  if (!(sd > 1e-12 * std::max(1.0, std::abs(mean)))) sd = 1e-6 * std::max(1.0, std::abs(mean));
  g.variance_floor = (options.floor_fraction * sd) * (options.floor_fraction * sd);

  // Out-of-fold mean predictions over contiguous blocks, so residuals are
  // never scored by a model that saw the row (or its immediate neighbours).
  std::vector<double> oof(n);
  const auto folds = static_cast<std::size_t>(std::max(2, options.folds));
  if (n >= 2 * folds) {
    for (std::size_t k = 0; k < folds; ++k) {
      std::size_t lo = k * n / folds, hi = (k + 1) * n / folds;
      std::vector<std::size_t> fit_rows, held;
      for (std::size_t i = 0; i < n; ++i) (i >= lo && i < hi ? held : fit_rows).push_back(i);
      Ensemble fold = fit_ensemble(take_rows(train, fit_rows), val, params, task_seed(seed, {0x6f6f66, k}));
      for (std::size_t i : held) oof[i] = fold.predict_row(train.X.values.row(i));
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) oof[i] = g.mu.predict_row(train.X.values.row(i));
  }

  auto log_sq = [&](double y, double m) { return std::log(std::max((y - m) * (y - m), g.variance_floor)); };
  Dataset lv_train{train.X, std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) lv_train.y[i] = log_sq(train.y[i], oof[i]);
  Dataset lv_val{val.X, std::vector<double>(val.rows())};
  std::vector<double> val_mu;
  if (val.rows() > 0) {
    val_mu = g.mu.predict(val.X);
    for (std::size_t i = 0; i < val.rows(); ++i) lv_val.y[i] = log_sq(val.y[i], val_mu[i]);
  }
  g.logvar = fit_ensemble(lv_train, lv_val, options.logvar_params.value_or(params), task_seed(seed, {0x6c7661}));

  // Moment matching: E[r^2 / sigma^2] = 1, on validation rows when there are
  // enough of them, otherwise on the out-of-fold training residuals.
  double ratio = 0.0;
  std::size_t count = 0;
  if (val.rows() >= 10) {
    auto lv = g.logvar.predict(val.X);
    for (std::size_t i = 0; i < val.rows(); ++i) ratio += std::exp(lv_val.y[i] - lv[i]);
    count = val.rows();
  } else {
    for (std::size_t i = 0; i < n; ++i) ratio += std::exp(lv_train.y[i] - g.logvar.predict_row(train.X.values.row(i)));
    count = n;
  }
  g.logvar_offset = std::log(ratio / static_cast<double>(count));
  return g;
}

}  // namespace loadscope::gbdt
