#include <algorithm>
#include <cmath>
#include <numeric>

#include "loadscope/causality.hpp"
#include "loadscope/csv.hpp"
#include "loadscope/stats.hpp"

namespace loadscope {

gbdt::HyperParams DmlOptions::default_nuisance() {
  gbdt::HyperParams p;
  p.n_trees = 300;
  p.learning_rate = 0.05;
  p.max_depth = 3;
  p.min_samples_leaf = 10;
  p.l2_leaf_reg = 1.0;
  p.early_stopping_rounds = 20;
  return p;
}

namespace {

gbdt::Dataset rows_of(const NamedMatrix& X, std::span<const double> y, const std::vector<std::size_t>& rows) {
  gbdt::Dataset d;
  d.X.names = X.names;
  d.X.values = X.values.select_rows(rows);
  for (auto r : rows) d.y.push_back(y[r]);
  return d;
}

/// Fits on `fit_rows` (every fifth row held out for early stopping) and
/// predicts `held`.
std::vector<double> nuisance(const NamedMatrix& X, std::span<const double> y, const std::vector<std::size_t>& fit_rows,
                             const std::vector<std::size_t>& held, const gbdt::HyperParams& params, std::uint64_t seed) {
  std::vector<std::size_t> train, stop;
  for (std::size_t i = 0; i < fit_rows.size(); ++i) (i % 5 == 4 ? stop : train).push_back(fit_rows[i]);
  auto model = gbdt::fit_ensemble(rows_of(X, y, train), rows_of(X, y, stop), params, seed);
  std::vector<double> out;
  out.reserve(held.size());
  for (auto r : held) out.push_back(model.predict_row(X.values.row(r)));
  return out;
}

}  // namespace

DmlResult dml_effect(std::span<const double> treatment, std::span<const double> outcome, const NamedMatrix& covariates,
                     const DmlOptions& options) {
  const std::size_t n = treatment.size();
  if (outcome.size() != n || covariates.rows() != n) throw Error(Errc::Misaligned, "T, Y and X rows differ");
  if (options.folds < 2) throw Error(Errc::InvalidArgument, "DML needs folds >= 2");
  const auto k = static_cast<std::size_t>(options.folds);
  if (n < 5 * k) throw Error(Errc::TooShort, std::to_string(n) + " rows for " + std::to_string(k) + " folds");
  const double var_t = stats::variance(treatment);
  if (!(var_t > 0.0)) throw Error(Errc::DegenerateTreatment, "treatment is constant");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (options.shuffle) {
    Rng rng(task_seed(options.seed, {0x666f6c64}));
    rng.shuffle(order);
  }
  std::vector<double> v(n), u(n);
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t lo = f * n / k, hi = (f + 1) * n / k;
    std::vector<std::size_t> held(order.begin() + static_cast<std::ptrdiff_t>(lo),
                                  order.begin() + static_cast<std::ptrdiff_t>(hi));
    std::vector<std::size_t> fit_rows;
    for (std::size_t i = 0; i < n; ++i) {
      if (i < lo || i >= hi) fit_rows.push_back(order[i]);
    }
    std::sort(held.begin(), held.end());
    std::sort(fit_rows.begin(), fit_rows.end());
    auto t_hat = nuisance(covariates, treatment, fit_rows, held, options.nuisance, task_seed(options.seed, {f, 1}));
    auto y_hat = nuisance(covariates, outcome, fit_rows, held, options.nuisance, task_seed(options.seed, {f, 2}));
    for (std::size_t i = 0; i < held.size(); ++i) {
      v[held[i]] = treatment[held[i]] - t_hat[i];
      u[held[i]] = outcome[held[i]] - y_hat[i];
    }
  }

  DmlResult r;
  r.folds = options.folds;
  r.n = n;
  r.treatment_residual_ratio = stats::variance(v) / var_t;
  if (r.treatment_residual_ratio < options.degenerate_ratio) {
    throw Error(Errc::DegenerateTreatment, "covariates explain the treatment (residual variance ratio " +
                                               std::to_string(r.treatment_residual_ratio) + ")");
  }
  double vv = 0.0, vu = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    vv += v[i] * v[i];
    vu += v[i] * u[i];
  }
  r.delta = vu / vv;
  double meat = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = u[i] - r.delta * v[i];
    meat += v[i] * v[i] * e * e;
  }
  const double nd = static_cast<double>(n);
  r.se = std::sqrt(meat * nd / (nd - 1.0)) / vv;
  const double z = stats::normal_quantile(0.975);
  r.ci_lo = r.delta - z * r.se;
  r.ci_hi = r.delta + z * r.se;
  return r;
}

DailyFeatureSeries daily_mean_demand(const AlignedPanel& panel, const std::string& region) {
  const auto& demand = panel.demand_of(region);
  DailyFeatureSeries out{region, panel.span.first, {}};
  for (Date d = panel.span.first; d <= panel.span.last; ++d) {
    auto profile = demand.day_profile(d);
    out.values.push_back(std::accumulate(profile.begin(), profile.end(), 0.0) / static_cast<double>(profile.size()));
  }
  return out;
}

std::vector<CausalPoint> causal_profile(const AlignedPanel& panel, const std::string& feature,
                                        const std::string& region, const std::vector<int>& horizons,
                                        const FeatureSpec& spec, const FeatureContext& context,
                                        const DmlOptions& options) {
  const std::size_t t_col = panel.textual.table.index_of(feature);
  const std::string suffix = "_" + feature;
  std::vector<CausalPoint> out;
  for (int h : horizons) {
    DesignMatrix dm = build_design_matrix(panel, region, h, spec, context);
    std::vector<std::size_t> keep;
    for (std::size_t c = 0; c < dm.features.cols(); ++c) {
      const auto& name = dm.features.names[c];
      bool derived = name.starts_with("social_") && name.size() > suffix.size() && name.ends_with(suffix);
      if (!derived) keep.push_back(c);
    }
    NamedMatrix X;
    for (auto c : keep) X.names.push_back(dm.features.names[c]);
    X.values = dm.features.values.select_cols(keep);
    std::vector<double> T, Y;
    for (std::size_t r = 0; r < dm.rows(); ++r) {
      T.push_back(panel.textual.table.values(panel.textual.row_of(dm.issue_dates[r]), t_col));
      auto row = dm.targets.row(r);
      Y.push_back(std::accumulate(row.begin(), row.end(), 0.0) / static_cast<double>(row.size()));
    }
    DmlOptions per = options;
    per.seed = task_seed(options.seed, {static_cast<std::uint64_t>(h)});
    out.push_back({h, dml_effect(T, Y, X, per)});
  }
  return out;
}

void write_dml_csv(const std::vector<DmlRow>& rows, const std::filesystem::path& path) {
  csv::FileWriter w(path);
  w.row({"feature", "region", "horizon", "delta", "se", "ci_lo", "ci_hi"});
  for (const auto& r : rows) {
    w.row({r.feature, r.region, std::to_string(r.horizon), csv::format_double(r.result.delta),
           csv::format_double(r.result.se), csv::format_double(r.result.ci_lo), csv::format_double(r.result.ci_hi)});
  }
}

}  // namespace loadscope
