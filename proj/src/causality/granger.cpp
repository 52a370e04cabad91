#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "loadscope/causality.hpp"
#include "loadscope/csv.hpp"
#include "loadscope/stats.hpp"

namespace loadscope {

std::string direction_name(Direction d) {
  switch (d) {
    case Direction::XToY: return "x_to_y";
    case Direction::YToX: return "y_to_x";
    case Direction::Both: return "both";
    case Direction::None: return "none";
  }
  return "none";
}

namespace {

struct Fit {
  double ssr = 0.0;
  Eigen::VectorXd beta;
  Eigen::MatrixXd design;
};

Fit ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  Fit f;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  f.beta = qr.solve(y);
  f.ssr = (y - X * f.beta).squaredNorm();
  f.design = X;
  return f;
}

/// Rows t = start..n-1; columns: 1, then for each series its lags 1..p.
Eigen::MatrixXd lag_design(const std::vector<const std::vector<double>*>& series, int p, std::size_t start) {
  const std::size_t n = series.front()->size();
  const auto rows = static_cast<Eigen::Index>(n - start);
  Eigen::MatrixXd X(rows, 1 + static_cast<Eigen::Index>(series.size()) * p);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const std::size_t t = start + static_cast<std::size_t>(r);
    X(r, 0) = 1.0;
    Eigen::Index c = 1;
    for (const auto* s : series) {
      for (int l = 1; l <= p; ++l) X(r, c++) = (*s)[t - static_cast<std::size_t>(l)];
    }
  }
  return X;
}

Eigen::VectorXd tail(const std::vector<double>& v, std::size_t start) {
  return Eigen::Map<const Eigen::VectorXd>(v.data() + start, static_cast<Eigen::Index>(v.size() - start));
}

GrangerDirection one_direction(const std::vector<double>& cause, const std::vector<double>& effect, int max_lag) {
  const auto start = static_cast<std::size_t>(max_lag);
  const Eigen::VectorXd y = tail(effect, start);
  const double m = static_cast<double>(y.size());
  int best_p = 1;
  double best_bic = std::numeric_limits<double>::infinity();
  for (int p = 1; p <= max_lag; ++p) {
    double ssr = ols(lag_design({&effect}, p, start), y).ssr;
    double bic = m * std::log(std::max(ssr, std::numeric_limits<double>::min()) / m) + (p + 1) * std::log(m);
    if (bic < best_bic) {
      best_bic = bic;
      best_p = p;
    }
  }
  GrangerDirection out;
  out.lag = best_p;
  const double restricted = ols(lag_design({&effect}, best_p, start), y).ssr;
  const double unrestricted = ols(lag_design({&effect, &cause}, best_p, start), y).ssr;
  const double df2 = m - 2.0 * best_p - 1.0;
  const double tss = (y.array() - y.mean()).square().sum();
  if (unrestricted <= 1e-24 * std::max(tss, std::numeric_limits<double>::min())) {
    const bool gained = restricted - unrestricted > 1e-24 * tss;
    out.f_stat = gained ? std::numeric_limits<double>::infinity() : 0.0;
    out.p_value = gained ? 0.0 : 1.0;
    return out;
  }
  out.f_stat = std::max(0.0, (restricted - unrestricted) / best_p / (unrestricted / df2));
  out.p_value = stats::f_sf(out.f_stat, best_p, df2);
  return out;
}

std::vector<double> diff(const std::vector<double>& v) {
  std::vector<double> out(v.size() - 1);
  for (std::size_t i = 1; i < v.size(); ++i) out[i - 1] = v[i] - v[i - 1];
  return out;
}

bool constant(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

}  // namespace

double adf_statistic(std::span<const double> y, int lags) {
  if (lags < 0) throw Error(Errc::InvalidArgument, "ADF lags must be >= 0");
  const auto n = y.size();
  const auto start = static_cast<std::size_t>(lags) + 1;
  if (n < start + 5) throw Error(Errc::TooShort, "series too short for ADF");
  std::vector<double> dy(n, 0.0);
  for (std::size_t t = 1; t < n; ++t) dy[t] = y[t] - y[t - 1];
  const auto rows = static_cast<Eigen::Index>(n - start);
  Eigen::MatrixXd X(rows, 2 + lags);
  Eigen::VectorXd target(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const std::size_t t = start + static_cast<std::size_t>(r);
    target(r) = dy[t];
    X(r, 0) = 1.0;
    X(r, 1) = y[t - 1];
    for (int l = 1; l <= lags; ++l) X(r, 1 + l) = dy[t - static_cast<std::size_t>(l)];
  }
  Fit f = ols(X, target);
  const double dof = static_cast<double>(rows - X.cols());
  const double s2 = f.ssr / dof;
  Eigen::MatrixXd xtx_inv = (X.transpose() * X).inverse();
  const double se = std::sqrt(s2 * xtx_inv(1, 1));
  if (!(se > 0.0)) return -std::numeric_limits<double>::infinity();
  return f.beta(1) / se;
}

GrangerResult granger_test(const DailyFeatureSeries& x, const DailyFeatureSeries& y, const GrangerOptions& options) {
  if (options.max_lag < 1) throw Error(Errc::InvalidArgument, "max_lag must be >= 1");
  const Date first = std::max(x.first, y.first);
  const Date last = std::min(x.last(), y.last());
  const std::int64_t overlap = last >= first ? (last - first) + 1 : 0;
  if (overlap < 10 * options.max_lag) {
    throw Error(Errc::TooShort, std::to_string(overlap) + " overlapping days, need " + std::to_string(10 * options.max_lag));
  }
  std::vector<double> xs, ys;
  for (Date d = first; d <= last; ++d) {
    xs.push_back(x.at(d));
    ys.push_back(y.at(d));
  }
  if (constant(xs)) throw Error(Errc::ConstantSeries, x.name);
  if (constant(ys)) throw Error(Errc::ConstantSeries, y.name);

  GrangerResult r;
  // An exact affine relation makes each series a perfect predictor of the other.
  if (std::abs(stats::spearman(xs, ys)) == 1.0) {
    double mx = stats::mean(xs), my = stats::mean(ys), sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
      syy += (ys[i] - my) * (ys[i] - my);
    }
    if (std::abs(sxy) / std::sqrt(sxx * syy) >= 1.0 - 1e-12) {
      r.direction = Direction::Both;
      r.x_to_y = r.y_to_x = {1, std::numeric_limits<double>::infinity(), 0.0};
      r.n_used = xs.size() - static_cast<std::size_t>(options.max_lag);
      return r;
    }
  }

  r.adf_x = adf_statistic(xs);
  r.adf_y = adf_statistic(ys);
  if (!(r.adf_x < options.adf_critical) || !(r.adf_y < options.adf_critical)) {
    r.differenced = true;
    xs = diff(xs);
    ys = diff(ys);
    if (constant(xs)) throw Error(Errc::ConstantSeries, x.name + " after differencing");
    if (constant(ys)) throw Error(Errc::ConstantSeries, y.name + " after differencing");
  }
  r.x_to_y = one_direction(xs, ys, options.max_lag);
  r.y_to_x = one_direction(ys, xs, options.max_lag);
  r.n_used = xs.size() - static_cast<std::size_t>(options.max_lag);
  const bool xy = r.x_to_y.p_value < options.alpha, yx = r.y_to_x.p_value < options.alpha;
  r.direction = xy && yx ? Direction::Both : xy ? Direction::XToY : yx ? Direction::YToX : Direction::None;
  return r;
}

void write_granger_csv(const std::vector<GrangerRow>& rows, const std::filesystem::path& path) {
  csv::FileWriter w(path);
  w.row({"feature", "region", "direction", "lag", "f_stat", "p_value", "relation"});
  for (const auto& row : rows) {
    const auto relation = direction_name(row.result.direction);
    for (auto [name, d] : {std::pair{"x_to_y", row.result.x_to_y}, std::pair{"y_to_x", row.result.y_to_x}}) {
      w.row({row.feature, row.region, name, std::to_string(d.lag), csv::format_double(d.f_stat),
             csv::format_double(d.p_value), relation});
    }
  }
}

}  // namespace loadscope
