#include <algorithm>
#include <cmath>
#include <cstdio>

#include "loadscope/csv.hpp"
#include "loadscope/diagnostics.hpp"
#include "loadscope/stats.hpp"

namespace loadscope {

std::vector<double> reliability_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 19; ++i) grid.push_back(i / 20.0);
  return grid;
}

CalibrationReport calibration_report(std::span<const double> mu, std::span<const double> sigma,
                                     std::span<const double> truth) {
  if (mu.size() != sigma.size() || mu.size() != truth.size()) throw Error(Errc::Misaligned, "mu, sigma, truth lengths");
  if (mu.empty()) throw Error(Errc::Misaligned, "no forecasts");
  CalibrationReport r;
  std::vector<double> z(mu.size());
  r.pit.resize(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (!(sigma[i] > 0.0)) throw Error(Errc::NonPositiveSigma, "sigma at " + std::to_string(i));
    z[i] = (truth[i] - mu[i]) / sigma[i];
    r.pit[i] = stats::normal_cdf(z[i]);
  }
  std::vector<double> sorted = r.pit;
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  for (double p : reliability_grid()) {
    auto count = std::upper_bound(sorted.begin(), sorted.end(), p) - sorted.begin();
    double empirical = static_cast<double>(count) / n;
    r.reliability.push_back({p, empirical});
    r.max_reliability_deviation = std::max(r.max_reliability_deviation, std::abs(empirical - p));
  }
  r.ks_statistic = ks_uniform(std::move(sorted));
  if (z.size() >= 10) r.qq = qq_points(z);
  return r;
}

CalibrationReport pit_and_reliability(const ProbForecastSet& forecast, const Matrix& truth, std::optional<int> hour) {
  forecast.validate();
  if (forecast.mu.rows() != truth.rows() || forecast.mu.cols() != truth.cols()) {
    throw Error(Errc::Misaligned, "forecast and truth shapes differ");
  }
  if (!hour) return calibration_report(forecast.mu.data(), forecast.sigma.data(), truth.data());
  if (*hour < 0 || static_cast<std::size_t>(*hour) >= truth.cols()) throw Error(Errc::InvalidArgument, "hour out of range");
  const auto h = static_cast<std::size_t>(*hour);
  auto mu = forecast.mu.column(h), sigma = forecast.sigma.column(h), y = truth.column(h);
  return calibration_report(mu, sigma, y);
}

std::vector<QQPoint> qq_points(std::span<const double> z) {
  if (z.size() < 10) throw Error(Errc::TooFew, std::to_string(z.size()) + " residuals, need >= 10");
  std::vector<double> sorted(z.begin(), z.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  std::vector<QQPoint> out(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    out[i] = {stats::normal_quantile((static_cast<double>(i) + 0.5) / n), sorted[i]};
  }
  return out;
}

double ks_uniform(std::vector<double> u) {
  if (u.empty()) return 0.0;
  std::sort(u.begin(), u.end());
  const double n = static_cast<double>(u.size());
  double d = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    d = std::max({d, static_cast<double>(i + 1) / n - u[i], u[i] - static_cast<double>(i) / n});
  }
  return d;
}

void write_calibration_csv(const CalibrationReport& report, const std::filesystem::path& path) {
  csv::FileWriter w(path);
  w.row({"kind", "x", "y"});
  for (const auto& p : report.reliability) w.row({"reliability", csv::format_double(p.nominal), csv::format_double(p.empirical)});
  for (const auto& q : report.qq) w.row({"qq", csv::format_double(q.theoretical), csv::format_double(q.sample)});
  w.row({"summary_max_reliability_deviation", "", csv::format_double(report.max_reliability_deviation)});
  w.row({"summary_ks", "", csv::format_double(report.ks_statistic)});
}

TTestResult paired_ttest(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(Errc::LengthMismatch, "paired samples differ in length");
  if (a.size() < 2) throw Error(Errc::LengthMismatch, "paired t-test needs n >= 2");
  TTestResult r;
  r.n = a.size();
  const double n = static_cast<double>(r.n);
  double sum = 0.0;
  for (std::size_t i = 0; i < r.n; ++i) sum += a[i] - b[i];
  r.mean_diff = sum / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < r.n; ++i) {
    double d = a[i] - b[i] - r.mean_diff;
    ss += d * d;
  }
  const double se = std::sqrt(ss / (n - 1.0) / n);
  if (se == 0.0 || se <= 1e-14 * std::abs(r.mean_diff)) {
    r.t = r.mean_diff == 0.0 ? 0.0 : std::copysign(INFINITY, r.mean_diff);
    r.p_value = r.mean_diff == 0.0 ? 1.0 : 0.0;
  } else {
    r.t = r.mean_diff / se;
    r.p_value = stats::student_t_two_sided(r.t, n - 1.0);
  }
  r.significant = r.p_value < 0.01;
  return r;
}

std::string format_effect(const std::string& label, const TTestResult& result) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", result.mean_diff);
  std::string stars = result.p_value < 0.01 ? "**" : result.p_value < 0.05 ? "*" : "";
  return (label.empty() ? "" : label + " ") + buf + stars;
}

}  // namespace loadscope
