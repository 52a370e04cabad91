#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "loadscope/core.hpp"

namespace loadscope {

struct ReliabilityPoint {
  double nominal = 0.0;
  double empirical = 0.0;  // fraction of PIT values <= nominal
};

struct QQPoint {
  double theoretical = 0.0;
  double sample = 0.0;
};

struct CalibrationReport {
  std::vector<double> pit;
  std::vector<ReliabilityPoint> reliability;  // nominal 0.05, 0.10, ..., 0.95
  std::vector<QQPoint> qq;                    // empty when fewer than 10 points
  double max_reliability_deviation = 0.0;
  double ks_statistic = 0.0;
};

/// Nominal levels 0.05..0.95 in steps of 0.05.
std::vector<double> reliability_grid();

/// Calibration of Gaussian forecasts against observations, flattened over
/// the given values. Throws Error(Misaligned) on length mismatch and
/// Error(NonPositiveSigma).
CalibrationReport calibration_report(std::span<const double> mu, std::span<const double> sigma,
                                     std::span<const double> truth);

/// Per-hour slice (`hour` in 0..23) or every day-hour pooled (nullopt).
CalibrationReport pit_and_reliability(const ProbForecastSet& forecast, const Matrix& truth,
                                      std::optional<int> hour = std::nullopt);

/// (normal quantile at (i - 0.5)/n, i-th smallest z). Throws Error(TooFew) for n < 10.
std::vector<QQPoint> qq_points(std::span<const double> z);

/// One-sample Kolmogorov-Smirnov distance of `u` from Uniform(0, 1).
double ks_uniform(std::vector<double> u);

void write_calibration_csv(const CalibrationReport& report, const std::filesystem::path& path);

struct TTestResult {
  std::size_t n = 0;
  double mean_diff = 0.0;  // mean of a - b
  double t = 0.0;
  double p_value = 1.0;
  bool significant = false;  // p < 0.01
};

/// Paired two-sided t-test on a - b. Throws Error(LengthMismatch) when the
/// lengths differ or n < 2.
TTestResult paired_ttest(std::span<const double> a, std::span<const double> b);

/// "<label> -20.66**": two decimals, ** when p < 0.01, * when p < 0.05.
std::string format_effect(const std::string& label, const TTestResult& result);

// ---------------------------------------------------------------------------
// Minimal SVG plots.

struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool scatter = false;
};

struct SvgPlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<SvgSeries> series;
  bool diagonal = false;  // draw y = x across the data range

  std::string render() const;
  void save(const std::filesystem::path& path) const;
};

/// Rows x columns grid of values with labelled axes; colour diverges at 0.
struct SvgHeatmap {
  std::string title;
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  Matrix values;

  std::string render() const;
  void save(const std::filesystem::path& path) const;
};

}  // namespace loadscope
