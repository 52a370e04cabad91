#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "loadscope/core.hpp"

namespace loadscope {

struct PointScores {
  double rmse = 0.0;  // MW, per-day RMSE averaged over days
  double mape = 0.0;  // percent, over all day-hours
};

/// Throws Error(Misaligned) on shape mismatch and Error(ZeroTruth) when a
/// truth value is zero.
PointScores evaluate_point(const Matrix& truth, const Matrix& forecast);

/// Closed-form CRPS of N(mu, sigma^2) at y, in the units of y.
double crps_gaussian(double mu, double sigma, double y);
/// Mean CRPS over every day-hour.
double crps_gaussian(const ProbForecastSet& forecast, const Matrix& truth);

struct ScoreRow {
  std::string region;
  int horizon = 0;
  std::string model;
  double rmse_mw = 0.0;
  double mape_pct = 0.0;
  std::optional<double> crps_mw;

  bool operator==(const ScoreRow&) const = default;
};

struct ScoreTable {
  std::vector<ScoreRow> rows;

  /// Rows of one model, keyed by (region, horizon).
  ScoreTable for_model(const std::string& model) const;
  const ScoreRow* find(const std::string& region, int horizon, const std::string& model) const;
  /// Sorted by region, horizon, model.
  void sort();
  /// `region,horizon,model,rmse_mw,mape_pct,crps_mw`; missing CRPS is empty.
  void write_csv(const std::filesystem::path& path) const;
  static ScoreTable read_csv(const std::filesystem::path& path);
};

enum class Metric { Rmse, Mape, Crps };
std::string metric_name(Metric metric);

inline constexpr int kWeekCount = 4;
/// Week of horizon: 1-7 -> 1, 8-14 -> 2, 15-21 -> 3, 22-30 -> 4.
int week_of_horizon(int horizon);

struct ImprovementCell {
  std::string region;
  int horizon = 0;
  double pct = 0.0;
};

struct WeeklyImprovement {
  std::string region;
  int week = 0;
  int horizons = 0;
  double pct = 0.0;  // mean of the week's per-horizon percentages
};

struct ImprovementTable {
  std::string base_model;
  std::string variant_model;
  Metric metric = Metric::Rmse;
  std::vector<ImprovementCell> cells;
  std::vector<WeeklyImprovement> weekly;
};

/// 100 (base - variant) / base per (region, horizon). Both tables must hold
/// one model each with identical keys; throws Error(KeyMismatch).
ImprovementTable improvement_table(const ScoreTable& base, const ScoreTable& variant, Metric metric);

/// `region,metric,base_model,variant_model,scope,key,improvement_pct`, with
/// scope "horizon" or "week".
void write_improvements_csv(const std::vector<ImprovementTable>& tables, const std::filesystem::path& path);

struct FriedmanResult {
  double chi2 = 0.0;
  double p_value = 1.0;
  std::vector<double> mean_ranks;  // per model, rank 1 = lowest score
  double critical_difference = 0.0;
  int tasks = 0;
  int models = 0;
};

/// Studentized range over sqrt(2) for Nemenyi; alpha in {0.05, 0.10}, 2 <= k <= 10.
double nemenyi_q(int k, double alpha);

/// `scores` is tasks x models, lower is better. Throws Error(TooFewModels)
/// or Error(TooFewTasks) below two of either.
FriedmanResult friedman_nemenyi(const Matrix& scores, double alpha = 0.05);

}  // namespace loadscope
