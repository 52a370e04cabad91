#pragma once

#include <array>
#include <vector>

#include "loadscope/core.hpp"
#include "loadscope/ingestion.hpp"
#include "json.hpp"

namespace loadscope {

using DayProfile = std::array<double, kHoursPerDay>;

/// Profile persistence: the forecast for day d + h is the 24-hour profile of
/// issue day d. Throws Error(MissingDay) when d is not fully observed.
DayProfile persistence_forecast(const AlignedPanel& panel, const std::string& region, Date issue_day, int horizon);

/// Smart climatology: per hour, the mean training demand over days sharing
/// the target day's calendar month (any year). Throws Error(NoHistory).
DayProfile climatology_forecast(const AlignedPanel& panel, const std::string& region, Date target_day,
                                DateRange train);

struct LassoModel {
  std::vector<double> coefficients;
  double intercept = 0.0;
  double lambda = 0.0;
  int sweeps = 0;
  /// Objective (1/2n)|y - Xb - c|^2 + lambda |b|_1 after each sweep.
  std::vector<double> objective_history;

  double predict(std::span<const double> x) const;
};

/// Cyclic coordinate descent with soft thresholding and a free intercept.
/// Converged when the largest coefficient change in a sweep is below `tol`;
/// throws Error(NotConverged) after `max_iter` sweeps.
LassoModel lasso_fit(const Matrix& X, std::span<const double> y, double lambda, double tol = 1e-10,
                     int max_iter = 100000);

double lasso_objective(const Matrix& X, std::span<const double> y, const LassoModel& model);

/// y_hat = w_pf * PF + w_scf * SCF + intercept, fitted on validation days.
struct PfScfModel {
  double w_pf = 0.0;
  double w_scf = 0.0;
  double intercept = 0.0;
  double lambda = 0.0;

  double predict(double pf, double scf) const { return w_pf * pf + w_scf * scf + intercept; }
  Matrix predict(const Matrix& pf, const Matrix& scf) const;
};

inline const std::vector<double> kDefaultPfScfLambdas{0.0, 1e-4, 1e-3, 1e-2, 1e-1};

/// Pools all day-hours of the validation forecasts. Regressors are
/// standardized internally; lambda is chosen on the last third of the days
/// after fitting on the first two thirds, then the model is refit on every
/// day. Throws Error(Misaligned) when shapes differ.
PfScfModel combine_pf_scf(const Matrix& pf, const Matrix& scf, const Matrix& truth,
                          const std::vector<double>& lambdas = kDefaultPfScfLambdas);

nlohmann::json to_json(const PfScfModel& model);
PfScfModel pfscf_from_json(const nlohmann::json& j);

}  // namespace loadscope
