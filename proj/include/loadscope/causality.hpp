#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "loadscope/core.hpp"
#include "loadscope/features.hpp"
#include "loadscope/gbdt.hpp"

namespace loadscope {

enum class Direction { XToY, YToX, Both, None };
/// x_to_y, y_to_x, both, none.
std::string direction_name(Direction d);

struct GrangerDirection {
  int lag = 0;
  double f_stat = 0.0;
  double p_value = 1.0;
};

struct GrangerResult {
  Direction direction = Direction::None;
  GrangerDirection x_to_y;
  GrangerDirection y_to_x;
  std::size_t n_used = 0;    // regression rows
  bool differenced = false;  // ADF pre-check failed, both series differenced
  double adf_x = 0.0;        // ADF t statistics on the raw series
  double adf_y = 0.0;
};

struct GrangerOptions {
  int max_lag = 7;
  double alpha = 0.05;
  double adf_critical = -2.86;  // 5% level, constant, no trend
};

/// Augmented Dickey-Fuller t statistic with a constant and `lags` lagged
/// differences.
double adf_statistic(std::span<const double> y, int lags = 1);

/// Tests whether lags of x improve an autoregression of y (and the reverse)
/// over their common days. Throws Error(TooShort) when the overlap is under
/// 10 * max_lag days and Error(ConstantSeries) for a constant series.
GrangerResult granger_test(const DailyFeatureSeries& x, const DailyFeatureSeries& y, const GrangerOptions& options = {});

struct DmlOptions {
  int folds = 5;
  gbdt::HyperParams nuisance = default_nuisance();
  std::uint64_t seed = 1;
  bool shuffle = true;  // random fold assignment; false = contiguous blocks
  double degenerate_ratio = 1e-3;

  static gbdt::HyperParams default_nuisance();
};

struct DmlResult {
  double delta = 0.0;
  double se = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  int folds = 0;
  std::size_t n = 0;
  double treatment_residual_ratio = 0.0;  // Var(T - T_hat) / Var(T)
};

/// Cross-fitted partially linear model: residualize T and Y on X with
/// boosted trees fit on the other folds, then OLS through the origin with a
/// heteroscedasticity-robust standard error. Throws
/// Error(DegenerateTreatment) when X leaves almost no variation in T.
DmlResult dml_effect(std::span<const double> treatment, std::span<const double> outcome, const NamedMatrix& covariates,
                     const DmlOptions& options = {});

struct CausalPoint {
  int horizon = 0;
  DmlResult effect;
};

/// Per horizon: Y = daily-mean demand of d + h, T = textual column `feature`
/// at issue day d, X = the design-matrix features of `spec` minus any social
/// column built from `feature`.
std::vector<CausalPoint> causal_profile(const AlignedPanel& panel, const std::string& feature,
                                        const std::string& region, const std::vector<int>& horizons,
                                        const FeatureSpec& spec, const FeatureContext& context,
                                        const DmlOptions& options = {});

/// Daily mean demand of a region over the panel span.
DailyFeatureSeries daily_mean_demand(const AlignedPanel& panel, const std::string& region);

struct GrangerRow {
  std::string feature;
  std::string region;
  GrangerResult result;
};

struct DmlRow {
  std::string feature;
  std::string region;
  int horizon = 0;
  DmlResult result;
};

/// `feature,region,direction,lag,f_stat,p_value,relation`: one row per tested
/// direction; `relation` is the overall classification.
void write_granger_csv(const std::vector<GrangerRow>& rows, const std::filesystem::path& path);
/// `feature,region,horizon,delta,se,ci_lo,ci_hi`.
void write_dml_csv(const std::vector<DmlRow>& rows, const std::filesystem::path& path);

}  // namespace loadscope
