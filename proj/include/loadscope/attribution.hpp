#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "loadscope/gbdt.hpp"

namespace loadscope {

enum class ShapUnits { Standardized, Target };

/// Attributions for one row: base + sum(phi) equals the model output in the
/// chosen units.
struct ShapRow {
  std::vector<double> phi;
  double base = 0.0;
};

/// Path-dependent TreeSHAP over every tree, scaled by the learning rate.
/// Throws Error(MissingCovers) when a node has no positive cover and
/// Error(ColumnMismatch) when `x` is shorter than the feature list.
ShapRow tree_shap(const gbdt::Ensemble& e, std::span<const double> x, ShapUnits units = ShapUnits::Standardized);

/// Cover-weighted expected output of one tree when only `known` features are
/// observed (the value function TreeSHAP attributes).
double tree_conditional_expectation(const gbdt::Tree& tree, std::span<const double> x, const std::vector<bool>& known);

struct ShapMatrix {
  std::vector<std::string> names;
  Matrix values;  // samples x features
  double base = 0.0;
};

/// Binds X columns by name.
ShapMatrix shap_values(const gbdt::Ensemble& e, const NamedMatrix& X, ShapUnits units = ShapUnits::Target);

struct ShapImportance {
  std::string feature;
  double mean_abs_shap = 0.0;
  int rank = 0;
};

/// Mean |phi| per feature, descending; ties ordered by name.
std::vector<ShapImportance> shap_summary(const ShapMatrix& shap);
/// Averages several summaries feature by feature (features missing from a
/// summary count as 0), then re-ranks.
std::vector<ShapImportance> average_summaries(const std::vector<std::vector<ShapImportance>>& summaries);

struct DependencePoint {
  double x = 0.0;      // value of feature i
  double phi = 0.0;    // attribution of feature i
  double color = 0.0;  // value of feature j
};

/// Throws Error(BadFeature) when i == j or either index is out of range.
std::vector<DependencePoint> dependence_data(const NamedMatrix& X, const ShapMatrix& shap, std::size_t i,
                                             std::size_t j);

/// `sample,feature,shap_value`.
void write_shap_values_csv(const ShapMatrix& shap, const std::filesystem::path& path);
/// `feature,mean_abs_shap,rank`.
void write_shap_summary_csv(const std::vector<ShapImportance>& summary, const std::filesystem::path& path);

}  // namespace loadscope
