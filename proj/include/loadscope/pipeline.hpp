#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "loadscope/baselines.hpp"
#include "loadscope/features.hpp"
#include "loadscope/gbdt.hpp"
#include "loadscope/ingestion.hpp"

namespace loadscope {

inline constexpr const char* kVersion = "1.0.0";

struct SplitFractions {
  double train = 0.6;
  double val = 0.2;
};

struct CausalityConfig {
  bool enabled = true;
  int max_lag = 7;
  double alpha = 0.05;
  std::vector<std::string> features;  // empty = cluster medoids (or every column)
  std::vector<int> dml_horizons;      // empty = run horizons
  int folds = 5;
};

struct AttributionConfig {
  bool enabled = true;
  std::string variant;  // empty = last configured variant
  int max_samples = 50;
  std::optional<int> values_hour;  // hour whose per-sample values are exported
};

struct CalibrationConfig {
  std::vector<int> hours{20};
  std::vector<std::string> variants;  // empty = every variant
};

struct RunConfig {
  std::filesystem::path data_dir;
  std::optional<SyntheticSpec> synthetic;
  int max_gap_hours = 3;
  std::map<std::string, std::string> region_city;
  std::vector<std::string> regions;  // empty = every region
  std::optional<SplitSpec> split;
  SplitFractions fractions;
  std::vector<std::string> variants{"GBM", "GBM-E", "GBM-S", "GBM-ES"};
  std::optional<int> social_k;
  int text_smoothing_window = 1;
  std::vector<int> horizons{1, 7, 14, 30};
  int tuning_budget = 50;
  std::vector<int> tuning_hours{0, 6, 12, 18};
  gbdt::SearchSpace search;
  gbdt::GaussianOptions gaussian;
  bool baselines = true;
  std::vector<double> pfscf_lambdas = kDefaultPfScfLambdas;
  CalibrationConfig calibration;
  CausalityConfig causality;
  AttributionConfig attribution;
  std::uint64_t seed = 7;
  int jobs = 1;
  std::filesystem::path out_dir = "loadscope_out";

  /// Throws Error(ConfigError) on invalid combinations.
  void validate() const;
  nlohmann::json to_json() const;
  /// Throws Error(ConfigError) on unknown keys or wrong types.
  static RunConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
};

/// Command-line values that take precedence over the environment and file.
struct ConfigOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<std::filesystem::path> out_dir;
};

/// YAML or JSON document as JSON. Throws Error(ConfigError) on syntax errors
/// and Error(FileNotFound) when absent.
nlohmann::json read_structured_file(const std::filesystem::path& path);

/// File, then LOADSCOPE_* environment variables (SEED, JOBS, OUT, DATA_DIR,
/// BUDGET), then `overrides`.
RunConfig load_config(const std::filesystem::path& path, const ConfigOverrides& overrides = {});
void apply_environment(RunConfig& config);
void apply_overrides(RunConfig& config, const ConfigOverrides& overrides);

/// Panel described by the config: synthetic or read from data_dir.
AlignedPanel load_config_panel(const RunConfig& config);
/// Explicit split, or fractions of the panel span.
SplitSpec resolve_split(const RunConfig& config, const AlignedPanel& panel);

// ---------------------------------------------------------------------------
// Clustering of textual features.

struct ClusterOutput {
  ClusterResult result;
  int k = 0;
  bool elbow = true;
  std::vector<Centroid> centroids;
};

/// Ward clustering of the standardized textual columns over the training
/// range; centroids are the medoid columns over the full span.
ClusterOutput cluster_panel(const AlignedPanel& panel, DateRange train, std::optional<int> k);
void write_cluster_outputs(const ClusterOutput& clusters, const std::filesystem::path& out_dir);

// ---------------------------------------------------------------------------
// Worker pool.

/// Runs fn(0..count-1) on up to `jobs` threads. The exception of the lowest
/// failing index is rethrown after all workers stop.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn);

// ---------------------------------------------------------------------------
// Hashing.

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);
/// Relative path -> SHA-256 for every regular file below `root`, except the
/// names in `exclude`.
std::map<std::string, std::string> file_inventory(const std::filesystem::path& root,
                                                  const std::vector<std::string>& exclude = {"manifest.json"});

// ---------------------------------------------------------------------------
// Experiment runner.

struct RunResult {
  std::filesystem::path out_dir;
  std::map<std::string, std::string> inventory;
  double seconds = 0.0;
};

RunResult run_experiment(const RunConfig& config);
/// Same, with an already loaded panel.
RunResult run_experiment(const RunConfig& config, const AlignedPanel& panel);

/// Granger and DML tables only (the `causality` subcommand).
void run_causality(const RunConfig& config, const AlignedPanel& panel);

// ---------------------------------------------------------------------------
// Forecasting from a finished run.

struct ForecastRow {
  int hour = 0;
  double point = 0.0;
  double mu = 0.0;
  double sigma = 0.0;
  double lo90 = 0.0;
  double hi90 = 0.0;
};

inline constexpr double kZ95 = 1.6449;

/// Loads models/<variant>/<region>/hNN.json and the run's data snapshot.
/// Throws Error(ModelNotFound) and Error(DateOutOfRange).
std::vector<ForecastRow> forecast_from_run(const std::filesystem::path& run_dir, const std::string& region,
                                           Date issue_day, int horizon, const std::string& variant = "GBM");

/// Per-sample SHAP values and summary for one trained hour model.
void attribute_from_run(const std::filesystem::path& run_dir, const std::string& region, int horizon,
                        const std::string& variant, int hour, const std::filesystem::path& out_dir);

void write_forecast_csv(const std::vector<ForecastRow>& rows, std::ostream& out);

}  // namespace loadscope
