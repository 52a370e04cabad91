#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "loadscope/matrix.hpp"
#include "loadscope/rng.hpp"

namespace loadscope::gbdt {

struct HyperParams {
  int n_trees = 200;
  double learning_rate = 0.1;
  int max_depth = 4;
  int min_samples_leaf = 5;
  double l2_leaf_reg = 1.0;
  double feature_fraction = 1.0;
  double row_subsample = 1.0;
  int early_stopping_rounds = 20;

  /// Throws Error(InvalidArgument) outside the documented domain.
  void validate() const;
  bool operator==(const HyperParams&) const = default;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf output (unscaled by learning rate)
  double cover = 0.0;  // training rows reaching the node

  bool is_leaf() const { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

/// Binary regression tree; node 0 is the root. Rows go left when
/// x[feature] <= threshold.
struct Tree {
  std::vector<TreeNode> nodes;

  double predict(std::span<const double> x) const;
  int leaf_index(std::span<const double> x) const;
  int depth() const;
  bool operator==(const Tree&) const = default;
};

/// Feature columns pre-sorted once so every tree can scan splits in order.
class SortedIndex {
 public:
  explicit SortedIndex(const Matrix& X);
  std::span<const int> order(std::size_t feature) const {
    return {order_.data() + feature * rows_, rows_};
  }
  std::size_t rows() const { return rows_; }

 private:
  std::size_t rows_ = 0;
  std::vector<int> order_;
};

/// Greedy exact best-split tree on `targets` (residuals). Split structure is
/// searched on the row subsample; leaf values and covers are then refit on
/// every row: value = sum / (count + l2_leaf_reg).
Tree fit_tree(const Matrix& X, std::span<const double> targets, const HyperParams& params, Rng& rng);
Tree fit_tree(const Matrix& X, const SortedIndex& index, std::span<const double> targets, const HyperParams& params,
              Rng& rng);

/// Stagewise boosted trees for one target. Targets are standardized with the
/// training mean/std internally; predictions come back in target units.
struct Ensemble {
  double base_score = 0.0;  // standardized units
  double learning_rate = 0.1;
  std::vector<Tree> trees;
  std::vector<std::string> feature_names;
  double target_mean = 0.0;
  double target_std = 1.0;
  HyperParams params;
  std::vector<double> train_mse;  // standardized units, after each stage
  std::vector<double> val_mse;

  /// Standardized-unit output: base + lr * sum of trees.
  double predict_raw(std::span<const double> x) const;
  double predict_row(std::span<const double> x) const { return target_mean + target_std * predict_raw(x); }
  /// Binds columns by name; throws Error(ColumnMismatch).
  std::vector<double> predict(const NamedMatrix& X) const;
  bool operator==(const Ensemble&) const = default;
};

struct Dataset {
  NamedMatrix X;
  std::vector<double> y;
  std::size_t rows() const { return X.rows(); }
};

/// Throws Error(EmptyData) on empty training data. `val` may be empty, in
/// which case all n_trees are kept.
Ensemble fit_ensemble(const Dataset& train, const Dataset& val, const HyperParams& params, std::uint64_t seed);

struct GaussianOptions {
  int folds = 5;
  double floor_fraction = 1e-3;  // variance floor = (fraction * train std)^2
  std::optional<HyperParams> logvar_params;
};

/// Mean ensemble plus a log-variance ensemble fit on out-of-fold squared
/// residuals. The log-variance output is recentred so that the mean ratio of
/// squared residual to predicted variance is 1 on held-out data.
struct GaussianEnsemble {
  Ensemble mu;
  Ensemble logvar;
  double variance_floor = 1e-12;
  double logvar_offset = 0.0;

  double predict_mu(std::span<const double> x) const { return mu.predict_row(x); }
  double predict_sigma(std::span<const double> x) const;
  struct Prediction {
    std::vector<double> mu;
    std::vector<double> sigma;
  };
  Prediction predict(const NamedMatrix& X) const;
  bool operator==(const GaussianEnsemble&) const = default;
};

GaussianEnsemble fit_gaussian(const Dataset& train, const Dataset& val, const HyperParams& params, std::uint64_t seed,
                              const GaussianOptions& options = {});

// ---------------------------------------------------------------------------
// Hyperparameter search.

template <typename T>
struct Range {
  T lo;
  T hi;
};

struct SearchSpace {
  Range<int> n_trees{100, 400};
  Range<double> learning_rate{0.02, 0.3};  // log-uniform
  Range<int> max_depth{2, 6};
  Range<int> min_samples_leaf{3, 20};
  Range<double> l2_leaf_reg{0.1, 10.0};  // log-uniform
  Range<double> feature_fraction{0.5, 1.0};
  Range<double> row_subsample{0.6, 1.0};
  int early_stopping_rounds = 20;
  /// When non-empty, trials enumerate these configurations in order instead
  /// of sampling.
  std::vector<HyperParams> grid;

  void validate() const;
  HyperParams sample(Rng& rng) const;
};

struct Trial {
  int index = 0;
  HyperParams params;
  double val_mse = 0.0;
};

struct TuneResult {
  HyperParams best;
  double best_val_mse = 0.0;
  std::vector<Trial> trials;
};

using Objective = std::function<double(const HyperParams&)>;

/// Seeded random search (or grid enumeration); the first minimum wins ties.
TuneResult tune(const SearchSpace& space, int budget, std::uint64_t seed, const Objective& objective);
/// Objective = validation MSE of fit_ensemble.
TuneResult tune(const SearchSpace& space, int budget, std::uint64_t seed, const Dataset& train, const Dataset& val);

// ---------------------------------------------------------------------------
// Model files: versioned JSON envelope.

inline constexpr int kModelFormatVersion = 1;

nlohmann::json to_json(const HyperParams& params);
HyperParams params_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Ensemble& e);
Ensemble ensemble_from_json(const nlohmann::json& j);
nlohmann::json to_json(const GaussianEnsemble& g);
GaussianEnsemble gaussian_from_json(const nlohmann::json& j);

}  // namespace loadscope::gbdt
