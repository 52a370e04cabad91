#include <array>
#include <cmath>

#include "loadscope/evaluation.hpp"
#include "loadscope/stats.hpp"

namespace loadscope {

namespace {

// Critical values of the studentized range divided by sqrt(2), k = 2..10.
constexpr std::array<double, 9> kQ05{1.960, 2.343, 2.569, 2.728, 2.850, 2.949, 3.031, 3.102, 3.164};
constexpr std::array<double, 9> kQ10{1.645, 2.052, 2.291, 2.459, 2.589, 2.693, 2.780, 2.855, 2.920};

}  // namespace

double nemenyi_q(int k, double alpha) {
  if (k < 2 || k > 10) throw Error(Errc::InvalidArgument, "Nemenyi table covers 2..10 models");
  const auto i = static_cast<std::size_t>(k - 2);
  if (std::abs(alpha - 0.05) < 1e-12) return kQ05[i];
  if (std::abs(alpha - 0.10) < 1e-12) return kQ10[i];
  throw Error(Errc::InvalidArgument, "Nemenyi table covers alpha 0.05 and 0.10");
}

FriedmanResult friedman_nemenyi(const Matrix& scores, double alpha) {
  const std::size_t n = scores.rows(), k = scores.cols();
  if (k < 2) throw Error(Errc::TooFewModels, std::to_string(k) + " models");
  if (n < 2) throw Error(Errc::TooFewTasks, std::to_string(n) + " tasks");
  FriedmanResult r;
  r.tasks = static_cast<int>(n);
  r.models = static_cast<int>(k);
  r.mean_ranks.assign(k, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    auto ranks = stats::average_ranks(scores.row(t));
    for (std::size_t j = 0; j < k; ++j) r.mean_ranks[j] += ranks[j];
  }
  double sum_sq = 0.0;
  for (double& m : r.mean_ranks) {
    m /= static_cast<double>(n);
    sum_sq += m * m;
  }
  const double kd = static_cast<double>(k), nd = static_cast<double>(n);
  r.chi2 = 12.0 * nd / (kd * (kd + 1.0)) * (sum_sq - kd * (kd + 1.0) * (kd + 1.0) / 4.0);
  if (std::abs(r.chi2) < 1e-12) r.chi2 = 0.0;
  r.p_value = r.chi2 <= 0.0 ? 1.0 : stats::chi_squared_sf(r.chi2, kd - 1.0);
  if (k <= 10) r.critical_difference = nemenyi_q(static_cast<int>(k), alpha) * std::sqrt(kd * (kd + 1.0) / (6.0 * nd));
  return r;
}

}  // namespace loadscope
