#include <cmath>

#include "loadscope/baselines.hpp"
#include "loadscope/kernels.hpp"

namespace loadscope {

double LassoModel::predict(std::span<const double> x) const {
  return intercept + kernels::dot(x, coefficients);
}

double lasso_objective(const Matrix& X, std::span<const double> y, const LassoModel& model) {
  const std::size_t n = X.rows();
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = y[i] - model.predict(X.row(i));
    loss += r * r;
  }
  double penalty = 0.0;
  for (double b : model.coefficients) penalty += std::abs(b);
  return loss / (2.0 * static_cast<double>(n)) + model.lambda * penalty;
}

LassoModel lasso_fit(const Matrix& X, std::span<const double> y, double lambda, double tol, int max_iter) {
  const std::size_t n = X.rows(), p = X.cols();
  if (n == 0) throw Error(Errc::EmptyData, "no rows");
  if (y.size() != n) throw Error(Errc::LengthMismatch, "X rows and y differ");
  if (!(lambda >= 0.0)) throw Error(Errc::InvalidArgument, "lambda must be >= 0");
  const double inv_n = 1.0 / static_cast<double>(n);

  Matrix cols = X.transposed();
  std::vector<double> scale(p);
  for (std::size_t j = 0; j < p; ++j) scale[j] = kernels::dot(cols.row(j), cols.row(j)) * inv_n;

  LassoModel m;
  m.lambda = lambda;
  m.coefficients.assign(p, 0.0);
  std::vector<double> resid(y.begin(), y.end());
  m.intercept = kernels::sum(resid) * inv_n;
  for (double& r : resid) r -= m.intercept;

  for (int sweep = 1; sweep <= max_iter; ++sweep) {
    double max_change = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      if (scale[j] == 0.0) continue;
      const double old = m.coefficients[j];
      const double rho = kernels::dot(cols.row(j), resid) * inv_n + scale[j] * old;
      const double updated = std::copysign(std::max(std::abs(rho) - lambda, 0.0), rho) / scale[j];
      if (updated != old) {
        kernels::axpy(old - updated, cols.row(j), resid);
        m.coefficients[j] = updated;
        max_change = std::max(max_change, std::abs(updated - old));
      }
    }
    const double shift = kernels::sum(resid) * inv_n;
    m.intercept += shift;
    for (double& r : resid) r -= shift;
    max_change = std::max(max_change, std::abs(shift));
    m.sweeps = sweep;
    double penalty = 0.0;
    for (double b : m.coefficients) penalty += std::abs(b);
    m.objective_history.push_back(kernels::dot(resid, resid) * 0.5 * inv_n + lambda * penalty);
    if (max_change < tol) return m;
  }
  throw Error(Errc::NotConverged, "coordinate descent did not converge in " + std::to_string(max_iter) + " sweeps");
}

}  // namespace loadscope
