#include <cmath>

#include "loadscope/core.hpp"

namespace loadscope {

Standardizer::Standardizer(std::vector<std::string> names, std::vector<double> means, std::vector<double> stds)
    : names_(std::move(names)), means_(std::move(means)), stds_(std::move(stds)) {
  if (names_.size() != means_.size() || names_.size() != stds_.size()) {
    throw Error(Errc::InvalidArgument, "standardizer field lengths differ");
  }
}

Standardizer Standardizer::fit(const NamedMatrix& matrix) {
  const std::size_t n = matrix.rows();
  const std::size_t p = matrix.cols();
  if (n < 2) throw Error(Errc::InvalidArgument, "standardizer needs at least 2 rows");
  std::vector<double> means(p, 0.0), stds(p, 0.0);
  for (std::size_t c = 0; c < p; ++c) {
    double sum = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      double v = matrix.values(r, c);
      if (!std::isfinite(v)) {
        throw Error(Errc::NonFinite, "column '" + matrix.names[c] + "' row " + std::to_string(r));
      }
      sum += v;
    }
    double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      double d = matrix.values(r, c) - mean;
      ss += d * d;
    }
    double sd = std::sqrt(ss / static_cast<double>(n));
    if (!(sd > 0.0) || sd <= 1e-12 * std::max(1.0, std::abs(mean))) {
      throw Error(Errc::ConstantColumn, matrix.names[c]);
    }
    means[c] = mean;
    stds[c] = sd;
  }
  return Standardizer(matrix.names, std::move(means), std::move(stds));
}

void Standardizer::check_columns(const NamedMatrix& matrix) const {
  if (matrix.cols() != names_.size()) throw Error(Errc::ColumnMismatch, "columns differ from fitted standardizer");
}

namespace {

NamedMatrix in_fitted_order(const NamedMatrix& matrix, const std::vector<std::string>& names) {
  if (matrix.names == names) return matrix;
  return matrix.reordered(names);
}

}  // namespace

NamedMatrix Standardizer::apply(const NamedMatrix& matrix) const {
  NamedMatrix out = in_fitted_order(matrix, names_);
  check_columns(out);
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.values.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) row[c] = (row[c] - means_[c]) / stds_[c];
  }
  return out;
}

NamedMatrix Standardizer::inverse(const NamedMatrix& matrix) const {
  NamedMatrix out = in_fitted_order(matrix, names_);
  check_columns(out);
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.values.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) row[c] = row[c] * stds_[c] + means_[c];
  }
  return out;
}

}  // namespace loadscope
