#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace loadscope {

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::vector<double> column(std::size_t c) const;
  void append_row(std::span<const double> values);
  /// Rows picked by index, in the given order.
  Matrix select_rows(std::span<const std::size_t> indices) const;
  Matrix select_cols(std::span<const std::size_t> indices) const;
  Matrix transposed() const;

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// A matrix whose columns carry names. Binding by name is how models and
/// standardizers find their inputs, so column order never matters downstream.
struct NamedMatrix {
  std::vector<std::string> names;
  Matrix values;

  std::size_t rows() const { return values.rows(); }
  std::size_t cols() const { return values.cols(); }
  /// Index of a column by name; throws Error(ColumnMismatch) when absent.
  std::size_t index_of(const std::string& name) const;
  /// Reorders (and subsets) columns to match `order`; throws ColumnMismatch
  /// when a requested name is missing.
  NamedMatrix reordered(std::span<const std::string> order) const;
};

}  // namespace loadscope
