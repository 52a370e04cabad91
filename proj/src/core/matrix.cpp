#include "loadscope/matrix.hpp"

#include <algorithm>

#include "loadscope/errors.hpp"

namespace loadscope {

std::vector<double> Matrix::column(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = data_[r * cols_ + c];
  return out;
}

void Matrix::append_row(std::span<const double> values) {
  if (rows_ == 0 && cols_ == 0) cols_ = values.size();
  if (values.size() != cols_) {
    throw Error(Errc::ColumnMismatch, "row width " + std::to_string(values.size()) + " != " + std::to_string(cols_));
  }
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

Matrix Matrix::select_rows(std::span<const std::size_t> indices) const {
  Matrix out(indices.size(), cols_);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    auto src = row(indices[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

Matrix Matrix::select_cols(std::span<const std::size_t> indices) const {
  Matrix out(rows_, indices.size());
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t j = 0; j < indices.size(); ++j) out(r, j) = (*this)(r, indices[j]);
  }
  return out;
}

Matrix Matrix::transposed() const {
  Matrix out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) out(c, r) = (*this)(r, c);
  }
  return out;
}

std::size_t NamedMatrix::index_of(const std::string& name) const {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw Error(Errc::ColumnMismatch, "missing column '" + name + "'");
  return static_cast<std::size_t>(it - names.begin());
}

NamedMatrix NamedMatrix::reordered(std::span<const std::string> order) const {
  std::vector<std::size_t> idx;
  idx.reserve(order.size());
  for (const auto& name : order) idx.push_back(index_of(name));
  return {std::vector<std::string>(order.begin(), order.end()), values.select_cols(idx)};
}

}  // namespace loadscope
