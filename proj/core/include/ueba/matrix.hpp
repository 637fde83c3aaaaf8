#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace ueba {

/// Dense row-major matrix of doubles. Small on purpose: the models here are
/// MLPs with widths below 100, so we keep the storage layout obvious and
/// debuggable instead of pulling in a linear algebra library.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  double* row(std::size_t r) { return data_.data() + r * cols_; }
  const double* row(std::size_t r) const { return data_.data() + r * cols_; }

  std::vector<double> row_vec(std::size_t r) const {
    return {row(r), row(r) + cols_};
  }

  void set_row(std::size_t r, const std::vector<double>& v) {
    if (v.size() != cols_) throw std::invalid_argument("Matrix::set_row: width mismatch");
    for (std::size_t c = 0; c < cols_; ++c) (*this)(r, c) = v[c];
  }

  bool operator==(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_ && data_ == other.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

}  // namespace ueba
