#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace ks2d {

/// Dense row-major real matrix with value semantics.
///
/// Used for every grid-shaped quantity (fields, operator matrices, spectral
/// symbols). Entry (i, j) of a field is the value at (x_i, y_j).
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> init);

  static Matrix identity(std::size_t n);
  static Matrix constant(std::size_t rows, std::size_t cols, double value) {
    return Matrix(rows, cols, value);
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }
  bool same_shape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(data_).subspan(i * cols_, cols_);
  }

  Matrix transposed() const;

  Matrix& operator+=(const Matrix& rhs);
  Matrix& operator-=(const Matrix& rhs);
  Matrix& operator*=(double s);

  /// this += s * rhs
  Matrix& axpy(double s, const Matrix& rhs);

  bool operator==(const Matrix& rhs) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix lhs, const Matrix& rhs);
Matrix operator-(Matrix lhs, const Matrix& rhs);
Matrix operator*(double s, Matrix m);
Matrix operator*(const Matrix& lhs, const Matrix& rhs);

/// Entrywise (Hadamard) division.
Matrix divide_entrywise(const Matrix& num, const Matrix& den);

/// Kronecker product: block (i, j) of the result is a(i, j) * b.
Matrix kron(const Matrix& a, const Matrix& b);

/// Column-stacking vectorization: vec(X)[j * rows + i] = X(i, j).
std::vector<double> vec(const Matrix& x);
Matrix unvec(std::span<const double> v, std::size_t rows, std::size_t cols);

double frobenius_norm(const Matrix& x);
double max_abs(const Matrix& x);
bool all_finite(const Matrix& x);

/// ||a - b||_F / max(||b||_F, tiny); falls back to absolute when b is zero.
double relative_frobenius_error(const Matrix& a, const Matrix& b);

}  // namespace ks2d
