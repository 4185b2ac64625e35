#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace jackson {

using Vector = std::vector<double>;

/// Dense row-major matrix. Networks here are small (a few dozen queues at
/// most), so nothing smarter than a flat vector is needed.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);
  static Matrix from_rows(const std::vector<Vector>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  Vector column(std::size_t j) const;
  Matrix transpose() const;
  std::vector<Vector> to_rows() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);

/// Row vector times matrix, v A.
Vector left_multiply(std::span<const double> v, const Matrix& a);
/// Matrix times column vector, A v.
Vector right_multiply(const Matrix& a, std::span<const double> v);

/// Solves A x = b by Gaussian elimination with partial pivoting.
Vector solve(Matrix a, Vector b);
/// Inverse by Gauss-Jordan with partial pivoting.
Matrix inverse(const Matrix& a);

double norm_inf(std::span<const double> v);
/// Maximum absolute row sum.
double norm_inf(const Matrix& a);
double max_abs_difference(const Matrix& a, const Matrix& b);

double dot(std::span<const double> a, std::span<const double> b);

}  // namespace jackson
