#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace gradcomp {

/// Flattened decision variables and states are plain contiguous vectors.
using Vector = std::vector<double>;

/**
 * Dense real matrix, row-major storage.
 *
 * Sized for the small problems in this project (dimensions up to ~10), so
 * every operation is a straightforward triple loop with no blocking.
 */
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> diag);
  /// n x 1 matrix holding v.
  static Matrix column(std::span<const double> v);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }
  bool is_square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> flat() noexcept { return data_; }
  std::span<const double> flat() const noexcept { return data_; }
  const std::vector<double>& entries() const noexcept { return data_; }

  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  Matrix transpose() const;
  bool all_finite() const;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator*(double s, Matrix a);
Vector operator*(const Matrix& a, std::span<const double> x);

/// Aᵀ·A with the sum for (i,j) and (j,i) taken in the same order, so the
/// result is exactly symmetric.
Matrix gram(const Matrix& a);

/// (A + Aᵀ)/2.
Matrix symmetric_part(const Matrix& a);

double frobenius_norm(const Matrix& a);
/// max |a_ij|.
double max_abs(const Matrix& a);
/// max |a_ij - a_ji|.
double asymmetry(const Matrix& a);
double trace(const Matrix& a);

/// Solves A·X = B by Gaussian elimination with partial pivoting.
/// Throws Error when A is numerically singular.
Matrix solve(const Matrix& a, const Matrix& b);
Vector solve(const Matrix& a, std::span<const double> b);

// Vector helpers. All of them require matching lengths.
double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double distance(std::span<const double> a, std::span<const double> b);
Vector add(std::span<const double> a, std::span<const double> b);
Vector subtract(std::span<const double> a, std::span<const double> b);
Vector scaled(double s, std::span<const double> a);
/// a - s·b
Vector axpy_neg(std::span<const double> a, double s, std::span<const double> b);
bool all_finite(std::span<const double> a);

}  // namespace gradcomp
