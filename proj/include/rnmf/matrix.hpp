#pragma once

// Dense real matrices and vectors with the handful of kernels the
// factorization code needs: products, Hadamard operations, Kronecker
// products, column-major vectorization and trace identities.
//
// Storage is row-major. vec()/unvec() are column-major by definition.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "rnmf/error.hpp"

namespace rnmf {

class Vector {
 public:
  explicit Vector(std::size_t len, double fill = 0.0);
  explicit Vector(std::vector<double> values);
  Vector(std::initializer_list<double> values);

  std::size_t size() const noexcept { return data_.size(); }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  friend bool operator==(const Vector&, const Vector&) = default;

 private:
  std::vector<double> data_;
};

class Matrix {
 public:
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  // `row_major` must hold rows * cols values.
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix ones(std::size_t rows, std::size_t cols);
  // 11^T - I: ones off the diagonal, zeros on it.
  static Matrix offdiag_mask(std::size_t n);
  static Matrix diagonal(const Vector& diag);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool is_square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  // Row-major view of the entries.
  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  Matrix transpose() const;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

enum class HadamardOp { mul, div };

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(Matrix a, double s);
Matrix operator*(double s, Matrix a);
// Matrix product.
Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, const Vector& x);

Vector operator+(Vector a, const Vector& b);
Vector operator-(Vector a, const Vector& b);
Vector operator*(double s, Vector a);

// Elementwise product or quotient. Division rejects any divisor whose
// magnitude is below machine epsilon; callers floor explicitly if they need to.
Matrix hadamard(const Matrix& a, const Matrix& b, HadamardOp op);
Vector hadamard(const Vector& a, const Vector& b, HadamardOp op);

Matrix kron(const Matrix& a, const Matrix& b);

Vector vec(const Matrix& m);
Matrix unvec(const Vector& v, std::size_t rows, std::size_t cols);

// tr(a^T b), accumulated elementwise without forming the product.
double trace_prod(const Matrix& a, const Matrix& b);
double trace(const Matrix& m);
double dot(const Vector& a, const Vector& b);

double sum(const Matrix& m);
double mean(const Matrix& m);
double frobenius_norm(const Matrix& m);
double norm2(const Vector& v);

double max_abs_diff(const Matrix& a, const Matrix& b);
double max_abs_diff(const Vector& a, const Vector& b);
// max |m(i,j) - m(j,i)|; throws ShapeError for non-square input.
double max_asymmetry(const Matrix& m);

bool is_nonnegative(const Matrix& m);
bool is_nonnegative(const Vector& v);
bool all_finite(const Matrix& m);
bool all_finite(const Vector& v);

// Diagonal of a square matrix.
Vector diag_of(const Matrix& m);

}  // namespace rnmf
