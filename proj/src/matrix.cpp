#include "rnmf/matrix.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace rnmf {

namespace {

std::string dims(std::size_t r, std::size_t c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(std::string(what) + ": shape mismatch " +
                     dims(a.rows(), a.cols()) + " vs " + dims(b.rows(), b.cols()));
  }
}

void require_same_len(const Vector& a, const Vector& b, const char* what) {
  if (a.size() != b.size()) {
    throw ShapeError(std::string(what) + ": length mismatch " +
                     std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
}

std::size_t checked_mul(std::size_t a, std::size_t b, const char* what) {
  if (a != 0 && b > std::numeric_limits<std::size_t>::max() / a) {
    throw CapacityError(std::string(what) + ": dimension product overflows");
  }
  return a * b;
}

}  // namespace

// ---------------------------------------------------------------- Vector

Vector::Vector(std::size_t len, double fill) : data_(len, fill) {
  if (len == 0) throw ShapeError("Vector: length must be positive");
}

Vector::Vector(std::vector<double> values) : data_(std::move(values)) {
  if (data_.empty()) throw ShapeError("Vector: length must be positive");
}

Vector::Vector(std::initializer_list<double> values) : data_(values) {
  if (data_.empty()) throw ShapeError("Vector: length must be positive");
}

// ---------------------------------------------------------------- Matrix

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols) {
  if (rows == 0 || cols == 0) {
    throw ShapeError("Matrix: dimensions must be positive, got " + dims(rows, cols));
  }
  data_.assign(checked_mul(rows, cols, "Matrix"), fill);
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major)
    : rows_(rows), cols_(cols), data_(std::move(row_major)) {
  if (rows == 0 || cols == 0) {
    throw ShapeError("Matrix: dimensions must be positive, got " + dims(rows, cols));
  }
  if (data_.size() != checked_mul(rows, cols, "Matrix")) {
    throw ShapeError("Matrix: " + std::to_string(data_.size()) +
                     " values given for shape " + dims(rows, cols));
  }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  if (rows_ == 0 || cols_ == 0) throw ShapeError("Matrix: empty initializer");
  data_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_) throw ShapeError("Matrix: ragged initializer");
    data_.insert(data_.end(), row.begin(), row.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::ones(std::size_t rows, std::size_t cols) { return Matrix(rows, cols, 1.0); }

Matrix Matrix::offdiag_mask(std::size_t n) {
  Matrix m(n, n, 1.0);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 0.0;
  return m;
}

Matrix Matrix::diagonal(const Vector& diag) {
  Matrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix& Matrix::operator+=(const Matrix& other) {
  require_same_shape(*this, other, "operator+");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  require_same_shape(*this, other, "operator-");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

// ---------------------------------------------------------------- arithmetic

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(Matrix a, double s) { return a *= s; }
Matrix operator*(double s, Matrix a) { return a *= s; }

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matrix product: inner dimensions differ " +
                     dims(a.rows(), a.cols()) + " * " + dims(b.rows(), b.cols()));
  }
  Matrix c(a.rows(), b.cols());
  const std::size_t n = b.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* ci = &c(i, 0);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const double* bk = b.values().data() + k * n;
      for (std::size_t j = 0; j < n; ++j) ci[j] += aik * bk[j];
    }
  }
  return c;
}

Vector operator*(const Matrix& a, const Vector& x) {
  if (a.cols() != x.size()) {
    throw ShapeError("matrix-vector product: " + dims(a.rows(), a.cols()) +
                     " * " + std::to_string(x.size()));
  }
  Vector y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) acc += a(i, j) * x[j];
    y[i] = acc;
  }
  return y;
}

Vector operator+(Vector a, const Vector& b) {
  require_same_len(a, b, "operator+");
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

Vector operator-(Vector a, const Vector& b) {
  require_same_len(a, b, "operator-");
  for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
  return a;
}

Vector operator*(double s, Vector a) {
  for (double& v : a.values()) v *= s;
  return a;
}

Matrix hadamard(const Matrix& a, const Matrix& b, HadamardOp op) {
  require_same_shape(a, b, "hadamard");
  Matrix c(a.rows(), a.cols());
  auto av = a.values();
  auto bv = b.values();
  auto cv = c.values();
  for (std::size_t k = 0; k < cv.size(); ++k) {
    if (op == HadamardOp::mul) {
      cv[k] = av[k] * bv[k];
    } else {
      if (std::abs(bv[k]) < std::numeric_limits<double>::epsilon()) {
        throw DivisionError("hadamard: divisor too small at (" +
                                std::to_string(k / a.cols()) + "," +
                                std::to_string(k % a.cols()) + ")",
                            k);
      }
      cv[k] = av[k] / bv[k];
    }
  }
  return c;
}

Vector hadamard(const Vector& a, const Vector& b, HadamardOp op) {
  require_same_len(a, b, "hadamard");
  Vector c(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (op == HadamardOp::mul) {
      c[k] = a[k] * b[k];
    } else {
      if (std::abs(b[k]) < std::numeric_limits<double>::epsilon()) {
        throw DivisionError("hadamard: divisor too small at " + std::to_string(k), k);
      }
      c[k] = a[k] / b[k];
    }
  }
  return c;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  const std::size_t rows = checked_mul(a.rows(), b.rows(), "kron");
  const std::size_t cols = checked_mul(a.cols(), b.cols(), "kron");
  checked_mul(rows, cols, "kron");
  Matrix k(rows, cols);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double aij = a(i, j);
      for (std::size_t p = 0; p < b.rows(); ++p)
        for (std::size_t q = 0; q < b.cols(); ++q)
          k(i * b.rows() + p, j * b.cols() + q) = aij * b(p, q);
    }
  return k;
}

Vector vec(const Matrix& m) {
  Vector v(m.size());
  std::size_t k = 0;
  for (std::size_t j = 0; j < m.cols(); ++j)
    for (std::size_t i = 0; i < m.rows(); ++i) v[k++] = m(i, j);
  return v;
}

Matrix unvec(const Vector& v, std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  if (v.size() != m.size()) {
    throw ShapeError("unvec: length " + std::to_string(v.size()) +
                     " does not match shape " + dims(rows, cols));
  }
  std::size_t k = 0;
  for (std::size_t j = 0; j < cols; ++j)
    for (std::size_t i = 0; i < rows; ++i) m(i, j) = v[k++];
  return m;
}

double trace_prod(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "trace_prod");
  double acc = 0.0;
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t k = 0; k < av.size(); ++k) acc += av[k] * bv[k];
  return acc;
}

double trace(const Matrix& m) {
  if (!m.is_square()) throw ShapeError("trace: matrix is not square");
  double acc = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) acc += m(i, i);
  return acc;
}

double dot(const Vector& a, const Vector& b) {
  require_same_len(a, b, "dot");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double sum(const Matrix& m) {
  double acc = 0.0;
  for (double v : m.values()) acc += v;
  return acc;
}

double mean(const Matrix& m) { return sum(m) / static_cast<double>(m.size()); }

double frobenius_norm(const Matrix& m) { return std::sqrt(trace_prod(m, m)); }

double norm2(const Vector& v) { return std::sqrt(dot(v, v)); }

double max_abs_diff(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "max_abs_diff");
  double worst = 0.0;
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t k = 0; k < av.size(); ++k)
    worst = std::max(worst, std::abs(av[k] - bv[k]));
  return worst;
}

double max_abs_diff(const Vector& a, const Vector& b) {
  require_same_len(a, b, "max_abs_diff");
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
  return worst;
}

double max_asymmetry(const Matrix& m) {
  if (!m.is_square()) throw ShapeError("max_asymmetry: matrix is not square");
  double worst = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j)
      worst = std::max(worst, std::abs(m(i, j) - m(j, i)));
  return worst;
}

bool is_nonnegative(const Matrix& m) {
  for (double v : m.values())
    if (!(v >= 0.0)) return false;
  return true;
}

bool is_nonnegative(const Vector& v) {
  for (double x : v.values())
    if (!(x >= 0.0)) return false;
  return true;
}

bool all_finite(const Matrix& m) {
  for (double v : m.values())
    if (!std::isfinite(v)) return false;
  return true;
}

bool all_finite(const Vector& v) {
  for (double x : v.values())
    if (!std::isfinite(x)) return false;
  return true;
}

Vector diag_of(const Matrix& m) {
  if (!m.is_square()) throw ShapeError("diag_of: matrix is not square");
  Vector d(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) d[i] = m(i, i);
  return d;
}

}  // namespace rnmf
