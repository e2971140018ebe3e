#include "rnmf/weights.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <utility>

#include "rnmf/log.hpp"

namespace rnmf {

namespace {

Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

std::string shape_of(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_shape(const Matrix& m, std::size_t rows, std::size_t cols, const std::string& name) {
  if (m.rows() != rows || m.cols() != cols) {
    throw ShapeError(name + " is " + shape_of(m) + ", expected " + std::to_string(rows) +
                     "x" + std::to_string(cols));
  }
}

void require_nonnegative(const Matrix& m, const std::string& name) {
  if (!is_nonnegative(m)) throw ValidationError(name + " has negative or NaN entries");
}

void validate_square_weight(const SquareWeight& w, std::size_t order, const std::string& name,
                            bool require_psd) {
  require_shape(w.matrix(), order, order, name);
  require_nonnegative(w.matrix(), name);
  if (w.is_diagonal()) return;  // non-negative diagonal: symmetric and PSD
  if (max_asymmetry(w.matrix()) > 1e-12) throw ValidationError(name + " is not symmetric");
  if (!require_psd) return;
  if (order > kPsdCheckMaxOrder) {
    warn(name + ": order " + std::to_string(order) +
         " exceeds the PSD check limit; positive semidefiniteness is assumed");
    return;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(w.matrix()),
                                                    Eigen::EigenvaluesOnly);
  const double floor = -1e-8 * frobenius_norm(w.matrix());
  if (es.eigenvalues().minCoeff() < floor) {
    throw ValidationError(name + " is not positive semidefinite (min eigenvalue " +
                          std::to_string(es.eigenvalues().minCoeff()) + ")");
  }
}

void check_conformable(const Matrix& y, const Matrix& l, const Matrix& r, const WeightConfig& w) {
  const FactorDims& d = w.dims();
  require_shape(y, d.rows, d.cols, "Y");
  require_shape(l, d.rows, d.rank, "L");
  require_shape(r, d.rank, d.cols, "R");
}

double l2_penalty(const std::vector<L2Term>& terms, const Matrix& x) {
  return 0.5 * trace_prod(x, apply_l2(terms, x));
}

// 1/2 tr(Y^T W0R Y W0C)
double y_only_term(const Matrix& y, const WeightConfig& w) {
  return 0.5 * trace_prod(y, w.w0c().right(w.w0r().left(y)));
}

void warn_if_rank_deficient(const Matrix& fixed, std::size_t rank, double tol, const char* name) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(fixed));
  const auto& sv = svd.singularValues();
  const double top = sv.size() ? sv(0) : 0.0;
  std::size_t numerical_rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol * top && sv(i) > 0.0) ++numerical_rank;
  if (numerical_rank < rank) {
    warn(std::string("build_qp: fixed factor ") + name + " has numerical rank " +
         std::to_string(numerical_rank) + " < " + std::to_string(rank));
  }
}

}  // namespace

// ------------------------------------------------------------ SquareWeight

SquareWeight::SquareWeight(Matrix m) : m_(std::move(m)) {
  if (!m_.is_square()) throw ShapeError("weight matrix must be square, got " + shape_of(m_));
  diagonal_ = true;
  identity_ = true;
  zero_ = true;
  for (std::size_t i = 0; i < m_.rows(); ++i)
    for (std::size_t j = 0; j < m_.cols(); ++j) {
      const double v = m_(i, j);
      if (v != 0.0) zero_ = false;
      if (i != j && v != 0.0) diagonal_ = false;
      if (v != (i == j ? 1.0 : 0.0)) identity_ = false;
    }
}

Matrix SquareWeight::left(const Matrix& x) const {
  if (x.rows() != order()) throw ShapeError("weight order does not match left operand");
  if (identity_) return x;
  if (!diagonal_) return m_ * x;
  Matrix out = x;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double s = m_(i, i);
    for (std::size_t j = 0; j < x.cols(); ++j) out(i, j) *= s;
  }
  return out;
}

Matrix SquareWeight::right(const Matrix& x) const {
  if (x.cols() != order()) throw ShapeError("weight order does not match right operand");
  if (identity_) return x;
  if (!diagonal_) return x * m_;
  Matrix out = x;
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) out(i, j) *= m_(j, j);
  return out;
}

// ------------------------------------------------------------ configs

void ScalarWeights::validate() const {
  const double all[] = {lambda1_l, lambda1_r, lambda2_l, lambda2_r, gamma2_l, gamma2_r};
  for (double v : all) {
    if (!std::isfinite(v) || v < 0.0) {
      throw ValidationError("scalar weights must be finite and non-negative");
    }
  }
}

WeightConfig::WeightConfig(FactorDims dims, Matrix w0r, Matrix w0c, Matrix w1l, Matrix w1r,
                           std::vector<L2Term> l2_l, std::vector<L2Term> l2_r)
    : dims_(dims),
      w0r_(std::move(w0r)),
      w0c_(std::move(w0c)),
      w1l_(std::move(w1l)),
      w1r_(std::move(w1r)),
      l2_l_(std::move(l2_l)),
      l2_r_(std::move(l2_r)) {
  if (dims.rows == 0 || dims.cols == 0 || dims.rank == 0) {
    throw ShapeError("factor dimensions must be positive");
  }
  validate_square_weight(w0r_, dims.rows, "W0R", true);
  validate_square_weight(w0c_, dims.cols, "W0C", true);
  require_shape(w1l_, dims.rows, dims.rank, "W1L");
  require_shape(w1r_, dims.rank, dims.cols, "W1R");
  require_nonnegative(w1l_, "W1L");
  require_nonnegative(w1r_, "W1R");
  for (std::size_t j = 0; j < l2_l_.size(); ++j) {
    validate_square_weight(l2_l_[j].row, dims.rows, "W2RL" + std::to_string(j + 1), false);
    validate_square_weight(l2_l_[j].col, dims.rank, "W2CL" + std::to_string(j + 1), false);
  }
  for (std::size_t j = 0; j < l2_r_.size(); ++j) {
    validate_square_weight(l2_r_[j].row, dims.rank, "W2RR" + std::to_string(j + 1), false);
    validate_square_weight(l2_r_[j].col, dims.cols, "W2CR" + std::to_string(j + 1), false);
  }
}

WeightConfig WeightConfig::unregularized(FactorDims dims) {
  return WeightConfig(dims, Matrix::identity(dims.rows), Matrix::identity(dims.cols),
                      Matrix(dims.rows, dims.rank), Matrix(dims.rank, dims.cols), {}, {});
}

WeightConfig expand_scalar_weights(const ScalarWeights& s, FactorDims dims) {
  s.validate();
  const std::size_t n = dims.rows, m = dims.cols, d = dims.rank;
  std::vector<L2Term> l_terms;
  l_terms.push_back({SquareWeight(s.lambda2_l * Matrix::identity(n)),
                     SquareWeight(Matrix::identity(d))});
  l_terms.push_back({SquareWeight(Matrix::identity(n)),
                     SquareWeight(s.gamma2_l * Matrix::offdiag_mask(d))});
  std::vector<L2Term> r_terms;
  r_terms.push_back({SquareWeight(s.lambda2_r * Matrix::identity(d)),
                     SquareWeight(Matrix::identity(m))});
  r_terms.push_back({SquareWeight(s.gamma2_r * Matrix::offdiag_mask(d)),
                     SquareWeight(Matrix::identity(m))});
  return WeightConfig(dims, Matrix::identity(n), Matrix::identity(m),
                      Matrix(n, d, s.lambda1_l), Matrix(d, m, s.lambda1_r), std::move(l_terms),
                      std::move(r_terms));
}

// ------------------------------------------------------------ objective

Matrix apply_l2(const std::vector<L2Term>& terms, const Matrix& x) {
  Matrix acc(x.rows(), x.cols());
  for (const L2Term& t : terms) {
    if (t.row.is_zero() || t.col.is_zero()) continue;
    acc += t.col.right(t.row.left(x));
  }
  return acc;
}

double objective(const Matrix& y, const Matrix& l, const Matrix& r, const WeightConfig& w) {
  check_conformable(y, l, r, w);
  const Matrix resid = y - l * r;
  const double loss = 0.5 * trace_prod(resid, w.w0c().right(w.w0r().left(resid)));
  return loss + trace_prod(w.w1l(), l) + trace_prod(w.w1r(), r) + l2_penalty(w.l2_l(), l) +
         l2_penalty(w.l2_r(), r);
}

Matrix gradient_L(const Matrix& y, const Matrix& l, const Matrix& r, const WeightConfig& w) {
  check_conformable(y, l, r, w);
  const Matrix rt = r.transpose();
  const Matrix gram_r = r * w.w0c().left(rt);  // R W0C R^T
  Matrix g = w.w0r().left(l * gram_r);
  g += apply_l2(w.l2_l(), l);
  g += w.w1l();
  g -= w.w0c().right(w.w0r().left(y)) * rt;
  return g;
}

Matrix gradient_R(const Matrix& y, const Matrix& l, const Matrix& r, const WeightConfig& w) {
  check_conformable(y, l, r, w);
  const Matrix lt = l.transpose();
  const Matrix gram_l = lt * w.w0r().left(l);  // L^T W0R L
  Matrix g = w.w0c().right(gram_l * r);
  g += apply_l2(w.l2_r(), r);
  g += w.w1r();
  g -= lt * w.w0c().right(w.w0r().left(y));
  return g;
}

// ------------------------------------------------------------ vector form

QpProblem build_qp(const Matrix& y, const Matrix& l, const Matrix& r, Side side,
                   const WeightConfig& w, const QpBuildOptions& opts) {
  check_conformable(y, l, r, w);
  const FactorDims& dims = w.dims();
  const std::size_t order = side == Side::L ? dims.rows * dims.rank : dims.rank * dims.cols;
  if (order > opts.max_order) {
    throw CapacityError("build_qp: vectorized order " + std::to_string(order) +
                        " exceeds limit " + std::to_string(opts.max_order));
  }
  const Matrix yw = w.w0c().right(w.w0r().left(y));  // W0R Y W0C

  if (side == Side::L) {
    warn_if_rank_deficient(r, dims.rank, opts.rank_tol, "R");
    const Matrix gram_r = r * w.w0c().left(r.transpose());
    Matrix g = kron(gram_r, w.w0r().matrix());
    for (const L2Term& t : w.l2_l()) g += kron(t.col.matrix(), t.row.matrix());
    Vector d = vec(w.w1l()) - vec(yw * r.transpose());
    const double c = y_only_term(y, w) + trace_prod(w.w1r(), r) + l2_penalty(w.l2_r(), r);
    return QpProblem(std::move(g), std::move(d), c);
  }

  warn_if_rank_deficient(l, dims.rank, opts.rank_tol, "L");
  const Matrix gram_l = l.transpose() * w.w0r().left(l);
  Matrix g = kron(w.w0c().matrix(), gram_l);
  for (const L2Term& t : w.l2_r()) g += kron(t.col.matrix(), t.row.matrix());
  Vector d = vec(w.w1r()) - vec(l.transpose() * yw);
  const double c = y_only_term(y, w) + trace_prod(w.w1l(), l) + l2_penalty(w.l2_l(), l);
  return QpProblem(std::move(g), std::move(d), c);
}

}  // namespace rnmf
