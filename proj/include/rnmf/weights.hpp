#pragma once

// The regularized factorization objective
//
//   1/2 tr((Y - LR)^T W0R (Y - LR) W0C)
//     + tr(W1L^T L) + tr(W1R^T R)
//     + 1/2 sum_j tr(L^T W2RLj L W2CLj)
//     + 1/2 sum_j tr(R^T W2RRj R W2CRj)
//
// with its matrix-form gradients and the vectorized half-problem (G, d).

#include <cstddef>
#include <vector>

#include "rnmf/matrix.hpp"
#include "rnmf/qp_problem.hpp"

namespace rnmf {

// Shape of a factorization problem: Y is rows x cols, L is rows x rank,
// R is rank x cols.
struct FactorDims {
  std::size_t rows;
  std::size_t cols;
  std::size_t rank;
};

// A square, symmetric, non-negative weighting matrix. Diagonal weights
// (including the identity) are detected once and applied by scaling instead
// of a dense product.
class SquareWeight {
 public:
  explicit SquareWeight(Matrix m);

  const Matrix& matrix() const noexcept { return m_; }
  std::size_t order() const noexcept { return m_.rows(); }
  bool is_diagonal() const noexcept { return diagonal_; }
  bool is_identity() const noexcept { return identity_; }
  bool is_zero() const noexcept { return zero_; }

  // W * x
  Matrix left(const Matrix& x) const;
  // x * W
  Matrix right(const Matrix& x) const;

 private:
  Matrix m_;
  bool diagonal_ = false;
  bool identity_ = false;
  bool zero_ = false;
};

struct L2Term {
  SquareWeight row;
  SquareWeight col;
};

// Weights of the scalar (elastic net plus non-orthogonality) form.
struct ScalarWeights {
  double lambda1_l = 0.0;
  double lambda1_r = 0.0;
  double lambda2_l = 0.0;
  double lambda2_r = 0.0;
  double gamma2_l = 0.0;
  double gamma2_r = 0.0;

  // Throws ValidationError for negative or non-finite values.
  void validate() const;
};

// Above this order the eigenvalue PSD check on dense weights is skipped.
inline constexpr std::size_t kPsdCheckMaxOrder = 500;

class WeightConfig {
 public:
  // Validates non-negativity, symmetry (1e-12) and conformability with
  // `dims`. W0R and W0C must also be positive semidefinite (eigenvalue check
  // up to kPsdCheckMaxOrder, warning above). L2 weights may be indefinite, as
  // the off-diagonal orthogonality mask is. Throws ValidationError or
  // ShapeError.
  WeightConfig(FactorDims dims, Matrix w0r, Matrix w0c, Matrix w1l, Matrix w1r,
               std::vector<L2Term> l2_l, std::vector<L2Term> l2_r);

  // Identity loss weights, no regularization.
  static WeightConfig unregularized(FactorDims dims);

  const FactorDims& dims() const noexcept { return dims_; }
  const SquareWeight& w0r() const noexcept { return w0r_; }
  const SquareWeight& w0c() const noexcept { return w0c_; }
  const Matrix& w1l() const noexcept { return w1l_; }
  const Matrix& w1r() const noexcept { return w1r_; }
  const std::vector<L2Term>& l2_l() const noexcept { return l2_l_; }
  const std::vector<L2Term>& l2_r() const noexcept { return l2_r_; }

 private:
  FactorDims dims_;
  SquareWeight w0r_;
  SquareWeight w0c_;
  Matrix w1l_;
  Matrix w1r_;
  std::vector<L2Term> l2_l_;
  std::vector<L2Term> l2_r_;
};

// Expands the six scalars into the J = 2 configuration:
//   W0R = I, W0C = I, W1L = lambda1_l 1, W1R = lambda1_r 1,
//   L terms: (lambda2_l I, I), (I, gamma2_l (11^T - I))
//   R terms: (lambda2_r I, I), (gamma2_r (11^T - I), I)
// The rank-order mask multiplies L on the right and R on the left, so both
// penalties act on the Gram matrix of the d factors.
WeightConfig expand_scalar_weights(const ScalarWeights& s, FactorDims dims);

// sum_j Wrow_j X Wcol_j over the given terms.
Matrix apply_l2(const std::vector<L2Term>& terms, const Matrix& x);

double objective(const Matrix& y, const Matrix& l, const Matrix& r, const WeightConfig& w);

// W0R L (R W0C R^T) + sum_j W2RLj L W2CLj + W1L - W0R Y W0C R^T
Matrix gradient_L(const Matrix& y, const Matrix& l, const Matrix& r, const WeightConfig& w);
// (L^T W0R L) R W0C + sum_j W2RRj R W2CRj + W1R - L^T W0R Y W0C
Matrix gradient_R(const Matrix& y, const Matrix& l, const Matrix& r, const WeightConfig& w);

enum class Side { L, R };

struct QpBuildOptions {
  // Largest admissible order of G (rows * rank for side L).
  std::size_t max_order = 10000;
  // Singular-value threshold (relative) for the full-rank warning.
  double rank_tol = 1e-10;
};

// Vectorized half-problem in vec(X) for X = L (side L, R fixed) or X = R
// (side R, L fixed). The fixed factor is the one not being solved for.
QpProblem build_qp(const Matrix& y, const Matrix& l, const Matrix& r, Side side,
                   const WeightConfig& w, const QpBuildOptions& opts = {});

}  // namespace rnmf
