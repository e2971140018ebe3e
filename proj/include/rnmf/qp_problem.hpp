#pragma once

#include "rnmf/matrix.hpp"

namespace rnmf {

// min 1/2 x^T G x + d^T x over x >= 0.
//
// `constant` is the part of the full factorization objective that does not
// depend on x (the Y-only term plus the fixed factor's penalties), so that
// value(x) + constant reproduces the matrix objective. Zero for problems
// that did not come from a factorization.
struct QpProblem {
  Matrix g;
  Vector d;
  double constant = 0.0;

  QpProblem(Matrix gram, Vector linear, double c = 0.0);

  std::size_t order() const noexcept { return d.size(); }

  // 1/2 x^T G x + d^T x (without `constant`).
  double value(const Vector& x) const;
  // G x + d.
  Vector gradient(const Vector& x) const;
};

// Throws ValidationError unless G is symmetric within `symmetry_tol` and
// elementwise non-negative.
void validate_qp(const QpProblem& qp, double symmetry_tol = 1e-12);

}  // namespace rnmf
