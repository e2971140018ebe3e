#include "rnmf/qp_problem.hpp"

#include <string>
#include <utility>

namespace rnmf {

QpProblem::QpProblem(Matrix gram, Vector linear, double c)
    : g(std::move(gram)), d(std::move(linear)), constant(c) {
  if (!g.is_square() || g.rows() != d.size()) {
    throw ShapeError("QpProblem: G is " + std::to_string(g.rows()) + "x" +
                     std::to_string(g.cols()) + " but d has length " + std::to_string(d.size()));
  }
}

double QpProblem::value(const Vector& x) const { return 0.5 * dot(x, g * x) + dot(d, x); }

Vector QpProblem::gradient(const Vector& x) const { return g * x + d; }

void validate_qp(const QpProblem& qp, double symmetry_tol) {
  if (!all_finite(qp.g) || !all_finite(qp.d)) throw ValidationError("QP has non-finite entries");
  const double asym = max_asymmetry(qp.g);
  if (asym > symmetry_tol) {
    throw ValidationError("G is not symmetric (max asymmetry " + std::to_string(asym) + ")");
  }
  if (!is_nonnegative(qp.g)) throw ValidationError("G has negative entries");
}

}  // namespace rnmf
