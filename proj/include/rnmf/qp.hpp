#pragma once

// Iterative solvers for min 1/2 x^T G x + d^T x subject to x >= 0, with G
// symmetric, elementwise non-negative and positive semidefinite.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "rnmf/convergence.hpp"
#include "rnmf/qp_problem.hpp"

namespace rnmf {

enum class StepStrategy {
  lee_seung,         // -grad * x / (G x)
  scaled_gradient,   // -grad * x
  steepest_descent,  // -grad
  diag_precond,      // projected Jacobi step: (x - grad / diag(G))_+ - x
};

std::string_view to_string(StepStrategy s);
// Accepts "lee_seung", "scaled_gradient", "steepest", "steepest_descent",
// "diag_precond". Throws ValidationError otherwise.
StepStrategy parse_step_strategy(std::string_view name);

// Denominators below this are treated as zero by the multiplicative steps.
inline constexpr double kDenominatorFloor = 1e-300;

struct QpSolveOptions {
  std::size_t max_iters = 1000;
  double rel_tol = 1e-9;
  double tau = 0.5;
  StepStrategy strategy = StepStrategy::lee_seung;
  std::uint64_t seed = 0;
  // Starting point; drawn uniform on [0.5, 1.5) from `seed` when absent.
  std::optional<Vector> x0;

  void validate() const;
};

// Step fraction used for every iteration: (tau + 1) / 2.
double tau_schedule(double tau);

// x' = -x * d / (G x), evaluated as x - x * (d + G x) / (G x). Entries with
// G x below kDenominatorFloor map to 0 when x[i] * d[i] == 0 and raise
// DegenerateDenominatorError otherwise.
Vector mult_step(const Vector& x, const QpProblem& qp);

// x' = x - Diag(b) Diag(G b)^-1 (d + G x). Raises DegenerateDenominatorError
// when an entry of G b is below kDenominatorFloor.
Vector b_step(const Vector& x, const Vector& b, const QpProblem& qp);

// Descent direction for `strategy`, or all zeros when none exists.
Vector direction(const Vector& x, const QpProblem& qp, StepStrategy strategy);

struct StepLengths {
  double alpha_hat;   // largest feasible step; +inf when nothing binds
  double alpha_star;  // exact line minimizer; +inf when h^T G h vanishes
};

// Requires h != 0. Throws UnboundedDescentError when both lengths are
// infinite along a descent direction.
StepLengths step_lengths(const Vector& x, const Vector& h, const QpProblem& qp);

struct GiqpmStep {
  Vector x;
  double alpha = 0.0;
  bool stalled = false;
};

// One projected step x + min(tau_k * alpha_hat, alpha_star) h.
GiqpmStep giqpm_step(const Vector& x, const QpProblem& qp, double tau_k, StepStrategy strategy);

struct QpTraceRecord {
  std::size_t iter;
  double objective;
  double alpha;  // NaN for the initial record
};

struct QpSolveResult {
  Vector x;
  std::vector<QpTraceRecord> trace;
  SolveStatus status;
};

// A step with no progress ends the solve: converged if x satisfies the
// optimality conditions of the constrained problem, stalled otherwise.
QpSolveResult giqpm_solve(const QpProblem& qp, const QpSolveOptions& opts);

}  // namespace rnmf
