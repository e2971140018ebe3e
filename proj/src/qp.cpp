#include "rnmf/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rnmf/random.hpp"

namespace rnmf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_len(const Vector& v, const QpProblem& qp, const char* what) {
  if (v.size() != qp.order()) {
    throw ShapeError(std::string(what) + ": length " + std::to_string(v.size()) +
                     " does not match problem order " + std::to_string(qp.order()));
  }
}

bool is_zero(const Vector& v) {
  return std::all_of(v.values().begin(), v.values().end(), [](double x) { return x == 0.0; });
}

// First-order optimality for x >= 0, relative to the size of the gradient terms.
bool satisfies_kkt(const Vector& x, const QpProblem& qp) {
  constexpr double tol = 1e-10;
  const Vector gx = qp.g * x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double grad = gx[i] + qp.d[i];
    const double slack = tol * (1.0 + std::abs(gx[i]) + std::abs(qp.d[i]));
    if (x[i] > 0.0 ? std::abs(grad) > slack : grad < -slack) return false;
  }
  return true;
}

}  // namespace

std::string_view to_string(StepStrategy s) {
  switch (s) {
    case StepStrategy::lee_seung: return "lee_seung";
    case StepStrategy::scaled_gradient: return "scaled_gradient";
    case StepStrategy::steepest_descent: return "steepest_descent";
    case StepStrategy::diag_precond: return "diag_precond";
  }
  return "unknown";
}

StepStrategy parse_step_strategy(std::string_view name) {
  if (name == "lee_seung") return StepStrategy::lee_seung;
  if (name == "scaled_gradient") return StepStrategy::scaled_gradient;
  if (name == "steepest" || name == "steepest_descent") return StepStrategy::steepest_descent;
  if (name == "diag_precond") return StepStrategy::diag_precond;
  throw ValidationError("unknown step strategy '" + std::string(name) + "'");
}

void QpSolveOptions::validate() const {
  if (max_iters < 1) throw ValidationError("max_iters must be at least 1");
  if (!(rel_tol > 0.0)) throw ValidationError("rel_tol must be positive");
  if (!(tau > 0.0 && tau < 1.0)) throw ValidationError("tau must lie in (0, 1)");
}

double tau_schedule(double tau) { return 0.5 * (tau + 1.0); }

Vector mult_step(const Vector& x, const QpProblem& qp) {
  require_len(x, qp, "mult_step");
  const Vector gx = qp.g * x;
  Vector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double den = gx[i];
    if (den < kDenominatorFloor) {
      if (x[i] * qp.d[i] == 0.0) {
        out[i] = 0.0;
        continue;
      }
      throw DegenerateDenominatorError(
          "mult_step: (G x)[" + std::to_string(i) + "] vanishes under a nonzero numerator", i);
    }
    out[i] = x[i] - x[i] * ((qp.d[i] + den) / den);
  }
  return out;
}

Vector b_step(const Vector& x, const Vector& b, const QpProblem& qp) {
  require_len(x, qp, "b_step");
  require_len(b, qp, "b_step");
  const Vector gx = qp.g * x;
  const Vector gb = qp.g * b;
  Vector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (gb[i] < kDenominatorFloor) {
      throw DegenerateDenominatorError("b_step: (G b)[" + std::to_string(i) + "] vanishes", i);
    }
    out[i] = x[i] - b[i] * ((qp.d[i] + gx[i]) / gb[i]);
  }
  return out;
}

Vector direction(const Vector& x, const QpProblem& qp, StepStrategy strategy) {
  require_len(x, qp, "direction");
  const Vector gx = qp.g * x;
  const std::size_t n = x.size();
  Vector h(n);
  double slope = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double grad = gx[i] + qp.d[i];
    double hi = 0.0;
    switch (strategy) {
      case StepStrategy::lee_seung:
        if (gx[i] != 0.0) {
          hi = -grad * x[i] / gx[i];
        } else if (x[i] == 0.0) {
          hi = std::max(-grad, 0.0);
        } else {
          hi = -grad * x[i];
        }
        break;
      case StepStrategy::scaled_gradient:
        hi = -grad * x[i];
        break;
      case StepStrategy::steepest_descent:
        hi = -grad;
        break;
      case StepStrategy::diag_precond: {
        const double gii = qp.g(i, i);
        if (gii > kDenominatorFloor) {
          hi = std::max(x[i] - grad / gii, 0.0) - x[i];
        } else {
          hi = (x[i] == 0.0 && grad > 0.0) ? 0.0 : -grad;
        }
        break;
      }
    }
    h[i] = hi;
    slope += hi * grad;
  }
  if (!(slope < 0.0)) return Vector(n, 0.0);
  return h;
}

StepLengths step_lengths(const Vector& x, const Vector& h, const QpProblem& qp) {
  require_len(x, qp, "step_lengths");
  require_len(h, qp, "step_lengths");
  double alpha_hat = kInf;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (h[i] < 0.0) alpha_hat = std::min(alpha_hat, -x[i] / h[i]);
  }
  const Vector gh = qp.g * h;
  const double curvature = dot(h, gh);
  const double slope = dot(qp.gradient(x), h);
  const double alpha_star = curvature > kDenominatorFloor ? -slope / curvature : kInf;
  if (std::isinf(alpha_hat) && std::isinf(alpha_star) && slope < 0.0) {
    throw UnboundedDescentError("step_lengths: objective is unbounded along the direction");
  }
  return {alpha_hat, alpha_star};
}

GiqpmStep giqpm_step(const Vector& x, const QpProblem& qp, double tau_k, StepStrategy strategy) {
  const Vector h = direction(x, qp, strategy);
  if (is_zero(h)) return {x, 0.0, true};
  const StepLengths len = step_lengths(x, h, qp);
  const double capped = tau_k * len.alpha_hat;
  // Ties go to alpha_star.
  const double alpha = len.alpha_star <= capped ? len.alpha_star : capped;
  if (!(alpha > 0.0)) return {x, 0.0, true};
  Vector next = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = x[i] + alpha * h[i];
    next[i] = h[i] < 0.0 ? std::max(v, 0.0) : v;
  }
  return {std::move(next), alpha, false};
}

QpSolveResult giqpm_solve(const QpProblem& qp, const QpSolveOptions& opts) {
  opts.validate();
  Vector x = [&] {
    if (opts.x0) {
      require_len(*opts.x0, qp, "giqpm_solve");
      if (!is_nonnegative(*opts.x0)) throw ValidationError("giqpm_solve: x0 must be >= 0");
      return *opts.x0;
    }
    Rng rng(opts.seed);
    Vector v(qp.order());
    for (double& e : v.values()) e = rng.uniform(0.5, 1.5);
    return v;
  }();

  const double tau_k = tau_schedule(opts.tau);
  std::vector<QpTraceRecord> trace;
  std::vector<double> objectives;
  trace.push_back({0, qp.value(x), std::numeric_limits<double>::quiet_NaN()});
  objectives.push_back(trace.back().objective);

  SolveStatus status = SolveStatus::max_iters;
  for (std::size_t k = 1; k <= opts.max_iters; ++k) {
    GiqpmStep step = giqpm_step(x, qp, tau_k, opts.strategy);
    if (step.stalled) {
      status = satisfies_kkt(x, qp) ? SolveStatus::converged : SolveStatus::stalled;
      break;
    }
    x = std::move(step.x);
    const double f = qp.value(x);
    if (!std::isfinite(f)) throw NumericError("giqpm_solve: non-finite objective", k);
    trace.push_back({k, f, step.alpha});
    objectives.push_back(f);
    if (window_converged(objectives, opts.rel_tol)) {
      status = SolveStatus::converged;
      break;
    }
  }
  return {std::move(x), std::move(trace), status};
}

}  // namespace rnmf
