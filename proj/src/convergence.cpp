#include "rnmf/convergence.hpp"

#include <cmath>
#include <limits>

namespace rnmf {

std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::running: return "running";
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iters: return "max_iters";
    case SolveStatus::stalled: return "stalled";
  }
  return "unknown";
}

double relative_decrease(double prev, double cur) {
  const double scale = std::max(std::abs(prev), std::numeric_limits<double>::min());
  return (prev - cur) / scale;
}

bool window_converged(std::span<const double> objectives, double rel_tol) {
  if (objectives.size() < kConvergenceWindow + 1) return false;
  const std::size_t start = objectives.size() - kConvergenceWindow - 1;
  for (std::size_t k = start; k + 1 < objectives.size(); ++k) {
    if (!(relative_decrease(objectives[k], objectives[k + 1]) < rel_tol)) return false;
  }
  return true;
}

}  // namespace rnmf
