#pragma once

#include <cstddef>
#include <span>
#include <string_view>

namespace rnmf {

enum class SolveStatus { running, converged, max_iters, stalled };

std::string_view to_string(SolveStatus s);

// Number of consecutive small relative decreases needed to declare convergence.
inline constexpr std::size_t kConvergenceWindow = 5;

// (prev - cur) / |prev|, with |prev| floored at the smallest normal double.
double relative_decrease(double prev, double cur);

// True when each of the last kConvergenceWindow steps of `objectives`
// decreased the objective by less than `rel_tol` relative to its start.
bool window_converged(std::span<const double> objectives, double rel_tol);

}  // namespace rnmf
