#pragma once

// Regularized non-negative matrix factorization Y ~ L R.
//
// Two alternating drivers share the objective in weights.hpp:
//   murnmf  multiplicative half-steps with numerators clipped to <= -epsilon
//   aurnmf  additive half-steps along the Lee-Seung direction with an exact
//           line search capped by the feasibility limit
//
// Each outer iteration updates L with R fixed, then R with the new L.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "rnmf/convergence.hpp"
#include "rnmf/matrix.hpp"
#include "rnmf/weights.hpp"

namespace rnmf {

struct FactorPair {
  Matrix l;  // rows(Y) x d
  Matrix r;  // d x cols(Y)
};

enum class Method { mur, aur };
enum class StepMode { optimal, full };

std::string_view to_string(Method m);
std::string_view to_string(StepMode m);
Method parse_method(std::string_view name);
StepMode parse_step_mode(std::string_view name);

struct NmfOptions {
  std::size_t rank = 1;
  std::variant<ScalarWeights, WeightConfig> weights = ScalarWeights{};
  Method method = Method::mur;
  // MUR numerator clip level; defaults to 1e-7 * mean(|Y|).
  std::optional<double> epsilon;
  double tau = 0.5;
  StepMode step_mode = StepMode::optimal;
  std::size_t max_iters = 5000;
  double rel_tol = 1e-9;
  std::uint64_t seed = 0;
  // Fraction of each random starting factor set to zero.
  double init_sparsity = 0.0;
  // Explicit starting pair; overrides random initialization.
  std::optional<FactorPair> init;
  // AUR only: build the step curvature from the first L2 term alone (the
  // ridge term under scalar weights), leaving out the orthogonality term.
  bool listing_curvature = false;

  void validate() const;
};

struct TraceRecord {
  std::size_t iter = 0;
  double objective = 0.0;
  double frob_error = 0.0;
  std::optional<double> alpha_l;             // AUR only
  std::optional<double> alpha_r;             // AUR only
  std::optional<std::size_t> clipped_count;  // MUR only
};

struct NmfResult {
  FactorPair factors;
  std::vector<TraceRecord> trace;
  SolveStatus status = SolveStatus::running;
};

// Uniform (0, 1) entries times `scale`, then round(sparsity * size) entries
// of each factor, chosen uniformly, set to zero. L is drawn before R.
FactorPair init_factors(std::size_t rows, std::size_t cols, std::size_t rank, std::uint64_t seed,
                        double sparsity, double scale = 1.0);

// Default starting scale sqrt(mean(Y) / d).
double init_scale(const Matrix& y, std::size_t rank);

// Default clip level 1e-7 * mean(|Y|).
double default_epsilon(const Matrix& y);

// Search direction H = -grad * x / f, except where f == 0:
//   x == 0  ->  max(-grad, 0)
//   x > 0   ->  -grad * x
Matrix pick_direction(const Matrix& x, const Matrix& grad, const Matrix& f);

WeightConfig resolve_weights(const NmfOptions& opts, FactorDims dims);

// Result of one half-step (L with R fixed, or R with L fixed).
struct HalfStep {
  Matrix x;
  double alpha = 0.0;       // AUR step length
  std::size_t clipped = 0;  // MUR numerator entries raised to -epsilon
  bool stalled = false;     // AUR: zero direction or zero step
};

struct AurParams {
  double tau_k = 0.75;
  StepMode mode = StepMode::optimal;
  bool listing_curvature = false;
};

// Half-step kernels over a fixed (Y, weights) pair. Holds W0R Y W0C.
class HalfStepper {
 public:
  HalfStepper(const Matrix& y, const WeightConfig& w);

  HalfStep mur_L(const Matrix& l, const Matrix& r, double epsilon) const;
  HalfStep mur_R(const Matrix& l, const Matrix& r, double epsilon) const;
  HalfStep aur_L(const Matrix& l, const Matrix& r, const AurParams& p) const;
  HalfStep aur_R(const Matrix& l, const Matrix& r, const AurParams& p) const;

 private:
  const WeightConfig& w_;
  Matrix yw_;
};

// running, converged (window of small relative decreases), stalled, or
// max_iters once trace.back().iter reaches the budget.
SolveStatus check_convergence(std::span<const TraceRecord> trace, const NmfOptions& opts,
                              bool stalled = false);

NmfResult murnmf(const Matrix& y, const NmfOptions& opts);
NmfResult aurnmf(const Matrix& y, const NmfOptions& opts);
// Dispatches on opts.method.
NmfResult factorize(const Matrix& y, const NmfOptions& opts);

}  // namespace rnmf
