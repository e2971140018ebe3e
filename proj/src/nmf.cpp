#include "rnmf/nmf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "rnmf/qp.hpp"
#include "rnmf/random.hpp"

namespace rnmf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void zero_random_subset(Matrix& m, double sparsity, Rng& rng) {
  const std::size_t n = m.size();
  const auto count = static_cast<std::size_t>(std::llround(sparsity * static_cast<double>(n)));
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  auto v = m.values();
  // Partial Fisher-Yates: the first `count` slots become a uniform subset.
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t j = k + rng.index(n - k);
    std::swap(idx[k], idx[j]);
    v[idx[k]] = 0.0;
  }
}

Matrix mur_update(const Matrix& x, Matrix numer, const Matrix& denom, double epsilon,
                  std::size_t& clipped) {
  clipped = 0;
  auto nv = numer.values();
  for (double& h : nv) {
    if (h > -epsilon) {
      h = -epsilon;
      ++clipped;
    }
  }
  Matrix out(x.rows(), x.cols());
  auto xv = x.values();
  auto dv = denom.values();
  auto ov = out.values();
  for (std::size_t k = 0; k < ov.size(); ++k) {
    if (dv[k] < kDenominatorFloor) {
      if (xv[k] == 0.0) {
        ov[k] = 0.0;
        continue;
      }
      throw DegenerateDenominatorError("multiplicative update: zero denominator at (" +
                                           std::to_string(k / x.cols()) + "," +
                                           std::to_string(k % x.cols()) + ")",
                                       k);
    }
    ov[k] = -xv[k] * nv[k] / dv[k];
  }
  return out;
}

// Shared tail of both AUR half-steps: ratio test, exact step along h with
// curvature tr(h^T k), and the clamped update.
HalfStep aur_finish(const Matrix& x, const Matrix& grad, const Matrix& h, const Matrix& k,
                    const AurParams& p) {
  double alpha_hat = kInf;
  auto xv = x.values();
  auto hv = h.values();
  bool any = false;
  for (std::size_t i = 0; i < hv.size(); ++i) {
    if (hv[i] != 0.0) any = true;
    if (hv[i] < 0.0) alpha_hat = std::min(alpha_hat, -xv[i] / hv[i]);
  }
  if (!any) return {x, 0.0, 0, true};

  const double slope = trace_prod(grad, h);
  if (!(slope < 0.0)) return {x, 0.0, 0, true};
  const double curvature = trace_prod(h, k);
  const double alpha_star = curvature > kDenominatorFloor ? -slope / curvature : kInf;
  if (std::isinf(alpha_hat) && std::isinf(alpha_star)) {
    throw UnboundedDescentError("additive update: objective unbounded along the direction");
  }
  const double capped = p.tau_k * alpha_hat;
  double alpha;
  if (p.mode == StepMode::full) {
    alpha = std::min(1.0, capped);
  } else {
    alpha = alpha_star <= capped ? alpha_star : capped;
  }
  if (!(alpha > 0.0)) return {x, 0.0, 0, true};

  Matrix next = x;
  auto nv = next.values();
  for (std::size_t i = 0; i < nv.size(); ++i) {
    const double v = xv[i] + alpha * hv[i];
    nv[i] = hv[i] < 0.0 ? std::max(v, 0.0) : v;
  }
  return {std::move(next), alpha, 0, false};
}

Matrix curvature_terms(const std::vector<L2Term>& terms, const Matrix& h, bool listing) {
  if (!listing || terms.size() <= 1) return apply_l2(terms, h);
  return apply_l2(std::vector<L2Term>(terms.begin(), terms.begin() + 1), h);
}

double frob_error_of(const Matrix& y, const FactorPair& f) {
  return frobenius_norm(y - f.l * f.r);
}

void check_finite(const FactorPair& f, std::size_t iter) {
  if (!all_finite(f.l) || !all_finite(f.r)) {
    throw NumericError("non-finite factor entry at iteration " + std::to_string(iter), iter);
  }
}

enum class Driver { mur, aur };

NmfResult run(const Matrix& y, const NmfOptions& opts, Driver driver) {
  opts.validate();
  if (!all_finite(y)) throw ValidationError("Y has non-finite entries");
  if (!is_nonnegative(y)) throw ValidationError("Y must be elementwise non-negative");
  const FactorDims dims{y.rows(), y.cols(), opts.rank};
  const WeightConfig w = resolve_weights(opts, dims);

  FactorPair f = opts.init ? *opts.init
                           : init_factors(dims.rows, dims.cols, dims.rank, opts.seed,
                                          opts.init_sparsity, init_scale(y, dims.rank));
  if (f.l.rows() != dims.rows || f.l.cols() != dims.rank || f.r.rows() != dims.rank ||
      f.r.cols() != dims.cols) {
    throw ShapeError("initial factors do not conform with Y and the rank");
  }
  if (!is_nonnegative(f.l) || !is_nonnegative(f.r)) {
    throw ValidationError("initial factors must be non-negative");
  }

  const double epsilon = opts.epsilon.value_or(default_epsilon(y));
  const AurParams aur{tau_schedule(opts.tau), opts.step_mode, opts.listing_curvature};
  const HalfStepper stepper(y, w);

  NmfResult result{f, {}, SolveStatus::running};
  result.trace.push_back({0, objective(y, f.l, f.r, w), frob_error_of(y, f), {}, {}, {}});

  for (std::size_t k = 1; k <= opts.max_iters; ++k) {
    TraceRecord rec;
    rec.iter = k;
    bool stalled = false;
    if (driver == Driver::mur) {
      HalfStep sl = stepper.mur_L(f.l, f.r, epsilon);
      f.l = std::move(sl.x);
      HalfStep sr = stepper.mur_R(f.l, f.r, epsilon);
      f.r = std::move(sr.x);
      rec.clipped_count = sl.clipped + sr.clipped;
    } else {
      HalfStep sl = stepper.aur_L(f.l, f.r, aur);
      f.l = std::move(sl.x);
      HalfStep sr = stepper.aur_R(f.l, f.r, aur);
      f.r = std::move(sr.x);
      rec.alpha_l = sl.alpha;
      rec.alpha_r = sr.alpha;
      stalled = sl.stalled && sr.stalled;
    }
    check_finite(f, k);
    rec.objective = objective(y, f.l, f.r, w);
    rec.frob_error = frob_error_of(y, f);
    if (!std::isfinite(rec.objective)) {
      throw NumericError("non-finite objective at iteration " + std::to_string(k), k);
    }
    result.trace.push_back(rec);
    const SolveStatus s = check_convergence(result.trace, opts, stalled);
    if (s != SolveStatus::running) {
      result.status = s;
      break;
    }
  }
  result.factors = std::move(f);
  return result;
}

}  // namespace

std::string_view to_string(Method m) { return m == Method::mur ? "mur" : "aur"; }
std::string_view to_string(StepMode m) { return m == StepMode::optimal ? "optimal" : "full"; }

Method parse_method(std::string_view name) {
  if (name == "mur") return Method::mur;
  if (name == "aur") return Method::aur;
  throw ValidationError("unknown method '" + std::string(name) + "' (expected mur or aur)");
}

StepMode parse_step_mode(std::string_view name) {
  if (name == "optimal") return StepMode::optimal;
  if (name == "full") return StepMode::full;
  throw ValidationError("unknown step mode '" + std::string(name) + "' (expected optimal or full)");
}

void NmfOptions::validate() const {
  if (rank < 1) throw ValidationError("rank must be at least 1");
  if (epsilon && !(*epsilon > 0.0 && std::isfinite(*epsilon))) {
    throw ValidationError("epsilon must be positive");
  }
  if (!(tau > 0.0 && tau < 1.0)) throw ValidationError("tau must lie in (0, 1)");
  if (max_iters < 1) throw ValidationError("max_iters must be at least 1");
  if (!(rel_tol > 0.0)) throw ValidationError("rel_tol must be positive");
  if (!(init_sparsity >= 0.0 && init_sparsity <= 1.0)) {
    throw ValidationError("init_sparsity must lie in [0, 1]");
  }
  if (const auto* s = std::get_if<ScalarWeights>(&weights)) s->validate();
}

FactorPair init_factors(std::size_t rows, std::size_t cols, std::size_t rank, std::uint64_t seed,
                        double sparsity, double scale) {
  if (!(sparsity >= 0.0 && sparsity <= 1.0)) {
    throw ValidationError("init_factors: sparsity must lie in [0, 1]");
  }
  Rng rng(seed);
  FactorPair f{Matrix(rows, rank), Matrix(rank, cols)};
  for (double& v : f.l.values()) v = scale * rng.uniform();
  for (double& v : f.r.values()) v = scale * rng.uniform();
  zero_random_subset(f.l, sparsity, rng);
  zero_random_subset(f.r, sparsity, rng);
  return f;
}

double init_scale(const Matrix& y, std::size_t rank) {
  const double m = mean(y);
  if (!(m > 0.0)) return 1.0;
  return std::sqrt(m / static_cast<double>(rank));
}

double default_epsilon(const Matrix& y) {
  double acc = 0.0;
  for (double v : y.values()) acc += std::abs(v);
  const double eps = 1e-7 * acc / static_cast<double>(y.size());
  return eps > 0.0 ? eps : std::numeric_limits<double>::min();
}

Matrix pick_direction(const Matrix& x, const Matrix& grad, const Matrix& f) {
  if (x.rows() != grad.rows() || x.cols() != grad.cols() || x.rows() != f.rows() ||
      x.cols() != f.cols()) {
    throw ShapeError("pick_direction: shape mismatch");
  }
  Matrix h(x.rows(), x.cols());
  auto xv = x.values();
  auto gv = grad.values();
  auto fv = f.values();
  auto hv = h.values();
  for (std::size_t k = 0; k < hv.size(); ++k) {
    if (fv[k] != 0.0) {
      hv[k] = -gv[k] * xv[k] / fv[k];
    } else if (xv[k] == 0.0) {
      hv[k] = std::max(-gv[k], 0.0);
    } else {
      hv[k] = -gv[k] * xv[k];
    }
  }
  return h;
}

WeightConfig resolve_weights(const NmfOptions& opts, FactorDims dims) {
  if (const auto* s = std::get_if<ScalarWeights>(&opts.weights)) {
    return expand_scalar_weights(*s, dims);
  }
  const auto& w = std::get<WeightConfig>(opts.weights);
  const FactorDims& wd = w.dims();
  if (wd.rows != dims.rows || wd.cols != dims.cols || wd.rank != dims.rank) {
    throw ShapeError("weight configuration was built for different dimensions");
  }
  return w;
}

// ------------------------------------------------------------ HalfStepper

HalfStepper::HalfStepper(const Matrix& y, const WeightConfig& w)
    : w_(w), yw_(w.w0c().right(w.w0r().left(y))) {}

HalfStep HalfStepper::mur_L(const Matrix& l, const Matrix& r, double epsilon) const {
  const Matrix rt = r.transpose();
  const Matrix gram_r = r * w_.w0c().left(rt);
  Matrix numer = w_.w1l() - yw_ * rt;
  Matrix denom = w_.w0r().left(l * gram_r) + apply_l2(w_.l2_l(), l);
  HalfStep out{Matrix(1, 1), 0.0, 0, false};
  out.x = mur_update(l, std::move(numer), denom, epsilon, out.clipped);
  return out;
}

HalfStep HalfStepper::mur_R(const Matrix& l, const Matrix& r, double epsilon) const {
  const Matrix lt = l.transpose();
  const Matrix gram_l = lt * w_.w0r().left(l);
  Matrix numer = w_.w1r() - lt * yw_;
  Matrix denom = w_.w0c().right(gram_l * r) + apply_l2(w_.l2_r(), r);
  HalfStep out{Matrix(1, 1), 0.0, 0, false};
  out.x = mur_update(r, std::move(numer), denom, epsilon, out.clipped);
  return out;
}

HalfStep HalfStepper::aur_L(const Matrix& l, const Matrix& r, const AurParams& p) const {
  const Matrix rt = r.transpose();
  const Matrix gram_r = r * w_.w0c().left(rt);
  const Matrix f = w_.w0r().left(l * gram_r) + apply_l2(w_.l2_l(), l);
  const Matrix grad = f + (w_.w1l() - yw_ * rt);
  const Matrix h = pick_direction(l, grad, f);
  const Matrix k =
      w_.w0r().left(h * gram_r) + curvature_terms(w_.l2_l(), h, p.listing_curvature);
  return aur_finish(l, grad, h, k, p);
}

HalfStep HalfStepper::aur_R(const Matrix& l, const Matrix& r, const AurParams& p) const {
  const Matrix lt = l.transpose();
  const Matrix gram_l = lt * w_.w0r().left(l);
  const Matrix f = w_.w0c().right(gram_l * r) + apply_l2(w_.l2_r(), r);
  const Matrix grad = f + (w_.w1r() - lt * yw_);
  const Matrix h = pick_direction(r, grad, f);
  const Matrix k =
      w_.w0c().right(gram_l * h) + curvature_terms(w_.l2_r(), h, p.listing_curvature);
  return aur_finish(r, grad, h, k, p);
}

// ------------------------------------------------------------ drivers

SolveStatus check_convergence(std::span<const TraceRecord> trace, const NmfOptions& opts,
                              bool stalled) {
  if (trace.empty()) return SolveStatus::running;
  if (stalled) return SolveStatus::stalled;
  std::vector<double> objectives;
  const std::size_t take = std::min(trace.size(), kConvergenceWindow + 1);
  for (std::size_t i = trace.size() - take; i < trace.size(); ++i) {
    objectives.push_back(trace[i].objective);
  }
  if (window_converged(objectives, opts.rel_tol)) return SolveStatus::converged;
  if (trace.back().iter >= opts.max_iters) return SolveStatus::max_iters;
  return SolveStatus::running;
}

NmfResult murnmf(const Matrix& y, const NmfOptions& opts) { return run(y, opts, Driver::mur); }

NmfResult aurnmf(const Matrix& y, const NmfOptions& opts) { return run(y, opts, Driver::aur); }

NmfResult factorize(const Matrix& y, const NmfOptions& opts) {
  return opts.method == Method::mur ? murnmf(y, opts) : aurnmf(y, opts);
}

}  // namespace rnmf
