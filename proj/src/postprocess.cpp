#include "rnmf/postprocess.hpp"

#include <algorithm>
#include <numeric>

namespace rnmf {

namespace {

void require_conformable(const Matrix& y, const FactorPair& f) {
  if (f.l.cols() != f.r.rows() || f.l.rows() != y.rows() || f.r.cols() != y.cols()) {
    throw ShapeError("factor pair does not conform with Y");
  }
}

Matrix column_mean_baseline(const Matrix& y) {
  Matrix base(y.rows(), y.cols());
  for (std::size_t j = 0; j < y.cols(); ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < y.rows(); ++i) acc += y(i, j);
    const double m = acc / static_cast<double>(y.rows());
    for (std::size_t i = 0; i < y.rows(); ++i) base(i, j) = m;
  }
  return base;
}

}  // namespace

CanonicalForm canonicalize(const FactorPair& f) {
  if (f.l.cols() != f.r.rows()) throw ShapeError("canonicalize: L and R do not conform");
  const std::size_t d = f.r.rows();

  std::vector<double> row_sum(d, 0.0);
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t j = 0; j < f.r.cols(); ++j) row_sum[k] += f.r(k, j);

  std::vector<double> scale(d, 1.0);
  std::vector<bool> degenerate(d, false);
  for (std::size_t k = 0; k < d; ++k) {
    if (row_sum[k] > 0.0) {
      scale[k] = row_sum[k];
    } else {
      degenerate[k] = true;
    }
  }

  // Column sums of the rescaled L.
  std::vector<double> col_sum(d, 0.0);
  for (std::size_t i = 0; i < f.l.rows(); ++i)
    for (std::size_t k = 0; k < d; ++k) col_sum[k] += f.l(i, k) * scale[k];

  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (degenerate[a] != degenerate[b]) return !degenerate[a];
    if (degenerate[a]) return false;
    return col_sum[a] > col_sum[b];
  });

  CanonicalForm out{{Matrix(f.l.rows(), d), Matrix(d, f.r.cols())}, Vector(d), order};
  for (std::size_t pos = 0; pos < d; ++pos) {
    const std::size_t k = order[pos];
    out.scale[pos] = scale[k];
    for (std::size_t i = 0; i < f.l.rows(); ++i) out.factors.l(i, pos) = f.l(i, k) * scale[k];
    for (std::size_t j = 0; j < f.r.cols(); ++j) out.factors.r(pos, j) = f.r(k, j) / scale[k];
  }
  return out;
}

double r_squared(const Matrix& y, const FactorPair& f) {
  require_conformable(y, f);
  const Matrix resid = y - f.l * f.r;
  const Matrix base = y - column_mean_baseline(y);
  const double denom = trace_prod(base, base);
  if (!(denom > 0.0)) {
    throw UndefinedMetricError("r_squared: Y has no variation around its column means");
  }
  return 1.0 - trace_prod(resid, resid) / denom;
}

double r_squared_weighted(const Matrix& y, const FactorPair& f, const WeightConfig& w) {
  require_conformable(y, f);
  auto energy = [&](const Matrix& e) { return trace_prod(e, w.w0c().right(w.w0r().left(e))); };
  const double denom = energy(y - column_mean_baseline(y));
  if (!(denom > 0.0)) {
    throw UndefinedMetricError("r_squared_weighted: weighted baseline residual is zero");
  }
  return 1.0 - energy(y - f.l * f.r) / denom;
}

double frobenius_error(const Matrix& y, const FactorPair& f) {
  require_conformable(y, f);
  return frobenius_norm(y - f.l * f.r);
}

}  // namespace rnmf
