#pragma once

#include <cstddef>
#include <vector>

#include "rnmf/matrix.hpp"
#include "rnmf/nmf.hpp"
#include "rnmf/weights.hpp"

namespace rnmf {

// A factor pair rescaled so every row of R sums to one and reordered so the
// column sums of L are non-increasing. L R is unchanged.
struct CanonicalForm {
  FactorPair factors;
  Vector scale;                    // diagonal of the applied rescaling, by output position
  std::vector<std::size_t> order;  // order[k] = input factor placed at position k
};

// Rows of R that sum to zero keep scale 1 and go last. Ties in L column sums
// keep their input order.
CanonicalForm canonicalize(const FactorPair& f);

// 1 - ||Y - LR||^2 / ||Y - 1 r0||^2, where r0 holds the column means of Y.
// Throws UndefinedMetricError when the baseline residual is zero.
double r_squared(const Matrix& y, const FactorPair& f);

// Same ratio with both residual energies measured as tr(E^T W0R E W0C).
double r_squared_weighted(const Matrix& y, const FactorPair& f, const WeightConfig& w);

double frobenius_error(const Matrix& y, const FactorPair& f);

}  // namespace rnmf
