#pragma once

// Synthetic convergence studies: factor an exactly low-rank Y = L R with
// both drivers from a common starting pair and compare error traces.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "rnmf/matrix.hpp"
#include "rnmf/nmf.hpp"

namespace rnmf {

struct ScenarioConfig {
  std::size_t rows = 30;
  std::size_t cols = 8;
  std::size_t true_rank = 2;
  std::size_t fit_rank = 2;
  // When positive, sparse starts with this zero fraction are run in
  // addition to the dense start.
  double start_sparsity = 0.0;
  std::uint64_t seed = 1;
};

struct ScenarioRun {
  Method method;
  bool sparse_start;
  NmfResult result;
};

struct ScenarioResult {
  Matrix y;
  double y_norm;
  std::vector<ScenarioRun> runs;  // (mur, aur) for dense, then for sparse
};

// Y from seeded uniform (0, 1) factors of `true_rank`.
Matrix synthetic_target(const ScenarioConfig& cfg);

// Starting pair for the scenario; dense and sparse starts use separate
// streams derived from the seed.
FactorPair scenario_start(const ScenarioConfig& cfg, const Matrix& y, bool sparse);

// `base` supplies everything but rank, method and init, which the scenario
// sets per run.
ScenarioResult run_scenario(const ScenarioConfig& cfg, const NmfOptions& base);

// First iteration whose frob_error is at or below `threshold`.
std::optional<std::size_t> iterations_to_reach(const std::vector<TraceRecord>& trace,
                                               double threshold);

}  // namespace rnmf
