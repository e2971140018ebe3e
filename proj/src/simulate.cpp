#include "rnmf/simulate.hpp"

#include "rnmf/random.hpp"

namespace rnmf {

namespace {

// splitmix64 finalizer, used to derive independent stream seeds.
std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kDenseStream = 0xd1;
constexpr std::uint64_t kSparseStream = 0x5a;

}  // namespace

Matrix synthetic_target(const ScenarioConfig& cfg) {
  const FactorPair truth = init_factors(cfg.rows, cfg.cols, cfg.true_rank, mix(cfg.seed), 0.0);
  return truth.l * truth.r;
}

FactorPair scenario_start(const ScenarioConfig& cfg, const Matrix& y, bool sparse) {
  const std::uint64_t stream = mix(cfg.seed ^ ((sparse ? kSparseStream : kDenseStream) << 32));
  return init_factors(cfg.rows, cfg.cols, cfg.fit_rank, stream,
                      sparse ? cfg.start_sparsity : 0.0, init_scale(y, cfg.fit_rank));
}

ScenarioResult run_scenario(const ScenarioConfig& cfg, const NmfOptions& base) {
  ScenarioResult out{synthetic_target(cfg), 0.0, {}};
  out.y_norm = frobenius_norm(out.y);
  std::vector<bool> starts{false};
  if (cfg.start_sparsity > 0.0) starts.push_back(true);
  for (bool sparse : starts) {
    const FactorPair start = scenario_start(cfg, out.y, sparse);
    for (Method m : {Method::mur, Method::aur}) {
      NmfOptions opts = base;
      opts.rank = cfg.fit_rank;
      opts.method = m;
      opts.init = start;
      out.runs.push_back({m, sparse, factorize(out.y, opts)});
    }
  }
  return out;
}

std::optional<std::size_t> iterations_to_reach(const std::vector<TraceRecord>& trace,
                                               double threshold) {
  for (const TraceRecord& t : trace) {
    if (t.frob_error <= threshold) return t.iter;
  }
  return std::nullopt;
}

}  // namespace rnmf
