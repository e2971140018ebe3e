#include "rnmf/cli.hpp"

#include <ostream>
#include <string>

#include "rnmf/postprocess.hpp"
#include "rnmf/simulate.hpp"

namespace rnmf::cli {

namespace {

NmfOptions nmf_options(const RunConfig& cfg, std::size_t default_iters) {
  NmfOptions opts;
  opts.rank = cfg.rank;
  opts.weights = cfg.weights;
  opts.method = cfg.method;
  opts.epsilon = cfg.epsilon;
  opts.tau = cfg.tau;
  opts.step_mode = cfg.step_mode;
  opts.max_iters = cfg.max_iters.value_or(default_iters);
  opts.rel_tol = cfg.tol;
  opts.seed = cfg.seed;
  opts.init_sparsity = cfg.init_sparsity;
  opts.validate();
  return opts;
}

void normalize_rows(Matrix& y) {
  for (std::size_t i = 0; i < y.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < y.cols(); ++j) s += y(i, j);
    if (s > 0.0)
      for (std::size_t j = 0; j < y.cols(); ++j) y(i, j) /= s;
  }
}

std::string threshold_text(const std::optional<std::size_t>& it) {
  return it ? std::to_string(*it) : std::string("never");
}

std::string run_label(const ScenarioRun& run) {
  return std::string(to_string(run.method)) + (run.sparse_start ? "_sparse" : "_dense");
}

template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    err << "rnmf: error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

int cmd_factorize(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    Matrix y = io::load_matrix(cfg.input, cfg.input_format, cfg.input_shape);
    io::require_nonnegative(y, "input matrix");
    if (cfg.row_normalize) normalize_rows(y);
    const NmfOptions opts = nmf_options(cfg, 5000);

    const NmfResult res = factorize(y, opts);
    const CanonicalForm canon = canonicalize(res.factors);
    const TraceRecord& last = res.trace.back();

    io::KeyValueReport report;
    report.add("method", std::string(to_string(opts.method)));
    report.add("rank", opts.rank);
    report.add("rows", y.rows());
    report.add("cols", y.cols());
    report.add("seed", std::to_string(opts.seed));
    report.add("iterations", last.iter);
    report.add("status", std::string(to_string(res.status)));
    report.add("objective", last.objective);
    report.add("frob_error", last.frob_error);
    try {
      report.add("r_squared", r_squared(y, canon.factors));
    } catch (const UndefinedMetricError&) {
      report.add("r_squared", std::string("undefined"));
    }

    io::OutputBatch batch(cfg.output_dir);
    batch.add("factors_L.csv", io::to_csv(canon.factors.l));
    batch.add("factors_R.csv", io::to_csv(canon.factors.r));
    batch.add("trace.csv", io::trace_csv(res.trace));
    batch.add("summary.txt", report.str());
    batch.commit();
    out << report.str();
    return 0;
  });
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (cfg.replicates < 1) throw ValidationError("replicates must be at least 1");
    NmfOptions base = nmf_options(cfg, 2000);
    base.init_sparsity = 0.0;  // the scenario draws its own starts

    io::OutputBatch batch(cfg.output_dir);
    io::KeyValueReport report;
    for (std::size_t rep = 0; rep < cfg.replicates; ++rep) {
      ScenarioConfig sc;
      sc.rows = cfg.sim_rows;
      sc.cols = cfg.sim_cols;
      sc.true_rank = cfg.true_rank;
      sc.fit_rank = cfg.fit_rank.value_or(cfg.true_rank);
      sc.start_sparsity = cfg.init_sparsity;
      sc.seed = cfg.seed + rep;

      const ScenarioResult res = run_scenario(sc, base);
      const std::filesystem::path sub =
          cfg.replicates == 1 ? std::filesystem::path{}
                              : std::filesystem::path("seed_" + std::to_string(sc.seed));
      const std::string prefix =
          cfg.replicates == 1 ? std::string{} : "seed_" + std::to_string(sc.seed) + ".";
      report.add(prefix + "y_norm", res.y_norm);
      for (const ScenarioRun& run : res.runs) {
        const std::string label = run_label(run);
        batch.add(sub / ("trace_" + label + ".csv"), io::trace_csv(run.result.trace));
        const auto& trace = run.result.trace;
        report.add(prefix + label + ".status", std::string(to_string(run.result.status)));
        report.add(prefix + label + ".iterations", trace.back().iter);
        report.add(prefix + label + ".final_frob_error", trace.back().frob_error);
        report.add(prefix + label + ".iters_to_1e-2",
                   threshold_text(iterations_to_reach(trace, 1e-2 * res.y_norm)));
        report.add(prefix + label + ".iters_to_1e-3",
                   threshold_text(iterations_to_reach(trace, 1e-3 * res.y_norm)));
      }
    }
    batch.add("comparison.txt", report.str());
    batch.commit();
    out << report.str();
    return 0;
  });
}

int cmd_qp(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    Matrix g = io::load_matrix(cfg.gram, io::MatrixFormat::dense_csv);
    Vector d = io::load_vector(cfg.linear);
    QpProblem qp(std::move(g), std::move(d));
    validate_qp(qp, 1e-9);

    QpSolveOptions opts;
    opts.max_iters = cfg.max_iters.value_or(1000);
    opts.rel_tol = cfg.tol;
    opts.tau = cfg.tau;
    opts.strategy = cfg.strategy;
    opts.seed = cfg.seed;
    if (cfg.x0) opts.x0 = io::load_vector(*cfg.x0);

    const QpSolveResult res = giqpm_solve(qp, opts);

    io::KeyValueReport report;
    report.add("strategy", std::string(to_string(opts.strategy)));
    report.add("status", std::string(to_string(res.status)));
    report.add("iterations", res.trace.back().iter);
    report.add("objective", res.trace.back().objective);

    io::OutputBatch batch(cfg.output_dir);
    batch.add("solution.csv", io::to_csv(res.x));
    batch.add("qp_trace.csv", io::qp_trace_csv(res.trace));
    batch.add("summary.txt", report.str());
    batch.commit();
    out << report.str();
    return 0;
  });
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  switch (cfg.command) {
    case Command::factorize: return cmd_factorize(cfg, out, err);
    case Command::simulate: return cmd_simulate(cfg, out, err);
    case Command::qp: return cmd_qp(cfg, out, err);
  }
  return 1;
}

}  // namespace rnmf::cli
