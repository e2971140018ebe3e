#pragma once

// Command implementations behind the `rnmf` executable. Each command reads
// its inputs, runs, and publishes all outputs at once; on failure nothing is
// written and a nonzero status is returned.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

#include "rnmf/io.hpp"
#include "rnmf/nmf.hpp"
#include "rnmf/qp.hpp"
#include "rnmf/weights.hpp"

namespace rnmf::cli {

enum class Command { factorize, simulate, qp };

struct RunConfig {
  Command command = Command::factorize;
  std::filesystem::path output_dir = ".";

  // factorize
  std::filesystem::path input;
  io::MatrixFormat input_format = io::MatrixFormat::dense_csv;
  std::optional<io::Shape> input_shape;
  bool row_normalize = false;

  // factorization options (factorize and simulate)
  std::size_t rank = 2;
  Method method = Method::aur;
  ScalarWeights weights;
  std::optional<double> epsilon;
  double tau = 0.5;
  StepMode step_mode = StepMode::optimal;
  std::optional<std::size_t> max_iters;  // 5000 for factorize, 2000 for simulate
  double tol = 1e-9;
  std::uint64_t seed = 1;
  double init_sparsity = 0.0;

  // simulate
  std::size_t sim_rows = 30;
  std::size_t sim_cols = 8;
  std::size_t true_rank = 2;
  std::optional<std::size_t> fit_rank;  // defaults to true_rank
  std::size_t replicates = 1;

  // qp
  std::filesystem::path gram;
  std::filesystem::path linear;
  std::optional<std::filesystem::path> x0;
  StepStrategy strategy = StepStrategy::lee_seung;
};

int cmd_factorize(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_qp(const RunConfig& cfg, std::ostream& out, std::ostream& err);

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace rnmf::cli
