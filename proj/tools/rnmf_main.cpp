// rnmf: regularized non-negative matrix factorization from the command line.
//
//   rnmf factorize --input Y.csv --rank 3 --method aur --out results/
//   rnmf simulate  --rows 40 --cols 10 --true-rank 3 --rank 4 --init-sparsity 0.3333
//   rnmf qp        --gram G.csv --linear d.csv --strategy lee_seung

#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "rnmf/cli.hpp"

namespace {

using rnmf::cli::RunConfig;

void add_factor_flags(CLI::App* app, RunConfig& cfg, std::string& method, std::string& step_mode,
                      double& epsilon) {
  app->add_option("--rank", cfg.rank, "Factorization rank d")->check(CLI::PositiveNumber);
  app->add_option("--method", method, "mur or aur")->check(CLI::IsMember({"mur", "aur"}));
  app->add_option("--l1-l", cfg.weights.lambda1_l, "L1 weight on L")->check(CLI::NonNegativeNumber);
  app->add_option("--l1-r", cfg.weights.lambda1_r, "L1 weight on R")->check(CLI::NonNegativeNumber);
  app->add_option("--l2-l", cfg.weights.lambda2_l, "L2 weight on L")->check(CLI::NonNegativeNumber);
  app->add_option("--l2-r", cfg.weights.lambda2_r, "L2 weight on R")->check(CLI::NonNegativeNumber);
  app->add_option("--ortho-l", cfg.weights.gamma2_l, "Non-orthogonality penalty on L")
      ->check(CLI::NonNegativeNumber);
  app->add_option("--ortho-r", cfg.weights.gamma2_r, "Non-orthogonality penalty on R")
      ->check(CLI::NonNegativeNumber);
  app->add_option("--epsilon", epsilon, "MUR numerator clip (default 1e-7 * mean|Y|)")
      ->check(CLI::PositiveNumber);
  app->add_option("--tau", cfg.tau, "AUR step fraction in (0,1)")
      ->check(CLI::Range(0.0, 1.0));
  app->add_option("--step-mode", step_mode, "AUR step: optimal or full")
      ->check(CLI::IsMember({"optimal", "full"}));
  app->add_option("--max-iters", cfg.max_iters, "Iteration budget")->check(CLI::PositiveNumber);
  app->add_option("--tol", cfg.tol, "Relative objective decrease tolerance")
      ->check(CLI::PositiveNumber);
  app->add_option("--seed", cfg.seed, "Random seed");
  app->add_option("--init-sparsity", cfg.init_sparsity, "Fraction of zeros in random starts")
      ->check(CLI::Range(0.0, 1.0));
  app->add_option("--out", cfg.output_dir, "Output directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regularized non-negative matrix factorization"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string method = "aur";
  std::string step_mode = "optimal";
  std::string format = "dense";
  std::string strategy = "lee_seung";
  double epsilon = 0.0;
  std::size_t shape_rows = 0, shape_cols = 0;

  auto* fact = app.add_subcommand("factorize", "Factor a non-negative matrix Y ~ L R");
  fact->add_option("--input", cfg.input, "Input matrix file")->required()->check(CLI::ExistingFile);
  fact->add_option("--format", format, "dense or triplet")
      ->check(CLI::IsMember({"dense", "triplet"}));
  fact->add_option("--shape-rows", shape_rows, "Declared rows for triplet input");
  fact->add_option("--shape-cols", shape_cols, "Declared columns for triplet input");
  fact->add_flag("--row-normalize", cfg.row_normalize, "Scale rows of Y to sum to one");
  add_factor_flags(fact, cfg, method, step_mode, epsilon);

  auto* sim = app.add_subcommand("simulate", "Compare MUR and AUR on a synthetic low-rank Y");
  sim->add_option("--rows", cfg.sim_rows, "Rows of Y")->check(CLI::PositiveNumber);
  sim->add_option("--cols", cfg.sim_cols, "Columns of Y")->check(CLI::PositiveNumber);
  sim->add_option("--true-rank", cfg.true_rank, "Rank of the generating factors")
      ->check(CLI::PositiveNumber);
  sim->add_option("--replicates", cfg.replicates, "Number of consecutive seeds")
      ->check(CLI::PositiveNumber);
  add_factor_flags(sim, cfg, method, step_mode, epsilon);

  auto* qp = app.add_subcommand("qp", "Solve min 1/2 x'Gx + d'x subject to x >= 0");
  qp->add_option("--gram", cfg.gram, "Dense CSV with G")->required()->check(CLI::ExistingFile);
  qp->add_option("--linear", cfg.linear, "Dense CSV with d")->required()->check(CLI::ExistingFile);
  qp->add_option("--x0", cfg.x0, "Starting point (default: seeded uniform)")
      ->check(CLI::ExistingFile);
  qp->add_option("--strategy", strategy, "lee_seung, scaled_gradient, steepest, diag_precond")
      ->check(CLI::IsMember({"lee_seung", "scaled_gradient", "steepest", "steepest_descent",
                             "diag_precond"}));
  qp->add_option("--tau", cfg.tau, "Step fraction in (0,1)")->check(CLI::Range(0.0, 1.0));
  qp->add_option("--max-iters", cfg.max_iters, "Iteration budget")->check(CLI::PositiveNumber);
  qp->add_option("--tol", cfg.tol, "Relative objective decrease tolerance")
      ->check(CLI::PositiveNumber);
  qp->add_option("--seed", cfg.seed, "Seed for the default starting point");
  qp->add_option("--out", cfg.output_dir, "Output directory");

  CLI11_PARSE(app, argc, argv);

  bool simulate_rank_given = false;
  if (*fact) {
    cfg.command = rnmf::cli::Command::factorize;
    cfg.input_format = rnmf::io::parse_matrix_format(format);
    if (shape_rows > 0 && shape_cols > 0) cfg.input_shape = rnmf::io::Shape{shape_rows, shape_cols};
  } else if (*sim) {
    cfg.command = rnmf::cli::Command::simulate;
    simulate_rank_given = sim->count("--rank") > 0;
  } else {
    cfg.command = rnmf::cli::Command::qp;
    cfg.strategy = rnmf::parse_step_strategy(strategy);
  }
  cfg.method = rnmf::parse_method(method);
  cfg.step_mode = rnmf::parse_step_mode(step_mode);
  if (epsilon > 0.0) cfg.epsilon = epsilon;
  if (cfg.command == rnmf::cli::Command::simulate) {
    cfg.fit_rank = simulate_rank_given ? std::optional<std::size_t>(cfg.rank) : std::nullopt;
  }

  return rnmf::cli::run(cfg, std::cout, std::cerr);
}
