// filtered-spectra <moments|density|solve|simulate|eliminate|verify|crosscheck|walkcheck> --config path [flags]

#include "commands.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <iostream>

namespace cli = fspectra::cli;

int main(int argc, char** argv) {
  CLI::App app{"Spectra of filtered Wigner matrices and colored Gaussian matrices", "filtered-spectra"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir = "out";
  std::uint64_t seed = 42;
  unsigned threads = 1;
  app.add_option("--config", config_path, "JSON config (kernel/filter/walk document or an object with sections)");
  app.add_option("--seed", seed, "Random seed")->capture_default_str();
  app.add_option("--threads", threads, "Worker threads (FS_THREADS overrides)")->capture_default_str();
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();

  cli::MomentsArgs margs;
  auto* moments = app.add_subcommand("moments", "Limit moments m_1..m_kmax");
  moments->add_option("--kmax", margs.kmax, "Largest moment order");
  moments->add_flag("--exact", margs.exact, "Exact rational arithmetic");
  moments->add_flag("--oracle", margs.oracle, "Cross-check against Wigner-partition enumeration");
  moments->add_option("--mode", margs.mode, "Tree integrals: quadrature, lattice or exact")->capture_default_str();
  moments->add_option("--kernel", margs.kernel, "Kernel or filter document");

  cli::DensityArgs dargs;
  auto* density = app.add_subcommand("density", "Limit density by Stieltjes inversion");
  density->add_option("--xmin", dargs.xmin, "Left end of the x grid");
  density->add_option("--xmax", dargs.xmax, "Right end of the x grid");
  density->add_option("--n", dargs.n, "Grid points");
  density->add_option("--eps1", dargs.eps1, "Larger extrapolation offset");
  density->add_option("--eps2", dargs.eps2, "Smaller extrapolation offset");
  density->add_flag("--spike", dargs.spike, "Also tabulate density*sqrt|x| near 0");
  density->add_option("--kernel", dargs.kernel, "Kernel or filter document");

  cli::SolveArgs solve_args;
  auto* solve = app.add_subcommand("solve", "Solve the color equations at given lambdas");
  solve->add_option("--lambda", solve_args.lambdas, "re or re,im (repeatable)")->required();
  solve->add_option("--kernel", solve_args.kernel, "Kernel or filter document");

  cli::SimulateArgs sargs;
  auto* simulate = app.add_subcommand("simulate", "Empirical spectral moments by Monte Carlo");
  simulate->add_option("--model", sargs.model, "filtered_wigner or colored_gaussian");
  simulate->add_option("--law", sargs.law, "gaussian or rademacher");
  simulate->add_option("--N", sargs.N, "Matrix size parameter");
  simulate->add_option("--trials", sargs.trials, "Independent matrices");
  simulate->add_option("--kmax", sargs.kmax, "Largest moment order");
  simulate->add_option("--bins", sargs.bins, "Histogram bins (0: Freedman-Diaconis)");
  simulate->add_flag("--check", sargs.check, "Fail unless every moment is within 3 standard errors");
  simulate->add_option("--kernel,--filter", sargs.kernel, "Kernel or filter document");

  cli::EliminateArgs eargs;
  auto* eliminate = app.add_subcommand("eliminate", "Curve F(lambda, S) = 0 for a rank-one kernel");
  eliminate->add_option("--relation", eargs.relation, "S_f as a rational or relation document");
  eliminate->add_option("--kernel", eargs.kernel, "Rank-one kernel used to certify the curve");

  cli::VerifyArgs vargs;
  auto* verify = app.add_subcommand("verify", "Check F(lambda, S(lambda)) = 0 against the solver");
  verify->add_option("--curve", vargs.curve, "Curve document");
  verify->add_option("--kernel", vargs.kernel, "Kernel or filter document");
  verify->add_option("--lambda", vargs.lambdas, "re or re,im (repeatable); default a circle");
  verify->add_option("--radius", vargs.radius, "Circle radius (default 3A)");
  verify->add_option("--samples", vargs.samples, "Points on the circle (default 20)");
  verify->add_option("--tolerance", vargs.tolerance, "Residual bound (default 1e-8)");

  cli::CrosscheckArgs cargs;
  auto* crosscheck = app.add_subcommand("crosscheck", "Moments from recursion, solver and simulation");
  crosscheck->add_option("--kmax", cargs.kmax, "Largest moment order");
  crosscheck->add_option("--model", cargs.simulate.model, "filtered_wigner or colored_gaussian");
  crosscheck->add_option("--N", cargs.simulate.N, "Matrix size parameter");
  crosscheck->add_option("--trials", cargs.simulate.trials, "Independent matrices");
  crosscheck->add_option("--kernel", cargs.kernel, "Kernel or filter document");

  cli::WalkArgs wargs;
  auto* walkcheck = app.add_subcommand("walkcheck", "Random-walk first-return recursions against path sums");
  walkcheck->add_option("--l", wargs.l, "Step range");
  walkcheck->add_option("--z", wargs.z, "Step weights re or re,im (2l+1 values)");
  walkcheck->add_option("--t-max", wargs.t_max, "Path length cutoff");
  walkcheck->add_option("--tolerance", wargs.tolerance, "Residual bound (default 1e-10)");

  CLI11_PARSE(app, argc, argv);

  cli::RunContext ctx;
  const auto start = std::chrono::steady_clock::now();
  bool passed = false;
  try {
    if (!config_path.empty()) {
      ctx.config = fspectra::read_json_file(config_path);
      ctx.config_dir = std::filesystem::path(config_path).parent_path();
      if (ctx.config_dir.empty()) ctx.config_dir = ".";
    }
    ctx.out_dir = out_dir;
    ctx.seed = seed;
    ctx.threads = fspectra::resolve_threads(threads);
    auto* sub = app.get_subcommands().front();
    ctx.command = sub->get_name();
    for (const auto* opt : sub->get_options()) {
      if (opt->get_name() == "--help" || opt->count() == 0) continue;
      ctx.arguments[opt->get_name()] = opt->results();
    }

    if (sub == moments) passed = cli::cmd_moments(ctx, margs);
    else if (sub == density) passed = cli::cmd_density(ctx, dargs);
    else if (sub == solve) passed = cli::cmd_solve(ctx, solve_args);
    else if (sub == simulate) passed = cli::cmd_simulate(ctx, sargs);
    else if (sub == eliminate) passed = cli::cmd_eliminate(ctx, eargs);
    else if (sub == verify) passed = cli::cmd_verify(ctx, vargs);
    else if (sub == crosscheck) passed = cli::cmd_crosscheck(ctx, cargs);
    else if (sub == walkcheck) passed = cli::cmd_walkcheck(ctx, wargs);
  } catch (const fspectra::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    ctx.results["error"] = e.what();
    passed = false;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    ctx.results["error"] = e.what();
    passed = false;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  try {
    cli::write_manifest(ctx, wall, passed);
  } catch (const std::exception& e) {
    std::cerr << "error: cannot write manifest: " << e.what() << "\n";
    return 2;
  }
  return passed ? 0 : 1;
}
