#pragma once
// Subcommands of the filtered-spectra tool. Each one reads its inputs from a
// RunContext, writes CSV/JSON files into the output directory and returns
// true when every check it performed passed.

#include "fspectra/algebra.hpp"
#include "fspectra/colorsolve.hpp"
#include "fspectra/combinat.hpp"
#include "fspectra/io.hpp"
#include "fspectra/matrixlab.hpp"
#include "fspectra/moments.hpp"

#include <Eigen/Core>
#include <gmp.h>

#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fspectra::cli {

namespace fs = std::filesystem;

struct RunContext {
  std::string command;
  /// Parsed --config document (null when absent).
  Json config;
  fs::path config_dir = ".";
  fs::path out_dir = "out";
  std::uint64_t seed = 42;
  unsigned threads = 1;
  /// Command-line parameters that affect the outputs, hashed into the manifest.
  Json arguments = Json::object();
  Json results = Json::object();
  Json outputs = Json::array();
  std::ostream* log = &std::cout;

  void write(const std::string& name, const std::string& text) {
    write_text_file(out_dir / name, text);
    outputs.push_back({{"file", name}, {"fnv1a", hex64(fnv1a(text))}});
  }

  /// Section `name` of the config, or an empty object.
  Json section(const std::string& name) const {
    if (config.is_object() && config.contains(name) && config.at(name).is_object()) return config.at(name);
    return Json::object();
  }

  fs::path resolve(const std::string& path) const {
    const fs::path p(path);
    return p.is_absolute() ? p : config_dir / p;
  }

  /// Document under `key`: inline object or a path relative to the config.
  std::optional<Json> document(const std::string& key) const {
    if (!config.is_object() || !config.contains(key)) return std::nullopt;
    const auto& v = config.at(key);
    if (v.is_string()) return read_json_file(resolve(v.get<std::string>()));
    return v;
  }
};

/// Kernel or filter document: --kernel, the config itself, or its "kernel" entry.
inline Json kernel_document(const RunContext& ctx, const std::string& kernel_path) {
  if (!kernel_path.empty()) return read_json_file(kernel_path);
  if (ctx.config.is_object()) {
    const auto type = ctx.config.value("type", std::string{});
    if (type == "kernel" || type == "filter") return ctx.config;
    if (auto doc = ctx.document("kernel")) return *doc;
  }
  throw PreconditionError("no kernel given: pass --config with a kernel/filter document or a \"kernel\" entry, or --kernel");
}

inline std::optional<Filter> filter_of(const Json& doc) {
  if (document_type(doc) == "filter") return filter_from_json(doc);
  return std::nullopt;
}

template <class T>
T setting(const RunContext& ctx, const std::string& section, const std::string& key, const std::optional<T>& flag, T fallback) {
  if (flag) return *flag;
  const Json s = ctx.section(section);
  return s.contains(key) ? s.at(key).get<T>() : fallback;
}

inline Json versions() {
  return Json{{"fspectra", FSPECTRA_VERSION},
              {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." + std::to_string(EIGEN_MINOR_VERSION)},
              {"gmp", gmp_version},
              {"compiler", __VERSION__}};
}

inline bool check_kernel(RunContext& ctx, const Kernel& s) {
  const auto v = validate_kernel(s);
  ctx.results["kernel"] = {{"valid", v.ok()}, {"A", v.A}, {"sup_norm", v.sup_norm}, {"failures", v.failures}};
  for (const auto& f : v.failures) *ctx.log << "kernel: " << f << "\n";
  return v.ok();
}

// ---------------------------------------------------------------- moments

struct MomentsArgs {
  std::optional<int> kmax;
  bool exact = false;
  bool oracle = false;
  std::string mode = "quadrature";
  std::string kernel;
};

inline bool cmd_moments(RunContext& ctx, const MomentsArgs& args) {
  const Kernel s = kernel_from_document(kernel_document(ctx, args.kernel));
  if (!check_kernel(ctx, s)) return false;
  const int kmax = setting(ctx, "moments", "kmax", args.kmax, 12);
  std::vector<std::string> header{"k", "moment"};
  if (args.exact) header.push_back("exact");
  if (args.oracle) header.insert(header.end(), {"oracle", "agree"});
  CsvTable table(header);

  bool ok = true;
  if (args.exact) {
    const auto m = theoretical_moments_exact(s, kmax);
    std::vector<Rational> o;
    if (args.oracle) o = moments_by_enumeration_exact(s, kmax);
    for (int k = 1; k <= kmax; ++k) {
      const auto& v = m[static_cast<std::size_t>(k - 1)];
      auto& row = table.row() << k << v.get_d() << v.get_str();
      if (args.oracle) {
        const bool agree = o[static_cast<std::size_t>(k - 1)] == v;
        ok = ok && agree;
        row << o[static_cast<std::size_t>(k - 1)].get_str() << agree;
      }
    }
  } else {
    const auto m = theoretical_moments(s, kmax);
    std::vector<double> o;
    if (args.oracle) {
      TreeIntegralMode mode = TreeIntegralMode::quadrature;
      if (args.mode == "lattice") mode = TreeIntegralMode::fourier_lattice;
      else if (args.mode == "exact") mode = TreeIntegralMode::exact;
      else if (args.mode != "quadrature") throw PreconditionError("--mode is quadrature, lattice or exact");
      o = moments_by_enumeration(s, kmax, mode, ctx.threads);
    }
    for (int k = 1; k <= kmax; ++k) {
      const double v = m[static_cast<std::size_t>(k - 1)];
      auto& row = table.row() << k << v;
      if (args.oracle) {
        const double w = o[static_cast<std::size_t>(k - 1)];
        const bool agree = std::abs(v - w) <= 1e-9 * std::max(1.0, std::abs(v));
        ok = ok && agree;
        row << w << agree;
      }
    }
  }
  ctx.write("moments.csv", table.str());
  ctx.results["moments_agree"] = ok;
  *ctx.log << table.str();
  return ok;
}

// ---------------------------------------------------------------- density

struct DensityArgs {
  std::optional<double> xmin, xmax, eps1, eps2;
  std::optional<int> n;
  /// Tabulate density * sqrt|x| at +-0.01, +-0.02, +-0.04 with eps (1e-3, 5e-4).
  bool spike = false;
  std::string kernel;
};

inline bool cmd_density(RunContext& ctx, const DensityArgs& args) {
  const Kernel s = kernel_from_document(kernel_document(ctx, args.kernel));
  if (!check_kernel(ctx, s)) return false;
  const double A = kernel_bound_A(s);
  const double xmin = setting(ctx, "density", "xmin", args.xmin, -2.0 * A - 0.5);
  const double xmax = setting(ctx, "density", "xmax", args.xmax, 2.0 * A + 0.5);
  const int n = setting(ctx, "density", "n", args.n, 201);
  const double eps1 = setting(ctx, "density", "eps1", args.eps1, 1e-2);
  const double eps2 = setting(ctx, "density", "eps2", args.eps2, 5e-3);
  if (n < 2 || !(xmax > xmin)) throw PreconditionError("density grid needs n >= 2 and xmax > xmin");
  std::vector<double> xs;
  for (int q = 0; q < n; ++q) xs.push_back(xmin + (xmax - xmin) * q / (n - 1));
  const auto grid = density_profile(s, xs, eps1, eps2, {}, ctx.threads);

  CsvTable table({"x", "density", "residual", "failed"});
  bool ok = true;
  for (std::size_t q = 0; q < xs.size(); ++q) {
    table.row() << xs[q] << grid.density[q] << grid.residual[q] << static_cast<bool>(grid.failed[q]);
    if (grid.failed[q]) {
      ok = false;
      *ctx.log << "x = " << format_double(xs[q]) << ": " << grid.errors[q] << "\n";
    }
  }
  ctx.write("density.csv", table.str());
  if (grid.support_estimate) {
    ctx.results["support"] = {grid.support_estimate->first, grid.support_estimate->second};
    *ctx.log << "support estimate [" << format_double(grid.support_estimate->first) << ", " << format_double(grid.support_estimate->second) << "]\n";
  }
  if (args.spike) {
    const std::vector<double> sx{-0.04, -0.02, -0.01, 0.01, 0.02, 0.04};
    const auto sg = density_profile(s, sx, 1e-3, 5e-4, {}, ctx.threads);
    CsvTable spike({"x", "density", "density_times_sqrt_abs_x"});
    for (std::size_t q = 0; q < sx.size(); ++q) spike.row() << sx[q] << sg.density[q] << sg.density[q] * std::sqrt(std::abs(sx[q]));
    ctx.write("spike.csv", spike.str());
    *ctx.log << spike.str();
  }
  ctx.results["failed_points"] = static_cast<int>(std::count(grid.failed.begin(), grid.failed.end(), true));
  return ok;
}

// ---------------------------------------------------------------- solve

struct SolveArgs {
  std::vector<std::string> lambdas;
  std::string kernel;
};

inline Complex parse_complex(const std::string& text) {
  const auto comma = text.find(',');
  try {
    if (comma == std::string::npos) return {std::stod(text), 0.0};
    return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
  } catch (const std::exception&) {
    throw PreconditionError("expected re or re,im, got '" + text + "'");
  }
}

inline bool cmd_solve(RunContext& ctx, const SolveArgs& args) {
  const Kernel s = kernel_from_document(kernel_document(ctx, args.kernel));
  if (!check_kernel(ctx, s)) return false;
  if (args.lambdas.empty()) throw PreconditionError("solve needs at least one --lambda re,im");
  CsvTable table({"lambda_re", "lambda_im", "S_re", "S_im", "residual", "nodes", "iterations"});
  for (const auto& text : args.lambdas) {
    const auto sol = solve_color_fixed_point(s, parse_complex(text));
    table.row() << sol.lambda.real() << sol.lambda.imag() << sol.stieltjes.real() << sol.stieltjes.imag() << sol.residual << sol.nodes << sol.iterations;
  }
  ctx.write("solve.csv", table.str());
  *ctx.log << table.str();
  return true;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::optional<std::string> model, law;
  std::optional<int> N, trials, kmax, bins;
  bool check = false;
  std::string kernel;
};

struct SimulationSummary {
  std::string model;
  ESDStatistics stats;
  std::vector<double> theoretical;
};

inline SimulationSummary run_simulation(const RunContext& ctx, const Json& kdoc, const SimulateArgs& args) {
  const auto filter = filter_of(kdoc);
  const Kernel s = kernel_from_document(kdoc);
  SimulationSummary out;
  out.model = setting(ctx, "simulate", "model", args.model, std::string(filter ? "filtered_wigner" : "colored_gaussian"));
  SampleConfig cfg;
  cfg.N = setting(ctx, "simulate", "N", args.N, out.model == "filtered_wigner" ? 400 : 32);
  cfg.trials = setting(ctx, "simulate", "trials", args.trials, 5);
  cfg.seed = ctx.seed;
  cfg.threads = ctx.threads;
  const auto law = setting(ctx, "simulate", "law", args.law, std::string("gaussian"));
  if (law == "rademacher") cfg.entry_law = EntryLaw::rademacher;
  else if (law != "gaussian") throw PreconditionError("law is gaussian or rademacher");
  const int kmax = setting(ctx, "simulate", "kmax", args.kmax, 6);
  const int bins = setting(ctx, "simulate", "bins", args.bins, 0);
  std::vector<ESD> samples;
  if (out.model == "filtered_wigner") {
    if (!filter) throw PreconditionError("the filtered_wigner model needs a filter document");
    samples = simulate_filtered_wigner(cfg, *filter, kmax);
  } else if (out.model == "colored_gaussian") {
    if (cfg.entry_law != EntryLaw::gaussian) throw PreconditionError("the colored_gaussian model samples Gaussian entries only");
    samples = simulate_colored_gaussian(cfg, s, kmax);
  } else {
    throw PreconditionError("model is filtered_wigner or colored_gaussian");
  }
  out.stats = esd_statistics(samples, kmax, bins);
  out.theoretical = theoretical_moments(s, kmax);
  return out;
}

inline bool cmd_simulate(RunContext& ctx, const SimulateArgs& args) {
  const Json kdoc = kernel_document(ctx, args.kernel);
  if (!check_kernel(ctx, kernel_from_document(kdoc))) return false;
  const auto sim = run_simulation(ctx, kdoc, args);
  CsvTable table({"k", "mean", "stderr", "theoretical", "z_score"});
  bool ok = true;
  for (std::size_t k = 0; k < sim.stats.mean.size(); ++k) {
    const double z = (sim.stats.mean[k] - sim.theoretical[k]) / sim.stats.standard_error[k];
    if (!(std::abs(z) <= 3.0)) ok = false;
    table.row() << static_cast<int>(k + 1) << sim.stats.mean[k] << sim.stats.standard_error[k] << sim.theoretical[k] << z;
  }
  CsvTable hist({"bin_lo", "bin_hi", "mass"});
  for (std::size_t b = 0; b < sim.stats.histogram.mass.size(); ++b)
    hist.row() << sim.stats.histogram.lo[b] << sim.stats.histogram.hi[b] << sim.stats.histogram.mass[b];
  ctx.write("moments.csv", table.str());
  ctx.write("hist.csv", hist.str());
  ctx.results["model"] = sim.model;
  ctx.results["within_3_standard_errors"] = ok;
  *ctx.log << table.str();
  return !args.check || ok;
}

// ---------------------------------------------------------------- eliminate

struct EliminateArgs {
  std::string relation;
  std::string kernel;
};

inline bool cmd_eliminate(RunContext& ctx, const EliminateArgs& args) {
  Json rdoc;
  if (!args.relation.empty()) rdoc = read_json_file(args.relation);
  else if (auto d = ctx.document("relation")) rdoc = *d;
  else throw PreconditionError("eliminate needs --relation or a \"relation\" entry in the config");
  const Kernel s = kernel_from_document(kernel_document(ctx, args.kernel));
  if (!check_kernel(ctx, s)) return false;
  const auto result = rank_one_eliminate(relation_from_json(rdoc), s);

  CsvTable cands({"curve", "multiplicity", "residual", "accepted"});
  for (const auto& c : result.candidates) cands.row() << c.curve.to_string({"lambda", "S"}) << c.multiplicity << c.residual << c.accepted;
  ctx.write("candidates.csv", cands.str());
  ctx.write("curve.json", curve_to_json(result.curve).dump(1) + "\n");

  const auto disc = discriminant(result.curve, 1).remap(1, {0, 1});
  const UPoly lead = result.curve.coefficient_in(1, result.curve.degree(1)).to_upoly(0);
  const UPoly critical = lead * disc.to_upoly(0);
  CsvTable roots({"lo", "hi", "midpoint"});
  Json rj = Json::array();
  for (const auto& r : real_roots(critical)) {
    roots.row() << r.lo.get_str() << r.hi.get_str() << r.midpoint;
    rj.push_back(r.midpoint);
  }
  ctx.write("critical_points.csv", roots.str());
  ctx.results["curve"] = result.curve.to_string({"lambda", "S"});
  ctx.results["discriminant"] = disc.primitive().to_string({"lambda"});
  ctx.results["critical_real_points"] = rj;
  *ctx.log << "curve: " << result.curve.to_string({"lambda", "S"}) << " = 0\n"
           << "discriminant: " << disc.primitive().to_string({"lambda"}) << "\n"
           << cands.str();
  return true;
}

// ---------------------------------------------------------------- verify

struct VerifyArgs {
  std::string curve;
  std::string kernel;
  std::vector<std::string> lambdas;
  std::optional<double> radius, tolerance;
  std::optional<int> samples;
};

inline bool cmd_verify(RunContext& ctx, const VerifyArgs& args) {
  Json cdoc;
  if (!args.curve.empty()) cdoc = read_json_file(args.curve);
  else if (auto d = ctx.document("curve")) cdoc = *d;
  else throw PreconditionError("verify needs --curve or a \"curve\" entry in the config");
  const Kernel s = kernel_from_document(kernel_document(ctx, args.kernel));
  if (!check_kernel(ctx, s)) return false;
  const auto F = curve_from_json(cdoc);
  std::vector<Complex> lambdas;
  for (const auto& t : args.lambdas) lambdas.push_back(parse_complex(t));
  if (lambdas.empty())
    lambdas = circle_samples(setting(ctx, "verify", "radius", args.radius, 3.0 * kernel_bound_A(s)), static_cast<std::size_t>(setting(ctx, "verify", "samples", args.samples, 20)));
  const double tol = setting(ctx, "verify", "tolerance", args.tolerance, 1e-8);
  const auto check = verify_curve(F, s, lambdas);
  CsvTable table({"lambda_re", "lambda_im", "S_re", "S_im", "residual"});
  for (std::size_t q = 0; q < check.lambdas.size(); ++q)
    table.row() << check.lambdas[q].real() << check.lambdas[q].imag() << check.stieltjes[q].real() << check.stieltjes[q].imag() << check.residuals[q];
  ctx.write("verify.csv", table.str());
  ctx.results["max_residual"] = check.max_residual;
  ctx.results["tolerance"] = tol;
  *ctx.log << "max normalized residual " << format_double(check.max_residual) << " (tolerance " << format_double(tol) << ")\n";
  return check.max_residual < tol;
}

// ---------------------------------------------------------------- crosscheck

struct CrosscheckArgs {
  std::optional<int> kmax;
  SimulateArgs simulate;
  std::string kernel;
};

/// Moments three ways: exact recursion, contour quadrature of the solver's
/// S, and simulation. Agreement: |solver - exact| <= 1e-3 max(1, |m_k|) and
/// |simulation - exact| < 3 standard errors.
inline bool cmd_crosscheck(RunContext& ctx, const CrosscheckArgs& args) {
  const Json kdoc = kernel_document(ctx, args.kernel);
  const Kernel s = kernel_from_document(kdoc);
  Json report{{"rows", Json::array()}};
  CsvTable table({"k", "exact", "solver", "simulation", "standard_error", "solver_agrees", "simulation_agrees"});
  bool ok = check_kernel(ctx, s);
  report["kernel_valid"] = ok;
  if (ok) {
    const int kmax = setting(ctx, "crosscheck", "kmax", args.kmax, 6);
    const auto exact = theoretical_moments_exact(s, kmax);
    const auto solver = contour_moments(s, kmax, 1.25, 256, {}, ctx.threads);
    SimulateArgs sargs = args.simulate;
    sargs.kmax = kmax;
    const auto sim = run_simulation(ctx, kdoc, sargs);
    report["model"] = sim.model;
    for (int k = 1; k <= kmax; ++k) {
      const auto i = static_cast<std::size_t>(k - 1);
      const double m = exact[i].get_d();
      const bool solver_ok = std::abs(solver[i] - m) <= 1e-3 * std::max(1.0, std::abs(m));
      const bool sim_ok = std::abs(sim.stats.mean[i] - m) < 3.0 * sim.stats.standard_error[i];
      ok = ok && solver_ok && sim_ok;
      table.row() << k << m << solver[i] << sim.stats.mean[i] << sim.stats.standard_error[i] << solver_ok << sim_ok;
      report["rows"].push_back({{"k", k},
                                {"exact", exact[i].get_str()},
                                {"solver", solver[i]},
                                {"simulation", sim.stats.mean[i]},
                                {"standard_error", sim.stats.standard_error[i]},
                                {"solver_agrees", solver_ok},
                                {"simulation_agrees", sim_ok}});
    }
  } else {
    report["rows"].push_back({{"check", "validate_kernel"}, {"passed", false}, {"failures", ctx.results["kernel"]["failures"]}});
  }
  report["passed"] = ok;
  ctx.write("crosscheck.csv", table.str());
  ctx.write("report.json", report.dump(1) + "\n");
  ctx.results["passed"] = ok;
  *ctx.log << table.str() << (ok ? "crosscheck passed\n" : "crosscheck FAILED\n");
  return ok;
}

// ---------------------------------------------------------------- walkcheck

struct WalkArgs {
  std::optional<int> l, t_max;
  std::vector<std::string> z;
  std::optional<double> tolerance;
};

inline bool cmd_walkcheck(RunContext& ctx, const WalkArgs& args) {
  WalkConfig w;
  if (ctx.config.is_object() && ctx.config.value("type", std::string{}) == "walk") w = walk_from_json(ctx.config);
  else if (auto d = ctx.document("walk")) w = walk_from_json(*d);
  if (args.l) w.l = *args.l;
  if (args.t_max) w.t_max = *args.t_max;
  if (!args.z.empty()) {
    w.z.clear();
    for (const auto& t : args.z) w.z.push_back(parse_complex(t));
  }
  const double tol = args.tolerance.value_or(1e-10);
  const auto c = random_walk_recursion_check(w.z, w.l, w.t_max);
  CsvTable table({"fixed_point_residual", "series_gap", "theta_gap", "tail_bound", "max_residual"});
  table.row() << c.fixed_point_residual << c.series_gap << c.theta_gap << c.tail_bound << c.max_residual;
  ctx.write("walkcheck.csv", table.str());
  ctx.results["max_residual"] = c.max_residual;
  *ctx.log << table.str();
  return c.max_residual < tol;
}

// ---------------------------------------------------------------- manifest

inline void write_manifest(RunContext& ctx, double wall_seconds, bool passed) {
  const Json hashed{{"command", ctx.command}, {"config", ctx.config}, {"arguments", ctx.arguments}, {"seed", ctx.seed}};
  Json manifest{{"command", ctx.command},
                {"config_hash", hex64(fnv1a(hashed.dump()))},
                {"seed", ctx.seed},
                {"threads", ctx.threads},
                {"versions", versions()},
                {"wall_time_seconds", wall_seconds},
                {"outputs", ctx.outputs},
                {"results", ctx.results},
                {"passed", passed}};
  write_text_file(ctx.out_dir / "manifest.json", manifest.dump(1) + "\n");
}

}  // namespace fspectra::cli
