// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include "fspectra/algebra.hpp"
#include "fspectra/combinat.hpp"
#include "fspectra/matrixlab.hpp"
#include "fspectra/moments.hpp"
#include "test_support.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

using namespace fspectra;

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

class Criterion {
 public:
  explicit Criterion(int id, std::string title) : id_(id), title_(std::move(title)), start_(std::chrono::steady_clock::now()) {}

  /// Records one check; the criterion passes only if all of them do.
  void check(bool ok, const std::string& what) {
    if (!ok) {
      passed_ = false;
      std::printf("    failed: %s\n", what.c_str());
    }
  }
  void info(const std::string& line) const { std::printf("    %s\n", line.c_str()); }
  double elapsed() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }
  void runtime_below(double seconds) {
    const double t = elapsed();
    check(t < seconds, "runtime " + fmt(t) + " s exceeds " + fmt(seconds) + " s");
  }

  bool finish() const {
    std::printf("%s %d %s (%.2f s)\n", passed_ ? "PASS" : "FAIL", id_, title_.c_str(), elapsed());
    std::fflush(stdout);
    return passed_;
  }

 private:
  int id_;
  std::string title_;
  std::chrono::steady_clock::time_point start_;
  bool passed_ = true;
};

/// Runs a criterion body, turning exceptions into a failed check.
bool run(int id, const std::string& title, const std::function<void(Criterion&)>& body) {
  Criterion c(id, title);
  try {
    body(c);
  } catch (const std::exception& e) {
    c.check(false, std::string("exception: ") + e.what());
  }
  return c.finish();
}

const Kernel& ne_kernel() {
  static const Kernel s = kernel_from_filter(compass_filter());
  return s;
}

/// Coarse grid over [lo, hi] plus a fine grid of step `fine` within `halo` of each edge guess.
std::vector<double> edge_grid(double lo, double hi, double coarse, const std::vector<double>& edges, double halo, double fine) {
  std::vector<double> xs;
  for (double x = lo; x <= hi + 1e-12; x += coarse) xs.push_back(x);
  for (double e : edges)
    for (double x = e - halo; x <= e + halo + 1e-12; x += fine) xs.push_back(x);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end(), [](double a, double b) { return std::abs(a - b) < 1e-9; }), xs.end());
  return xs;
}

void catalan_counts(Criterion& c) {
  const long expected[] = {1, 2, 5, 14, 42, 132, 429, 1430};
  for (int l = 1; l <= 8; ++l) {
    const auto n = enumerate_wigner_partitions(2 * l).size();
    c.check(static_cast<long>(n) == expected[l - 1], "|W_" + std::to_string(2 * l) + "| = " + std::to_string(n));
    c.check(enumerate_wigner_partitions(2 * l - 1).empty(), "odd k = " + std::to_string(2 * l - 1) + " not empty");
  }
  c.runtime_below(5.0);
}

void oracle_equivalence(Criterion& c) {
  const std::vector<std::pair<std::string, Kernel>> kernels{
      {"constant", Kernel::constant()}, {"compass", ne_kernel()}, {"random two-interval", testing::random_two_interval_kernel(2024)}};
  for (const auto& [name, s] : kernels) {
    const auto rec = theoretical_moments_exact(s, 12);
    const auto enu = moments_by_enumeration_exact(s, 12);
    const auto recf = theoretical_moments(s, 12);
    const auto enuf = moments_by_enumeration(s, 12);
    for (std::size_t k = 0; k < 12; ++k) {
      c.check(rec[k] == enu[k], name + " exact m_" + std::to_string(k + 1) + ": " + rec[k].get_str() + " vs " + enu[k].get_str());
      c.check(std::abs(recf[k] - enuf[k]) <= 1e-9 * std::max(1.0, std::abs(enuf[k])),
              name + " float m_" + std::to_string(k + 1) + ": " + fmt(recf[k]) + " vs " + fmt(enuf[k]));
    }
    c.info(name + ": m_12 = " + rec[11].get_str());
  }
  c.runtime_below(60.0);
}

void semicircle(Criterion& c) {
  const Kernel s = Kernel::constant();
  const auto m = theoretical_moments_exact(s, 12);
  const long catalan[] = {1, 2, 5, 14, 42, 132};
  for (int k = 1; k <= 12; ++k) c.check(m[static_cast<std::size_t>(k - 1)] == (k % 2 ? 0 : catalan[k / 2 - 1]), "m_" + std::to_string(k) + " = " + m[static_cast<std::size_t>(k - 1)].get_str());

  const double S3 = solve_color_fixed_point(s, 3.0).stieltjes.real();
  const double S3_exact = (3.0 - std::sqrt(5.0)) / 2.0;
  c.info("S(3) = " + fmt(S3) + ", (3 - sqrt 5)/2 = " + fmt(S3_exact));
  c.check(std::abs(S3 - S3_exact) < 1e-10, "S(3)");

  const auto d0 = density_profile(s, {0.0});
  c.info("density(0) = " + fmt(d0.density[0]) + ", 1/pi = " + fmt(1.0 / std::numbers::pi));
  c.check(std::abs(d0.density[0] - 1.0 / std::numbers::pi) < 1e-3, "density(0)");

  const auto grid = density_profile(s, edge_grid(-3.0, 3.0, 0.05, {-2.0, 2.0}, 0.03, 0.002), 2e-3, 1e-3);
  c.check(grid.support_estimate.has_value(), "no support estimate");
  if (grid.support_estimate) {
    const auto [lo, hi] = *grid.support_estimate;
    c.info("support estimate [" + fmt(lo) + ", " + fmt(hi) + "]");
    c.check(std::abs(lo + 2.0) < 1e-2 && std::abs(hi - 2.0) < 1e-2, "support edges");
  }
}

void compass_example(Criterion& c) {
  const Kernel& s = ne_kernel();
  const auto quartic = bivariate({{2, 4, Rational(4)}, {3, 3, Rational(-1)}, {2, 2, Rational(-1)}, {1, 1, Rational(1)}, {0, 0, Rational(1)}});

  // (a)
  const auto relation = bivariate({{2, 2, Rational(1)}, {1, 2, Rational(-2)}, {0, 0, Rational(-1)}});
  const auto elim = rank_one_eliminate(relation, s);
  c.info("(a) curve: " + elim.curve.to_string({"lambda", "S"}));
  c.check(Polynomial::proportional(elim.curve, quartic), "(a) eliminated curve is not the quartic");

  // (b)
  const auto disc = discriminant(elim.curve, 1);
  const auto lambda = Polynomial::variable(2, 0);
  const auto expected = Polynomial::constant(2, Rational(-16)) * lambda.pow(6) *
                        (Polynomial::constant(2, Rational(8)) * lambda.pow(4) + Polynomial::constant(2, Rational(107)) * lambda.pow(2) -
                         Polynomial::constant(2, Rational(1024)));
  c.info("(b) discriminant: " + disc.to_string({"lambda", "S"}));
  c.check(Polynomial::proportional(disc, expected), "(b) discriminant");

  // (c)
  const auto roots = real_roots((disc * elim.curve.coefficient_in(1, elim.curve.degree(1))).to_upoly(0));
  const double edge = 0.25 * std::sqrt(-107.0 + 51.0 * std::sqrt(17.0));
  c.check(roots.size() == 3, "(c) expected 3 distinct real critical points, got " + std::to_string(roots.size()));
  if (roots.size() == 3) {
    c.info("(c) real roots " + fmt(roots[0].midpoint) + ", " + fmt(roots[1].midpoint) + ", " + fmt(roots[2].midpoint) +
           "; closed form +-" + fmt(edge));
    c.check(std::abs(roots[0].midpoint + edge) < 1e-10 && std::abs(roots[2].midpoint - edge) < 1e-10, "(c) real_roots edges");
  }
  const auto grid = density_profile(s, edge_grid(-3.0, 3.0, 0.05, {-edge, edge}, 0.03, 0.002), 2e-3, 1e-3);
  c.check(grid.support_estimate.has_value(), "(c) no support estimate");
  if (grid.support_estimate) {
    const auto [lo, hi] = *grid.support_estimate;
    c.info("(c) solver support [" + fmt(lo) + ", " + fmt(hi) + "]");
    c.check(std::abs(lo + edge) < 1e-2 && std::abs(hi - edge) < 1e-2, "(c) solver support edges");
  }

  // (d)
  const auto v = verify_curve(elim.curve, s, circle_samples(10.0, 20));
  c.info("(d) max residual on |lambda| = 10: " + fmt(v.max_residual));
  c.check(v.max_residual < 1e-8, "(d) verify_curve");

  // (e)
  const std::vector<double> xs{-0.04, -0.02, -0.01, 0.01, 0.02, 0.04};
  const auto spike = density_profile(s, xs, 1e-3, 5e-4);
  double lo = INFINITY, hi = 0.0;
  std::string row;
  for (std::size_t q = 0; q < xs.size(); ++q) {
    const double v2 = spike.density[q] * std::sqrt(std::abs(xs[q]));
    lo = std::min(lo, v2);
    hi = std::max(hi, v2);
    row += " " + fmt(v2);
  }
  c.info("(e) density*sqrt|x|:" + row + "; max/min = " + fmt(hi / lo));
  c.check(lo > 0.0 && hi / lo <= 1.2, "(e) spike ratio");
  c.runtime_below(300.0);
}

void monte_carlo(Criterion& c) {
  const Kernel& s = ne_kernel();
  const auto m = theoretical_moments_exact(s, 6);
  const auto oracle = moments_by_enumeration_exact(s, 6);
  c.check(m[5] == oracle[5], "oracle disagrees on m_6");
  const std::vector<double> target{1.0, 3.0, m[5].get_d()};
  c.info("limit m_2, m_4, m_6 = 1, 3, " + m[5].get_str());

  auto compare = [&](const std::string& model, const ESDStatistics& st) {
    for (int k : {2, 4, 6}) {
      const double mean = st.mean[static_cast<std::size_t>(k - 1)], se = st.standard_error[static_cast<std::size_t>(k - 1)];
      const double z = (mean - target[static_cast<std::size_t>(k / 2 - 1)]) / se;
      c.info(model + " m_" + std::to_string(k) + " = " + fmt(mean) + " +- " + fmt(se) + " (z = " + fmt(z) + ")");
      c.check(std::abs(z) <= 3.0, model + " m_" + std::to_string(k) + " outside 3 standard errors");
    }
  };

  SampleConfig cfg;
  cfg.N = 1000;
  cfg.trials = 5;
  cfg.seed = 42;
  cfg.threads = resolve_threads();
  compare("filtered N=1000", esd_statistics(simulate_filtered_wigner(cfg, compass_filter(), 6), 6));

  cfg.N = 40;
  const auto [e2, e4] = testing::colored_finite_n_moments(s, cfg.N);
  c.info("colored N=40 finite-N Wick expectations: m_2 = " + fmt(e2) + ", m_4 = " + fmt(e4));
  compare("colored N=40", esd_statistics(simulate_colored_gaussian(cfg, s, 6), 6));
  c.runtime_below(600.0);
}

void covariance(Criterion& c) {
  const std::vector<IndexQuad> quads{{10, 20, 10, 20}, {10, 20, 12, 18}, {10, 20, 15, 40}, {10, 20, 8, 20}, {10, 20, 10, 22},
                                     {10, 20, 12, 22}, {10, 20, 11, 21}, {25, 30, 23, 32}, {5, 40, 5, 38},  {30, 44, 31, 44}};
  SampleConfig cfg;
  cfg.N = 48;
  cfg.trials = 100000;
  cfg.seed = 42;
  cfg.threads = resolve_threads();
  for (const auto& q : quads) {
    const auto r = covariance_check(compass_filter(), cfg, q);
    const std::string label = "(" + std::to_string(q.i) + "," + std::to_string(q.j) + "," + std::to_string(q.k) + "," + std::to_string(q.l) + ")";
    c.info(label + " empirical " + fmt(r.empirical) + " vs " + fmt(r.theoretical) + ", z = " + fmt(r.z_score));
    c.check(std::abs(r.z_score) < 4.0, label + " z-score");
  }
  c.runtime_below(120.0);
}

void properties(Criterion& c) {
  const std::vector<Kernel> kernels{Kernel::constant(), ne_kernel(), testing::random_two_interval_kernel(2024), testing::random_two_interval_kernel(7)};
  const std::vector<Complex> points{{0.3, 0.7}, {-1.2, 0.05}, {2.0, 1.0}, {0.0, 4.0}, {7.0, 0.2}, {-3.5, 2.5}};
  double worst = 0.0;
  for (const auto& s : kernels)
    for (const Complex z : points) {
      const auto up = solve_color_fixed_point(s, z);
      const auto down = solve_color_fixed_point(s, std::conj(z));
      worst = std::max({worst, up.residual, down.residual});
      c.check(up.stieltjes.imag() < 0.0 && down.stieltjes.imag() > 0.0, "Im S sign at " + fmt(z.real()) + "+" + fmt(z.imag()) + "i");
      c.check(std::abs(down.stieltjes - std::conj(up.stieltjes)) < 1e-10, "conjugation symmetry");
    }
  c.info("largest color-equation residual " + fmt(worst));
  c.check(worst < 1e-12, "color-equation residual");

  double min_eig = INFINITY;
  for (const auto& s : kernels) {
    const auto m = theoretical_moments(s, 12);
    Eigen::MatrixXd H(7, 7);
    for (int i = 0; i <= 6; ++i)
      for (int j = 0; j <= 6; ++j) H(i, j) = i + j == 0 ? 1.0 : m[static_cast<std::size_t>(i + j - 1)];
    min_eig = std::min(min_eig, Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(H).eigenvalues().minCoeff());
  }
  c.info("smallest Hankel eigenvalue " + fmt(min_eig));
  c.check(min_eig >= -1e-8, "Hankel PSD");

  auto draw = [](std::uint64_t seed, std::uint32_t a, std::uint32_t b) {
    return Philox4x32::generate({a, b, 0, 0}, Philox4x32::key_from_seed(seed))[0];
  };
  int multiplicative = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::vector<Polynomial> p;
    for (std::uint32_t r = 0; r < 3; ++r) {
      Polynomial q(2);
      const int dy = 1 + static_cast<int>(draw(seed, r, 99) % 3u);
      for (int i = 0; i <= 2; ++i)
        for (int j = 0; j <= dy; ++j) q.add_term({i, j}, Rational(static_cast<long>(draw(seed, r, static_cast<std::uint32_t>(10 * i + j)) % 9u) - 4));
      q.add_term({0, dy}, Rational(5));
      p.push_back(q);
    }
    const auto lhs = resultant(p[0] * p[1], p[2], 1);
    const auto rhs = resultant(p[0], p[2], 1) * resultant(p[1], p[2], 1);
    if (lhs.terms() == rhs.terms()) ++multiplicative;
  }
  c.info("resultant multiplicativity held on " + std::to_string(multiplicative) + "/20 random instances");
  c.check(multiplicative == 20, "resultant multiplicativity");

  double walk = 0.0;
  for (int l = 1; l <= 2; ++l)
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      std::vector<Complex> z;
      for (int k = 0; k < 2 * l + 1; ++k) {
        const double u = uniform_open(draw(seed, static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(l)));
        z.push_back(std::polar(0.3 / (2 * l + 1), 2.0 * std::numbers::pi * u));
      }
      walk = std::max(walk, random_walk_recursion_check(z, l, 80).max_residual);
    }
  c.info("largest random-walk residual " + fmt(walk));
  c.check(walk < 1e-10, "random-walk recursions");
}

void negative_controls(Criterion& c) {
  Kernel bad(IntervalPartition{}, 2);
  bad.set(0, 0, 0, 0, QComplex(Rational(1)));
  bad.set(2, 0, 0, 0, QComplex(Rational(1)));
  bad.set(-2, 0, 0, 0, QComplex(Rational(1)));
  const auto v = validate_kernel(bad);
  for (const auto& f : v.failures) c.info("corrupted kernel: " + f);
  c.check(!v.ok(), "corrupted kernel passed validation");

  const auto wrong = bivariate({{0, 2, Rational(1)}, {1, 1, Rational(-1)}, {0, 0, Rational(2)}});
  const auto r = verify_curve(wrong, Kernel::constant(), {Complex(3.0, 0.0)});
  c.info("wrong curve residual at lambda = 3: " + fmt(r.max_residual));
  c.check(r.max_residual >= 0.5, "wrong curve accepted");
}

}  // namespace

int main() {
  bool ok = true;
  ok &= run(1, "Catalan counts of Wigner partitions", catalan_counts);
  ok &= run(2, "recursion moments equal enumeration moments", oracle_equivalence);
  ok &= run(3, "semicircle end to end", semicircle);
  ok &= run(4, "compass filter worked example", compass_example);
  ok &= run(5, "Monte Carlo moments", monte_carlo);
  ok &= run(6, "entry covariance identity", covariance);
  ok &= run(7, "property suites", properties);
  ok &= run(8, "negative controls", negative_controls);
  return ok ? 0 : 1;
}
