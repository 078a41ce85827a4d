#pragma once
// Color equations
//
//   Psi(c, lambda) = int s(c, c') P(dc') / (lambda - Psi(c', lambda)),
//   S(lambda)      = int P(dc) / (lambda - Psi(c, lambda)),
//
// solved on the Fourier coefficients psi[a][i], |i| <= K, with the angular
// integral done by the trapezoid rule on M nodes. Sign convention:
// S(lambda) = int mu(dx) / (lambda - x), so Im S <= 0 when Im lambda > 0 and
// the density is -Im S(x + i eps) / pi.

#include "fspectra/kernel.hpp"
#include "fspectra/nice_function.hpp"
#include "fspectra/parallel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fspectra {

struct SolverOptions {
  double tolerance = 1e-12;
  std::size_t max_iterations = 100000;
  /// Switch from damped Picard to Newton once Picard stalls.
  bool newton = true;
  double division_guard = 1e-14;
  std::size_t max_nodes = std::size_t{1} << 22;
};

struct ColorSolution {
  Complex lambda;
  /// Psi(., lambda) with degree band(s).
  NiceFunction<Complex> psi;
  Complex stieltjes;
  /// max_a sum_i |psi_i(a) - T(psi)_i(a)|, which bounds the sup over color space.
  double residual = 0.0;
  std::size_t nodes = 0;
  std::size_t iterations = 0;
};

/// Solver failure carrying the point and the last residual.
struct SolverError : Error {
  SolverError(const std::string& what, Complex lambda_, double residual_)
      : Error(what), lambda(lambda_), residual(residual_) {}
  Complex lambda;
  double residual;
};

namespace detail {

inline std::string format_lambda(Complex z) {
  std::ostringstream os;
  os.precision(17);
  os << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
  return os.str();
}

inline std::size_t next_pow2(double x) {
  std::size_t m = 1;
  while (static_cast<double>(m) < x) m <<= 1;
  return m;
}

}  // namespace detail

/// The map T(psi)[a][i] = sum_{j,b} s_ij(a,b) |I_b| ghat_b[j], with
/// ghat_b[j] the j-th angular moment of 1/(lambda - Psi) on interval b.
class ColorEquation {
 public:
  explicit ColorEquation(const Kernel& s) : s_(s), n_(s.intervals()), K_(s.band()) {}

  std::size_t dimension() const { return n_ * width(); }
  std::size_t index(std::size_t a, int i) const { return a * width() + static_cast<std::size_t>(i + K_); }
  int band() const { return K_; }
  const Kernel& kernel() const { return s_; }

  struct Evaluation {
    std::vector<Complex> T;
    /// ghat[b*(2K+1) + j+K]
    std::vector<Complex> ghat;
    /// Moments of g^2 for |j| <= 2K, present when requested.
    std::vector<Complex> ghat2;
    Complex S;
    double min_gap = INFINITY;
  };

  Evaluation apply(Complex lambda, const std::vector<Complex>& psi, std::size_t M, bool with_square, double guard) const {
    const int W = static_cast<int>(width());
    const int W2 = 4 * K_ + 1;
    const auto& E = table(M);
    Evaluation ev;
    ev.ghat.assign(n_ * width(), Complex{});
    if (with_square) ev.ghat2.assign(n_ * static_cast<std::size_t>(W2), Complex{});
    for (std::size_t b = 0; b < n_; ++b) {
      const Complex* pb = &psi[b * width()];
      Complex* gb = &ev.ghat[b * width()];
      for (std::size_t p = 0; p < M; ++p) {
        const Complex* e = &E[p * static_cast<std::size_t>(W2) + static_cast<std::size_t>(K_)];  // e[j] = xi^j, |j| <= 2K shifted
        Complex Psi{};
        for (int i = 0; i < W; ++i) Psi += pb[i] * e[i];
        const Complex d = lambda - Psi;
        const double gap = std::abs(d);
        ev.min_gap = std::min(ev.min_gap, gap);
        if (!(gap >= guard))
          throw SolverError("division guard: |lambda - Psi| = " + std::to_string(gap) + " at a quadrature node", lambda, INFINITY);
        const Complex g = 1.0 / d;
        for (int j = 0; j < W; ++j) gb[j] += g * e[j];
        if (with_square) {
          const Complex g2 = g * g;
          Complex* h = &ev.ghat2[b * static_cast<std::size_t>(W2)];
          const Complex* e2 = &E[p * static_cast<std::size_t>(W2)];
          for (int j = 0; j < W2; ++j) h[j] += g2 * e2[j];
        }
      }
      const double inv = 1.0 / static_cast<double>(M);
      for (int j = 0; j < W; ++j) gb[j] *= inv;
      if (with_square)
        for (int j = 0; j < W2; ++j) ev.ghat2[b * static_cast<std::size_t>(W2) + static_cast<std::size_t>(j)] *= inv;
    }
    ev.T.assign(dimension(), Complex{});
    for (std::size_t a = 0; a < n_; ++a)
      for (int i = -K_; i <= K_; ++i) {
        Complex total{};
        for (std::size_t b = 0; b < n_; ++b) {
          const double w = s_.partition().length_d(b);
          for (int j = -K_; j <= K_; ++j) {
            const Complex& sij = s_.coeff(i, j, a, b);
            if (sij != Complex{}) total += sij * w * ev.ghat[b * width() + static_cast<std::size_t>(j + K_)];
          }
        }
        ev.T[index(a, i)] = total;
      }
    ev.S = {};
    for (std::size_t a = 0; a < n_; ++a) ev.S += s_.partition().length_d(a) * ev.ghat[a * width() + static_cast<std::size_t>(K_)];
    return ev;
  }

  /// d T[a][i] / d psi[b][m] = sum_j s_ij(a,b) |I_b| ghat2_b[j+m].
  Eigen::MatrixXcd jacobian(const Evaluation& ev) const {
    const std::size_t D = dimension();
    const std::size_t W2 = static_cast<std::size_t>(4 * K_ + 1);
    Eigen::MatrixXcd J = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(D), static_cast<Eigen::Index>(D));
    for (std::size_t a = 0; a < n_; ++a)
      for (int i = -K_; i <= K_; ++i)
        for (std::size_t b = 0; b < n_; ++b) {
          const double w = s_.partition().length_d(b);
          for (int m = -K_; m <= K_; ++m) {
            Complex total{};
            for (int j = -K_; j <= K_; ++j) {
              const Complex& sij = s_.coeff(i, j, a, b);
              if (sij != Complex{}) total += sij * w * ev.ghat2[b * W2 + static_cast<std::size_t>(j + m + 2 * K_)];
            }
            J(static_cast<Eigen::Index>(index(a, i)), static_cast<Eigen::Index>(index(b, m))) = total;
          }
        }
    return J;
  }

  double residual(const std::vector<Complex>& psi, const std::vector<Complex>& T) const {
    double worst = 0.0;
    for (std::size_t a = 0; a < n_; ++a) {
      double total = 0.0;
      for (std::size_t i = 0; i < width(); ++i) total += std::abs(psi[a * width() + i] - T[a * width() + i]);
      worst = std::max(worst, total);
    }
    return worst;
  }

  /// Node count for which the trapezoid rule resolves 1/(lambda - Psi):
  /// the nearest singularity in the angle sits about gap / |Psi'| off the circle.
  std::size_t suggested_nodes(const std::vector<Complex>& psi, double gap) const {
    if (K_ == 0) return 1;
    double slope = 0.0;
    for (std::size_t a = 0; a < n_; ++a) {
      double total = 0.0;
      for (int i = -K_; i <= K_; ++i) total += std::abs(i) * std::abs(psi[index(a, i)]);
      slope = std::max(slope, total);
    }
    double want = 8.0 * static_cast<double>(width());
    if (slope > 0.0 && gap > 0.0) want = std::max(want, 48.0 * slope / gap);
    return detail::next_pow2(std::min(want, 1e12));
  }

 private:
  std::size_t width() const { return static_cast<std::size_t>(2 * K_ + 1); }

  /// xi^j at the M nodes for |j| <= 2K, row p at offset p*(4K+1), column j+2K.
  /// The last few node counts are kept since the solver alternates M and 2M.
  const std::vector<Complex>& table(std::size_t M) const {
    auto it = tables_.find(M);
    if (it != tables_.end()) return it->second;
    if (tables_.size() >= 3) tables_.erase(tables_.begin());
    const std::size_t W2 = static_cast<std::size_t>(4 * K_ + 1);
    std::vector<Complex> t(M * W2);
    for (std::size_t p = 0; p < M; ++p)
      for (int j = -2 * K_; j <= 2 * K_; ++j)
        t[p * W2 + static_cast<std::size_t>(j + 2 * K_)] =
            std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(j) * static_cast<double>(p) / static_cast<double>(M));
    return tables_.emplace(M, std::move(t)).first->second;
  }

  const Kernel& s_;
  std::size_t n_;
  int K_;
  mutable std::map<std::size_t, std::vector<Complex>> tables_;
};

namespace detail {

inline NiceFunction<Complex> to_nice(const Kernel& s, const std::vector<Complex>& psi) {
  NiceFunction<Complex> f(s.partition(), s.band());
  const int K = s.band();
  for (std::size_t a = 0; a < s.intervals(); ++a)
    for (int i = -K; i <= K; ++i) f.at(a, i) = psi[a * static_cast<std::size_t>(2 * K + 1) + static_cast<std::size_t>(i + K)];
  return f;
}

inline std::vector<Complex> from_nice(const Kernel& s, const NiceFunction<Complex>& f) {
  const int K = s.band();
  std::vector<Complex> psi(s.intervals() * static_cast<std::size_t>(2 * K + 1));
  for (std::size_t a = 0; a < s.intervals(); ++a)
    for (int i = -K; i <= K; ++i) psi[a * static_cast<std::size_t>(2 * K + 1) + static_cast<std::size_t>(i + K)] = f.get(a, i);
  return psi;
}

inline void check_herglotz(Complex lambda, Complex S, double tolerance) {
  const double slack = tolerance * std::max(1.0, std::abs(S));
  if ((lambda.imag() > 0 && S.imag() > slack) || (lambda.imag() < 0 && S.imag() < -slack))
    throw SolverError("solution left the Herglotz branch (Im S has the wrong sign)", lambda, 0.0);
}

}  // namespace detail

/// Damped Picard iteration psi <- (1-w) psi + w T(psi), w halved on residual
/// increase down to 1/64, with a Newton phase when Picard stalls. The node
/// count is re-derived from the iterate and confirmed by doubling: a
/// solution is accepted only if its residual is below tolerance on M and 2M nodes.
namespace detail {

inline ColorSolution solve_with(const ColorEquation& eq, double A, Complex lambda, const std::optional<ColorSolution>& warm_start,
                                const SolverOptions& options) {
  const Kernel& s = eq.kernel();
  if (lambda.imag() == 0.0 && !(std::abs(lambda) > 2.0 * A) && !warm_start)
    throw PreconditionError("color equations need Im lambda != 0 or |lambda| > 2A; got lambda = " + detail::format_lambda(lambda));

  std::vector<Complex> psi = warm_start ? detail::from_nice(s, warm_start->psi) : std::vector<Complex>(eq.dimension(), Complex{});
  if (warm_start && std::abs(warm_start->lambda - lambda) > 0.0 && lambda.imag() * warm_start->lambda.imag() < 0)
    for (auto& v : psi) v = std::conj(v);

  // Start coarse; the sampled gap below raises M until it resolves 1/(lambda - Psi).
  std::size_t M = eq.suggested_nodes(psi, INFINITY);
  double omega = 1.0, previous = INFINITY, last = INFINITY;
  std::size_t stall = 0;
  bool newton_phase = false;
  std::size_t newton_failures = 0;
  const std::size_t D = eq.dimension();

  for (std::size_t it = 1; it <= options.max_iterations; ++it) {
    if (M > options.max_nodes) throw SolverError("angular node count exceeds limit", lambda, last);
    auto ev = eq.apply(lambda, psi, M, newton_phase, options.division_guard);
    const double r = eq.residual(psi, ev.T);
    last = r;
    const std::size_t want = eq.suggested_nodes(psi, ev.min_gap);
    if (want > M) {
      M = want;
      continue;
    }
    if (r < options.tolerance) {
      auto check = eq.apply(lambda, psi, 2 * M, false, options.division_guard);
      const double r2 = eq.residual(psi, check.T);
      if (r2 < options.tolerance) {
        detail::check_herglotz(lambda, ev.S, 1e-10);
        ColorSolution sol;
        sol.lambda = lambda;
        sol.psi = detail::to_nice(s, psi);
        sol.stieltjes = ev.S;
        sol.residual = std::max(r, r2);
        sol.nodes = M;
        sol.iterations = it;
        return sol;
      }
      M *= 2;
      continue;
    }

    if (newton_phase) {
      Eigen::VectorXcd F(static_cast<Eigen::Index>(D));
      for (std::size_t q = 0; q < D; ++q) F(static_cast<Eigen::Index>(q)) = psi[q] - ev.T[q];
      Eigen::MatrixXcd J = Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(D), static_cast<Eigen::Index>(D)) - eq.jacobian(ev);
      Eigen::VectorXcd delta = J.partialPivLu().solve(-F);
      double t = 1.0;
      bool accepted = false;
      for (int ls = 0; ls < 30 && !accepted; ++ls, t *= 0.5) {
        std::vector<Complex> trial(psi);
        for (std::size_t q = 0; q < D; ++q) trial[q] += t * delta(static_cast<Eigen::Index>(q));
        try {
          auto tv = eq.apply(lambda, trial, M, false, options.division_guard);
          const double tr = eq.residual(trial, tv.T);
          if (std::isfinite(tr) && tr < (1.0 - 1e-4 * t) * r) {
            psi = std::move(trial);
            accepted = true;
          }
        } catch (const SolverError&) {
        }
      }
      if (!accepted) {
        newton_phase = false;
        ++newton_failures;
        omega = 1.0 / 64.0;
        stall = 0;
      }
      previous = r;
      continue;
    }

    if (r > previous) omega = std::max(omega / 2.0, 1.0 / 64.0);
    stall = (r > 0.5 * previous) ? stall + 1 : 0;
    previous = r;
    for (std::size_t q = 0; q < D; ++q) psi[q] = (1.0 - omega) * psi[q] + omega * ev.T[q];
    if (options.newton && newton_failures < 5 && stall >= 10) {
      newton_phase = true;
      stall = 0;
    }
  }
  throw SolverError("color equations did not converge after " + std::to_string(options.max_iterations) +
                        " iterations at lambda = " + detail::format_lambda(lambda) + " (last residual " + std::to_string(last) + ")",
                    lambda, last);
}

}  // namespace detail


/// Solutions at each target, reached by continuation from a solution at
/// `anchor`: straight to Re(target) + iH at height H = max(Im anchor, Im target),
/// then down vertically with geometric steps. A target directly below or
/// above the previous one continues from it. Failed steps are bisected.
/// Targets in the lower half plane are solved by conjugation.
namespace detail {

inline std::vector<ColorSolution> path_with(const ColorEquation& eq, double A, const std::vector<Complex>& targets, Complex anchor,
                                            const SolverOptions& options) {
  const Kernel& s = eq.kernel();
  if (!(std::abs(anchor) > 2.0 * A))
    throw PreconditionError("continuation anchor must satisfy |anchor| > 2A = " + std::to_string(2.0 * A));
  if (anchor.imag() < 0) anchor = std::conj(anchor);

  SolverOptions step_options = options;
  step_options.max_iterations = std::min<std::size_t>(options.max_iterations, 2000);
  const ColorSolution base = solve_with(eq, A, anchor, std::nullopt, options);

  auto advance = [&](const ColorSolution& from, Complex to, bool final_point) {
    ColorSolution current = from;
    Complex step = to - current.lambda;
    int depth = 0;
    while (current.lambda != to) {
      Complex next = current.lambda + step;
      if (std::abs(to - current.lambda) <= std::abs(step)) next = to;
      try {
        current = solve_with(eq, A, next, current, next == to && final_point ? options : step_options);
        if (depth > 0) {
          step *= 2.0;
          --depth;
        }
      } catch (const SolverError& e) {
        if (++depth > 40) throw SolverError("continuation failed near lambda = " + detail::format_lambda(next) + ": " + e.what(), next, e.residual);
        step *= 0.5;
      }
    }
    return current;
  };

  auto descend = [&](ColorSolution current, Complex to) {
    // vertical moves in geometric steps toward the real axis
    while (current.lambda.imag() > to.imag() * (1.0 + 1e-15)) {
      const double y = std::max(to.imag(), 0.6 * current.lambda.imag());
      const Complex next(to.real(), y);
      current = advance(current, next, next == to);
    }
    if (current.lambda != to) current = advance(current, to, true);
    return current;
  };

  std::vector<ColorSolution> out;
  out.reserve(targets.size());
  std::optional<ColorSolution> previous;
  for (const Complex& raw : targets) {
    const bool lower = raw.imag() < 0;
    const Complex target = lower ? std::conj(raw) : raw;
    ColorSolution sol;
    if (target.imag() == 0.0 && std::abs(target) > 2.0 * A) {
      sol = solve_with(eq, A, target, std::nullopt, options);
    } else if (target.imag() == 0.0) {
      // A real point in [-2A, 2A] is reached from just above the axis and
      // accepted only off the support, where S continues analytically.
      const Complex above(target.real(), 1e-8);
      ColorSolution near = descend(advance(base, Complex(target.real(), anchor.imag()), false), above);
      if (-near.stieltjes.imag() / std::numbers::pi > 1e-6)
        throw SolverError("real target " + detail::format_lambda(target) + " lies in the support of the limit law", target, 0.0);
      sol = solve_with(eq, A, target, near, options);
      if (std::abs(sol.stieltjes - near.stieltjes) > 1e-6)
        throw SolverError("real-axis solution at " + detail::format_lambda(target) + " does not continue the upper branch", target,
                          sol.residual);
    } else if (previous && previous->lambda.real() == target.real() && previous->lambda.imag() > 0) {
      sol = target.imag() <= previous->lambda.imag() ? descend(*previous, target) : advance(*previous, target, true);
    } else {
      const double H = std::max(anchor.imag(), target.imag());
      ColorSolution top = advance(base, Complex(target.real(), H), false);
      sol = descend(top, target);
    }
    previous = sol;
    if (lower) {
      sol.lambda = raw;
      sol.stieltjes = std::conj(sol.stieltjes);
      for (std::size_t a = 0; a < s.intervals(); ++a)
        for (int i = -s.band(); i <= s.band(); ++i) sol.psi.at(a, i) = std::conj(sol.psi.at(a, i));
    }
    out.push_back(std::move(sol));
  }
  return out;
}

}  // namespace detail

inline std::vector<ColorSolution> stieltjes_path(const Kernel& s, const std::vector<Complex>& targets, Complex anchor,
                                                 const SolverOptions& options = {}) {
  return detail::path_with(ColorEquation(s), kernel_bound_A(s), targets, anchor, options);
}

/// Solves at one point. With a warm start, or when |lambda| > 2A or
/// |Im lambda| >= A, the iteration runs directly; otherwise lambda is reached
/// by stieltjes_path from 4A i (real points must then lie off the support).
inline ColorSolution solve_color_fixed_point(const Kernel& s, Complex lambda, const std::optional<ColorSolution>& warm_start = std::nullopt,
                                             const SolverOptions& options = {}) {
  const double A = kernel_bound_A(s);
  if (!warm_start && !(std::abs(lambda) > 2.0 * A) && std::abs(lambda.imag()) < A)
    return detail::path_with(ColorEquation(s), A, {lambda}, Complex(0.0, 4.0 * A), options).front();
  return detail::solve_with(ColorEquation(s), A, lambda, warm_start, options);
}

struct SpectralGrid {
  std::vector<double> xs;
  double epsilon1 = 1e-2;
  double epsilon2 = 5e-3;
  /// Extrapolated density; NaN where the point failed.
  std::vector<double> density;
  /// Largest solver residual used at each point.
  std::vector<double> residual;
  /// true where continuation failed at that x.
  std::vector<bool> failed;
  std::vector<std::string> errors;
  /// Smallest interval outside which the density is below 1e-4, crossings
  /// placed by linear interpolation between grid points.
  std::optional<std::pair<double, double>> support_estimate;
};

inline std::optional<std::pair<double, double>> estimate_support(const std::vector<double>& xs, const std::vector<double>& density,
                                                                 double threshold = 1e-4) {
  std::optional<std::size_t> first, last;
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (std::isfinite(density[i]) && density[i] >= threshold) {
      if (!first) first = i;
      last = i;
    }
  if (!first) return std::nullopt;
  auto cross = [&](std::size_t below, std::size_t above) {
    const double d0 = density[below], d1 = density[above];
    if (!std::isfinite(d0) || d1 == d0) return xs[above];
    return xs[below] + (threshold - d0) / (d1 - d0) * (xs[above] - xs[below]);
  };
  const double lo = *first > 0 ? cross(*first - 1, *first) : xs[*first];
  const double hi = *last + 1 < xs.size() ? cross(*last + 1, *last) : xs[*last];
  return std::make_pair(lo, hi);
}

/// Density at each x by Stieltjes inversion, Richardson-extrapolated from
/// eps1 and eps2: d0 = (eps1 d(eps2) - eps2 d(eps1)) / (eps1 - eps2), clamped at 0.
inline SpectralGrid density_profile(const Kernel& s, const std::vector<double>& xs, double eps1 = 1e-2, double eps2 = 5e-3,
                                    const SolverOptions& options = {}, unsigned threads = 1) {
  if (!(eps1 > 0 && eps2 > 0 && eps2 < eps1)) throw PreconditionError("density needs 0 < eps2 < eps1");
  const double A = kernel_bound_A(s);
  const Complex anchor(0.0, 4.0 * A);
  SpectralGrid grid;
  grid.xs = xs;
  grid.epsilon1 = eps1;
  grid.epsilon2 = eps2;
  grid.density.assign(xs.size(), std::numeric_limits<double>::quiet_NaN());
  grid.residual.assign(xs.size(), std::numeric_limits<double>::quiet_NaN());
  grid.failed.assign(xs.size(), false);
  grid.errors.assign(xs.size(), "");
  std::vector<char> failed(xs.size(), 0);
  parallel_for(xs.size(), threads, [&](std::size_t q) {
    try {
      auto sols = detail::path_with(ColorEquation(s), A, {Complex(xs[q], eps1), Complex(xs[q], eps2)}, anchor, options);
      const double d1 = -sols[0].stieltjes.imag() / std::numbers::pi;
      const double d2 = -sols[1].stieltjes.imag() / std::numbers::pi;
      grid.density[q] = std::max(0.0, (eps1 * d2 - eps2 * d1) / (eps1 - eps2));
      grid.residual[q] = std::max(sols[0].residual, sols[1].residual);
    } catch (const Error& e) {
      failed[q] = 1;
      grid.errors[q] = e.what();
    }
  });
  for (std::size_t q = 0; q < xs.size(); ++q) grid.failed[q] = failed[q] != 0;
  grid.support_estimate = estimate_support(grid.xs, grid.density);
  return grid;
}

/// m_k = (1 / 2 pi i) \oint lambda^k S(lambda) d lambda over |lambda| = radius_factor * 2A,
/// trapezoid rule on `nodes` points; the lower half circle comes from S(conj l) = conj S(l).
inline std::vector<double> contour_moments(const Kernel& s, int kmax, double radius_factor = 1.25, std::size_t nodes = 256,
                                           const SolverOptions& options = {}, unsigned threads = 1) {
  if (kmax < 1) throw PreconditionError("contour_moments needs kmax >= 1");
  if (!(radius_factor > 1.0) || nodes < 8 || nodes % 2) throw PreconditionError("contour_moments needs radius_factor > 1 and an even node count >= 8");
  const double A = kernel_bound_A(s);
  const double R = radius_factor * 2.0 * A;
  const ColorEquation eq(s);
  const std::size_t half = nodes / 2;
  std::vector<Complex> S(half + 1);
  parallel_for(half + 1, threads, [&](std::size_t p) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(p) / static_cast<double>(nodes);
    S[p] = detail::solve_with(eq, A, std::polar(R, t), std::nullopt, options).stieltjes;
  });
  std::vector<double> m(static_cast<std::size_t>(kmax), 0.0);
  for (std::size_t p = 0; p < nodes; ++p) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(p) / static_cast<double>(nodes);
    const Complex Sp = p <= half ? S[p] : std::conj(S[nodes - p]);
    for (int k = 1; k <= kmax; ++k) m[static_cast<std::size_t>(k - 1)] += (std::pow(R, k + 1) * std::polar(1.0, (k + 1) * t) * Sp).real();
  }
  for (auto& v : m) v /= static_cast<double>(nodes);
  return m;
}

/// Rank-one factor f with s(c,c') = f(c) f(c'), normalized so int f dP >= 0.
/// Empty when the coefficient matrix over (i,a) x (j,b) has numerical rank above one.
inline std::optional<NiceFunction<Complex>> rank_one_factor(const Kernel& s, double tolerance = 1e-10) {
  const int K = s.band();
  const std::size_t n = s.intervals(), W = static_cast<std::size_t>(2 * K + 1), D = n * W;
  Eigen::MatrixXcd Mx(static_cast<Eigen::Index>(D), static_cast<Eigen::Index>(D));
  for (std::size_t a = 0; a < n; ++a)
    for (int i = -K; i <= K; ++i)
      for (std::size_t b = 0; b < n; ++b)
        for (int j = -K; j <= K; ++j)
          Mx(static_cast<Eigen::Index>(a * W + static_cast<std::size_t>(i + K)), static_cast<Eigen::Index>(b * W + static_cast<std::size_t>(j + K))) =
              s.coeff(i, j, a, b);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(Mx);
  const auto& sv = svd.singularValues();
  if (sv(0) <= 0.0) return std::nullopt;
  if (sv.size() > 1 && sv(1) > tolerance * sv(0)) return std::nullopt;
  // f f^T = M: f = M[:, c] / sqrt(M[c, c]) for the largest diagonal entry.
  Eigen::Index c = 0;
  for (Eigen::Index r = 1; r < Mx.rows(); ++r)
    if (std::abs(Mx(r, r)) > std::abs(Mx(c, c))) c = r;
  const Complex root = std::sqrt(Mx(c, c));
  NiceFunction<Complex> f(s.partition(), K);
  for (std::size_t a = 0; a < n; ++a)
    for (int i = -K; i <= K; ++i) f.at(a, i) = Mx(static_cast<Eigen::Index>(a * W + static_cast<std::size_t>(i + K)), c) / root;
  if (f.integral().real() < 0)
    for (std::size_t a = 0; a < n; ++a)
      for (int i = -K; i <= K; ++i) f.at(a, i) = -f.at(a, i);
  return f;
}

/// w(lambda) = int f(c) P(dc) / (lambda - Psi(c, lambda)) for a rank-one
/// kernel s = f f. Checks lambda S = 1 + w^2; when int f dP = 1 this w is
/// also int Psi dP.
inline Complex rank_one_w(const Kernel& s, const ColorSolution& sol, double tolerance = 1e-10) {
  auto f = rank_one_factor(s);
  if (!f) throw PreconditionError("kernel is not rank one to tolerance 1e-10");
  const int K = s.band();
  ColorEquation eq(s);
  auto psi = detail::from_nice(s, sol.psi);
  auto ev = eq.apply(sol.lambda, psi, std::max<std::size_t>(sol.nodes, 1), false, 0.0);
  Complex w{};
  for (std::size_t a = 0; a < s.intervals(); ++a)
    for (int i = -K; i <= K; ++i)
      w += s.partition().length_d(a) * f->at(a, i) * ev.ghat[a * static_cast<std::size_t>(2 * K + 1) + static_cast<std::size_t>(i + K)];
  const Complex defect = sol.lambda * ev.S - 1.0 - w * w;
  if (std::abs(defect) > tolerance * std::max(1.0, std::abs(w * w)))
    throw Error("rank-one relation lambda S = 1 + w^2 fails by " + std::to_string(std::abs(defect)));
  return w;
}

inline Complex rank_one_w(const Kernel& s, Complex lambda, const SolverOptions& options = {}) {
  const double A = kernel_bound_A(s);
  if (std::abs(lambda) > 2.0 * A) return rank_one_w(s, solve_color_fixed_point(s, lambda, std::nullopt, options));
  return rank_one_w(s, stieltjes_path(s, {lambda}, Complex(0.0, 4.0 * A), options).front());
}

}  // namespace fspectra
