#pragma once
// Generating functions of a complex-weighted walk on Z with steps in
// [-l, l] (step k - l - 1 has weight z_k, k = 1..2l+1), three ways:
// fixed points of the first-return recursions, truncated path sums, and
// contour quadrature for the window row of W.
//
// Block matrices (indices 1..l): B within a block, A one block up, C one
// block down; D is the one-step matrix on the window {-l..l}. With
// F = B + A(1+U)C and G = B + C(1+V)A the first-return sums are
//
//   U = F (1 + U),   V = G (1 + V),
//   W = (D + diag(C(1+V)A, 0, A(1+U)C)) (1 + W).

#include "fspectra/exact.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace fspectra {

using CMatrix = Eigen::MatrixXcd;

struct WalkBlocks {
  CMatrix A, B, C, D;
};

/// Step weight p(i -> j) = z_{j-i+l+1} for |j - i| <= l.
inline Complex walk_step(const std::vector<Complex>& z, int l, long i, long j) {
  const long d = j - i;
  if (d < -l || d > l) return {};
  return z[static_cast<std::size_t>(d + l)];
}

inline WalkBlocks walk_blocks(const std::vector<Complex>& z, int l) {
  if (l < 1 || z.size() != static_cast<std::size_t>(2 * l + 1)) throw PreconditionError("walk weights need length 2l+1 with l >= 1");
  const int L = 2 * l + 1;
  WalkBlocks w{CMatrix::Zero(l, l), CMatrix::Zero(l, l), CMatrix::Zero(l, l), CMatrix::Zero(L, L)};
  for (int i = 1; i <= l; ++i)
    for (int j = 1; j <= l; ++j) {
      w.A(i - 1, j - 1) = walk_step(z, l, i, j + l);
      w.B(i - 1, j - 1) = walk_step(z, l, i, j);
      w.C(i - 1, j - 1) = walk_step(z, l, i, j - l);
    }
  for (int i = 1; i <= L; ++i)
    for (int j = 1; j <= L; ++j) w.D(i - 1, j - 1) = walk_step(z, l, i, j);
  return w;
}

struct WalkSolution {
  CMatrix U, V, W;
  double residual = 0.0;
  int iterations = 0;
};

inline CMatrix walk_window_excursions(const WalkBlocks& b, const CMatrix& U, const CMatrix& V) {
  const Eigen::Index l = b.A.rows();
  const CMatrix I = CMatrix::Identity(l, l);
  CMatrix E = CMatrix::Zero(2 * l + 1, 2 * l + 1);
  E.topLeftCorner(l, l) = b.C * (I + V) * b.A;
  E.bottomRightCorner(l, l) = b.A * (I + U) * b.C;
  return E;
}

/// Damped fixed-point iteration of the three recursions from zero.
inline WalkSolution solve_walk_recursions(const std::vector<Complex>& z, int l, double tolerance = 1e-15, int max_iterations = 100000) {
  double mass = 0.0;
  for (const auto& v : z) mass += std::abs(v);
  if (!(mass < 1.0)) throw PreconditionError("walk weights need sum |z| < 1");
  const auto b = walk_blocks(z, l);
  const CMatrix I = CMatrix::Identity(l, l), IL = CMatrix::Identity(2 * l + 1, 2 * l + 1);
  WalkSolution s{CMatrix::Zero(l, l), CMatrix::Zero(l, l), CMatrix::Zero(2 * l + 1, 2 * l + 1)};
  auto residual_of = [&](const CMatrix& U, const CMatrix& V, const CMatrix& W, CMatrix& tU, CMatrix& tV, CMatrix& tW) {
    tU = (b.B + b.A * (I + U) * b.C) * (I + U);
    tV = (b.B + b.C * (I + V) * b.A) * (I + V);
    tW = (b.D + walk_window_excursions(b, U, V)) * (IL + W);
    return std::max({(tU - U).cwiseAbs().maxCoeff(), (tV - V).cwiseAbs().maxCoeff(), (tW - W).cwiseAbs().maxCoeff()});
  };
  double omega = 1.0, previous = INFINITY;
  CMatrix tU, tV, tW;
  for (int it = 1; it <= max_iterations; ++it) {
    const double r = residual_of(s.U, s.V, s.W, tU, tV, tW);
    s.residual = r;
    s.iterations = it;
    if (r < tolerance) return s;
    if (r > previous) omega = std::max(omega / 2, 1.0 / 64);
    previous = r;
    s.U += omega * (tU - s.U);
    s.V += omega * (tV - s.V);
    s.W += omega * (tW - s.W);
  }
  throw Error("walk recursions did not converge (sum |z| too close to 1?)");
}

struct WalkSeries {
  CMatrix U, V, W;
  /// (sum |z|)^{t_max+1} / (1 - sum |z|)
  double tail_bound = 0.0;
};

/// Path sums over walks of length 1..t_max, by dynamic programming on positions.
inline WalkSeries walk_series(const std::vector<Complex>& z, int l, int t_max) {
  if (l < 1 || z.size() != static_cast<std::size_t>(2 * l + 1)) throw PreconditionError("walk weights need length 2l+1 with l >= 1");
  const int L = 2 * l + 1;
  const long reach = static_cast<long>(l) * (t_max + 2) + L;
  const long size = 2 * reach + 1;  // positions -reach..reach
  auto run = [&](long start, auto allowed, auto record) {
    std::vector<Complex> cur(static_cast<std::size_t>(size), Complex{}), next(cur.size());
    cur[static_cast<std::size_t>(start + reach)] = 1.0;
    for (int t = 1; t <= t_max; ++t) {
      std::fill(next.begin(), next.end(), Complex{});
      for (long x = -reach; x <= reach; ++x) {
        const Complex w = cur[static_cast<std::size_t>(x + reach)];
        if (w == Complex{}) continue;
        for (long d = -l; d <= l; ++d) {
          const long y = x + d;
          if (y < -reach || y > reach || !allowed(y)) continue;
          next[static_cast<std::size_t>(y + reach)] += w * z[static_cast<std::size_t>(d + l)];
        }
      }
      std::swap(cur, next);
      for (long x = -reach; x <= reach; ++x)
        if (cur[static_cast<std::size_t>(x + reach)] != Complex{}) record(x, cur[static_cast<std::size_t>(x + reach)]);
    }
  };
  WalkSeries out{CMatrix::Zero(l, l), CMatrix::Zero(l, l), CMatrix::Zero(L, L)};
  for (int i = 1; i <= l; ++i) {
    run(i, [](long y) { return y > 0; }, [&](long x, Complex w) {
      if (x >= 1 && x <= l) out.U(i - 1, x - 1) += w;
    });
    run(i, [l](long y) { return y < l + 1; }, [&](long x, Complex w) {
      if (x >= 1 && x <= l) out.V(i - 1, x - 1) += w;
    });
  }
  for (int i = 1; i <= L; ++i)
    run(i - l - 1, [](long) { return true; }, [&](long x, Complex w) {
      if (x >= -l && x <= l) out.W(i - 1, x + l) += w;
    });
  double mass = 0.0;
  for (const auto& v : z) mass += std::abs(v);
  out.tail_bound = mass < 1.0 ? std::pow(mass, t_max + 1) / (1.0 - mass) : INFINITY;
  return out;
}

/// theta_j = -delta_{j,l+1} + (1/2pi) int e^{-i(j-l-1)x} / (1 - sum_k z_k e^{i(k-l-1)x}) dx
/// by the trapezoid rule on `nodes` points, j = 1..2l+1.
inline std::vector<Complex> walk_thetas(const std::vector<Complex>& z, int l, int nodes = 1024) {
  const int L = 2 * l + 1;
  std::vector<Complex> theta(static_cast<std::size_t>(L), Complex{});
  for (int p = 0; p < nodes; ++p) {
    const double x = 2.0 * std::numbers::pi * p / nodes;
    Complex denom = 1.0;
    for (int k = 1; k <= L; ++k) denom -= z[static_cast<std::size_t>(k - 1)] * std::polar(1.0, (k - l - 1) * x);
    for (int j = 1; j <= L; ++j) theta[static_cast<std::size_t>(j - 1)] += std::polar(1.0, -(j - l - 1) * x) / denom;
  }
  for (int j = 1; j <= L; ++j) {
    theta[static_cast<std::size_t>(j - 1)] /= static_cast<double>(nodes);
    if (j == l + 1) theta[static_cast<std::size_t>(j - 1)] -= 1.0;
  }
  return theta;
}

struct WalkCheck {
  double fixed_point_residual = 0.0;
  /// max entry gap between fixed points and truncated series
  double series_gap = 0.0;
  /// max |theta_j - W_{l+1, j}|
  double theta_gap = 0.0;
  double tail_bound = 0.0;
  double max_residual = 0.0;
};

inline WalkCheck random_walk_recursion_check(const std::vector<Complex>& z, int l, int t_max) {
  WalkCheck c;
  const auto fp = solve_walk_recursions(z, l);
  const auto series = walk_series(z, l, t_max);
  const auto theta = walk_thetas(z, l);
  c.fixed_point_residual = fp.residual;
  c.series_gap = std::max({(fp.U - series.U).cwiseAbs().maxCoeff(), (fp.V - series.V).cwiseAbs().maxCoeff(),
                           (fp.W - series.W).cwiseAbs().maxCoeff()});
  for (int j = 1; j <= 2 * l + 1; ++j) c.theta_gap = std::max(c.theta_gap, std::abs(theta[static_cast<std::size_t>(j - 1)] - fp.W(l, j - 1)));
  c.tail_bound = series.tail_bound;
  c.max_residual = std::max({c.fixed_point_residual, c.series_gap, c.theta_gap});
  return c;
}

}  // namespace fspectra
