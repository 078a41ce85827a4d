#pragma once
// Color space C = [0,1] x S^1, covariance kernels on C x C, and filters.
//
// A kernel is stored as its Fourier table
//
//   s(c, c') = sum_{i,j in [-K,K]} s_ij(x, y) xi^i eta^j,   c = (x, xi), c' = (y, eta)
//
// with every s_ij constant on the cells I_a x I_b of a finite partition of
// [0,1]. Coefficients are exact rationals; a double copy is cached for the
// numerical code paths.

#include "fspectra/exact.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace fspectra {

/// Finite partition of [0,1] into intervals of positive length.
class IntervalPartition {
 public:
  IntervalPartition() : breakpoints_{Rational(0), Rational(1)} {}

  explicit IntervalPartition(std::vector<Rational> breakpoints) : breakpoints_(std::move(breakpoints)) {
    if (breakpoints_.size() < 2) throw PreconditionError("interval partition needs at least 2 breakpoints");
    if (breakpoints_.front() != 0 || breakpoints_.back() != 1)
      throw PreconditionError("interval partition must start at 0 and end at 1");
    for (std::size_t a = 0; a + 1 < breakpoints_.size(); ++a)
      if (!(breakpoints_[a] < breakpoints_[a + 1]))
        throw PreconditionError("interval partition breakpoints must be strictly increasing");
  }

  std::size_t size() const { return breakpoints_.size() - 1; }
  const std::vector<Rational>& breakpoints() const { return breakpoints_; }
  Rational length(std::size_t a) const { return breakpoints_[a + 1] - breakpoints_[a]; }
  double length_d(std::size_t a) const { return length(a).get_d(); }
  double midpoint(std::size_t a) const { return Rational((breakpoints_[a] + breakpoints_[a + 1]) / 2).get_d(); }

  /// Interval containing x; the right endpoint 1 belongs to the last interval.
  std::size_t locate(double x) const {
    for (std::size_t a = 0; a + 1 < size(); ++a)
      if (x < breakpoints_[a + 1].get_d()) return a;
    return size() - 1;
  }

  friend bool operator==(const IntervalPartition&, const IntervalPartition&) = default;

 private:
  std::vector<Rational> breakpoints_;
};

/// A point (x, e^{i theta}) of color space.
struct ColorPoint {
  double x = 0.0;
  double theta = 0.0;
};

class Kernel {
 public:
  Kernel() : Kernel(IntervalPartition{}, 0) {}

  /// Zero kernel with the given shape; fill it with set().
  Kernel(IntervalPartition partition, int band)
      : partition_(std::move(partition)), band_(band), exact_(table_size(), QComplex{}), numeric_(table_size()) {
    if (band_ < 0) throw PreconditionError("kernel band must be nonnegative");
  }

  const IntervalPartition& partition() const { return partition_; }
  std::size_t intervals() const { return partition_.size(); }
  int band() const { return band_; }
  bool is_pure_fourier() const { return partition_.size() == 1; }

  const QComplex& exact(int i, int j, std::size_t a, std::size_t b) const { return exact_[index(i, j, a, b)]; }
  const Complex& coeff(int i, int j, std::size_t a, std::size_t b) const { return numeric_[index(i, j, a, b)]; }

  /// Zero outside the band.
  Complex coeff_or_zero(int i, int j, std::size_t a, std::size_t b) const {
    if (std::abs(i) > band_ || std::abs(j) > band_) return {};
    return coeff(i, j, a, b);
  }

  void set(int i, int j, std::size_t a, std::size_t b, QComplex value) {
    auto idx = index(i, j, a, b);
    numeric_[idx] = value.to_complex();
    exact_[idx] = std::move(value);
  }

  /// Integral of s over C x C, i.e. sum_ab |I_a||I_b| Re s_00(a,b).
  Rational mass() const {
    Rational total = 0;
    for (std::size_t a = 0; a < intervals(); ++a)
      for (std::size_t b = 0; b < intervals(); ++b) total += partition_.length(a) * partition_.length(b) * exact(0, 0, a, b).re;
    return total;
  }

  /// The kernel s(c,c') = value.
  static Kernel constant(Rational value = 1) {
    Kernel k(IntervalPartition{}, 0);
    k.set(0, 0, 0, 0, QComplex(std::move(value)));
    return k;
  }

 private:
  std::size_t width() const { return static_cast<std::size_t>(2 * band_ + 1); }
  std::size_t table_size() const { return width() * width() * partition_.size() * partition_.size(); }
  std::size_t index(int i, int j, std::size_t a, std::size_t b) const {
    if (std::abs(i) > band_ || std::abs(j) > band_ || a >= intervals() || b >= intervals())
      throw PreconditionError("kernel coefficient index out of range");
    auto n = intervals();
    return ((static_cast<std::size_t>(i + band_) * width() + static_cast<std::size_t>(j + band_)) * n + a) * n + b;
  }

  IntervalPartition partition_;
  int band_;
  std::vector<QComplex> exact_;
  std::vector<Complex> numeric_;
};

/// Finite-support real filter h on Z x Z with h(-i,-j) = h(j,i).
class Filter {
 public:
  using Entries = std::map<std::pair<int, int>, Rational>;

  explicit Filter(Entries entries) : entries_(std::move(entries)) {
    std::erase_if(entries_, [](const auto& kv) { return kv.second == 0; });
    if (entries_.empty()) throw PreconditionError("filter vanishes identically");
    int half = 0;
    for (const auto& [ij, v] : entries_) {
      half = std::max({half, std::abs(ij.first), std::abs(ij.second)});
      auto mirror = entries_.find({-ij.second, -ij.first});
      if (mirror == entries_.end() || mirror->second != v) {
        std::ostringstream os;
        os << "filter violates h(-i,-j) = h(j,i) at (" << ij.first << "," << ij.second << ")";
        throw PreconditionError(os.str());
      }
    }
    support_bound_ = 2 * half;
  }

  const Entries& entries() const { return entries_; }
  /// Even K with h(i,j) = 0 whenever max(|i|,|j|) > K/2.
  int support_bound() const { return support_bound_; }

  Rational at(int i, int j) const {
    auto it = entries_.find({i, j});
    return it == entries_.end() ? Rational(0) : it->second;
  }

  Rational l2_norm_squared() const {
    Rational total = 0;
    for (const auto& [ij, v] : entries_) total += v * v;
    return total;
  }

  /// H(xi, eta) = sum h(i,j) xi^i eta^j at xi = e^{i t1}, eta = e^{i t2}.
  Complex transform(double t1, double t2) const {
    Complex total{};
    for (const auto& [ij, v] : entries_) total += v.get_d() * std::polar(1.0, ij.first * t1 + ij.second * t2);
    return total;
  }

 private:
  Entries entries_;
  int support_bound_ = 0;
};

/// Pure-Fourier kernel s = |H|^2 of a filter: s_pq = sum_{i-k=p, j-l=q} h(i,j) h(k,l).
inline Kernel kernel_from_filter(const Filter& h) {
  Kernel s(IntervalPartition{}, h.support_bound());
  std::map<std::pair<int, int>, Rational> acc;
  for (const auto& [ij, v] : h.entries())
    for (const auto& [kl, w] : h.entries()) acc[{ij.first - kl.first, ij.second - kl.second}] += v * w;
  for (const auto& [pq, v] : acc) s.set(pq.first, pq.second, 0, 0, QComplex(v));
  if (s.mass() != h.l2_norm_squared()) throw Error("internal: |H|^2 mass differs from ||h||^2");
  return s;
}

/// s(c, c'); asserts the imaginary residue is roundoff before dropping it.
inline double evaluate_kernel(const Kernel& k, const ColorPoint& c, const ColorPoint& cp) {
  const auto a = k.partition().locate(c.x), b = k.partition().locate(cp.x);
  const int K = k.band();
  Complex total{};
  double scale = 0.0;
  for (int i = -K; i <= K; ++i)
    for (int j = -K; j <= K; ++j) {
      const Complex& v = k.coeff(i, j, a, b);
      if (v == Complex{}) continue;
      total += v * std::polar(1.0, i * c.theta + j * cp.theta);
      scale += std::abs(v);
    }
  if (std::abs(total.imag()) > 1e-12 * std::max(1.0, scale))
    throw Error("kernel evaluation has a non-negligible imaginary part; coefficients are not conjugate symmetric");
  return total.real();
}

struct KernelValidation {
  bool conjugate_symmetric = true;
  bool exchange_symmetric = true;
  bool nonnegative = true;
  bool nondegenerate = true;
  std::vector<std::string> failures;
  /// First grid point where s < -tolerance, when nonnegativity fails.
  std::optional<std::pair<ColorPoint, ColorPoint>> negative_point;
  double sup_norm = 0.0;
  double l1_norm = 0.0;
  /// 2 ||s||_inf^{1/2}.
  double A = 0.0;
  std::size_t grid_points_per_circle = 0;

  bool ok() const { return conjugate_symmetric && exchange_symmetric && nonnegative && nondegenerate; }
};

namespace detail {

/// s on the cell (a,b) over a uniform n x n angular grid, row-major in (t1, t2).
inline std::vector<double> kernel_cell_grid(const Kernel& k, std::size_t a, std::size_t b, std::size_t n) {
  const int K = k.band();
  const double step = 2.0 * std::numbers::pi / static_cast<double>(n);
  std::vector<double> out(n * n, 0.0);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q) {
      Complex total{};
      for (int i = -K; i <= K; ++i)
        for (int j = -K; j <= K; ++j) {
          const Complex& v = k.coeff(i, j, a, b);
          if (v != Complex{}) total += v * std::polar(1.0, step * (i * static_cast<double>(p) + j * static_cast<double>(q)));
        }
      out[p * n + q] = total.real();
    }
  return out;
}

struct CellExtremum {
  double value = 0.0;
  std::array<double, 2> theta{};
};

/// Local extremum of the cell polynomial s_ab(t1, t2) near `start`: Newton
/// steps on sign * s, falling back to halved gradient steps, accepted only
/// when they increase sign * s.
inline CellExtremum polish_extremum(const Kernel& k, std::size_t a, std::size_t b, std::array<double, 2> start, double sign) {
  const int K = k.band();
  auto eval = [&](const std::array<double, 2>& t, double* g, double* H) {
    double f = 0.0;
    if (g) g[0] = g[1] = 0.0;
    if (H) H[0] = H[1] = H[2] = 0.0;
    for (int i = -K; i <= K; ++i)
      for (int j = -K; j <= K; ++j) {
        const Complex& v = k.coeff(i, j, a, b);
        if (v == Complex{}) continue;
        const Complex e = v * std::polar(1.0, i * t[0] + j * t[1]);
        f += e.real();
        if (g) {
          g[0] -= i * e.imag();
          g[1] -= j * e.imag();
        }
        if (H) {
          H[0] -= i * i * e.real();
          H[1] -= i * j * e.real();
          H[2] -= j * j * e.real();
        }
      }
    return sign * f;
  };
  std::array<double, 2> t = start;
  double best = eval(t, nullptr, nullptr);
  for (int it = 0; it < 60; ++it) {
    double g[2], H[3];
    eval(t, g, H);
    for (double& x : g) x *= sign;
    for (double& x : H) x *= sign;
    if (std::hypot(g[0], g[1]) < 1e-15 * std::max(1.0, std::abs(best))) break;
    std::array<double, 2> dir{g[0], g[1]};
    const double det = H[0] * H[2] - H[1] * H[1];
    if (H[0] < 0.0 && det > 0.0) dir = {(-H[2] * g[0] + H[1] * g[1]) / det, (H[1] * g[0] - H[0] * g[1]) / det};
    else {
      const double scale = 1.0 / std::max(1.0, std::abs(H[0]) + std::abs(H[2]));
      dir = {g[0] * scale, g[1] * scale};
    }
    bool moved = false;
    for (double alpha = 1.0; alpha > 1e-12; alpha /= 2) {
      const std::array<double, 2> trial{t[0] + alpha * dir[0], t[1] + alpha * dir[1]};
      const double v = eval(trial, nullptr, nullptr);
      if (v > best) {
        t = trial;
        best = v;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  return {sign * best, t};
}

}  // namespace detail

/// Checks the structural kernel assumptions and measures ||s||_inf, ||s||_1.
///
/// Nonnegativity and the sup norm come from a uniform angular grid of 16K+1
/// points per circle on each interval cell, with the largest and smallest
/// grid values of each cell refined by Newton's method.
inline KernelValidation validate_kernel(const Kernel& k, double tolerance = 1e-12) {
  KernelValidation report;
  const int K = k.band();
  const std::size_t n = k.intervals();

  for (int i = -K; i <= K; ++i)
    for (int j = -K; j <= K; ++j)
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
          const Complex v = k.coeff(i, j, a, b);
          if (report.conjugate_symmetric && std::abs(k.coeff(-i, -j, a, b) - std::conj(v)) > tolerance) {
            report.conjugate_symmetric = false;
            std::ostringstream os;
            os << "conjugate symmetry fails: s(" << -i << "," << -j << ") != conj s(" << i << "," << j << ") on cell (" << a
               << "," << b << ")";
            report.failures.push_back(os.str());
          }
          if (report.exchange_symmetric && std::abs(k.coeff(j, i, b, a) - v) > tolerance) {
            report.exchange_symmetric = false;
            std::ostringstream os;
            os << "exchange symmetry fails: s_(" << j << "," << i << ")(" << b << "," << a << ") != s_(" << i << "," << j
               << ")(" << a << "," << b << ")";
            report.failures.push_back(os.str());
          }
        }

  const std::size_t points = static_cast<std::size_t>(std::max(16 * K + 1, 1));
  const double step = 2.0 * std::numbers::pi / static_cast<double>(points);
  double sup = 0.0, min_value = INFINITY;
  std::pair<ColorPoint, ColorPoint> argmin{};
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      const auto values = detail::kernel_cell_grid(k, a, b, points);
      std::size_t hi = 0, lo = 0;
      for (std::size_t q = 1; q < values.size(); ++q) {
        if (std::abs(values[q]) > std::abs(values[hi])) hi = q;
        if (values[q] < values[lo]) lo = q;
      }
      auto start = [&](std::size_t q) { return std::array<double, 2>{step * static_cast<double>(q / points), step * static_cast<double>(q % points)}; };
      const auto top = detail::polish_extremum(k, a, b, start(hi), values[hi] >= 0.0 ? 1.0 : -1.0);
      sup = std::max(sup, std::abs(top.value));
      auto low = detail::polish_extremum(k, a, b, start(lo), -1.0);
      if (values[lo] < low.value) low = {values[lo], start(lo)};
      if (low.value < min_value) {
        min_value = low.value;
        argmin = {ColorPoint{k.partition().midpoint(a), low.theta[0]}, ColorPoint{k.partition().midpoint(b), low.theta[1]}};
      }
    }
  report.grid_points_per_circle = points;

  if (min_value < -tolerance) {
    report.nonnegative = false;
    report.negative_point = argmin;
    std::ostringstream os;
    os << "nonnegativity fails: s = " << min_value << " at x=" << argmin.first.x << ", theta1=" << argmin.first.theta
       << ", y=" << argmin.second.x << ", theta2=" << argmin.second.theta;
    report.failures.push_back(os.str());
  }

  report.sup_norm = sup;
  report.A = 2.0 * std::sqrt(std::max(sup, 0.0));
  report.l1_norm = k.mass().get_d();
  if (!(report.l1_norm > 0.0)) {
    report.nondegenerate = false;
    report.failures.push_back("kernel is degenerate: ||s||_1 = 0");
  }
  return report;
}

/// 2 ||s||_inf^{1/2}; throws if the kernel is invalid.
inline double kernel_bound_A(const Kernel& k) {
  auto report = validate_kernel(k);
  if (!report.ok()) throw PreconditionError("invalid kernel: " + report.failures.front());
  return report.A;
}

/// The (NE+SE+SW+NW) averaging filter: 1/2 on the four diagonal neighbours.
inline Filter compass_filter() {
  Rational half(1, 2);
  return Filter(Filter::Entries{{{1, -1}, half}, {{1, 1}, half}, {{-1, 1}, half}, {{-1, -1}, half}});
}

/// Delta filter: the filtered matrix is the Wigner matrix itself.
inline Filter delta_filter() { return Filter(Filter::Entries{{{0, 0}, Rational(1)}}); }

}  // namespace fspectra
