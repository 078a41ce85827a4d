#pragma once
// Functions on color space that are constant in x on each interval of a
// partition and trigonometric polynomials in the angle:
//
//   F(x, xi) = sum_{|j| <= d} F_j(a) xi^j    for x in I_a.

#include "fspectra/exact.hpp"
#include "fspectra/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace fspectra {

template <class T>
class NiceFunction {
 public:
  using Traits = ScalarTraits<T>;

  NiceFunction() = default;
  NiceFunction(IntervalPartition partition, int degree)
      : partition_(std::move(partition)),
        degree_(degree),
        values_(partition_.size() * static_cast<std::size_t>(2 * degree + 1), Traits::zero()) {
    if (degree < 0) throw PreconditionError("nice function degree must be nonnegative");
  }

  static NiceFunction constant(const IntervalPartition& partition, T value) {
    NiceFunction f(partition, 0);
    for (std::size_t a = 0; a < partition.size(); ++a) f.at(a, 0) = value;
    return f;
  }

  const IntervalPartition& partition() const { return partition_; }
  int degree() const { return degree_; }
  std::size_t intervals() const { return partition_.size(); }

  T& at(std::size_t a, int j) { return values_[index(a, j)]; }
  const T& at(std::size_t a, int j) const { return values_[index(a, j)]; }
  T get(std::size_t a, int j) const { return std::abs(j) > degree_ ? Traits::zero() : at(a, j); }

  /// Smallest degree that represents the same function.
  int effective_degree() const {
    for (int d = degree_; d > 0; --d)
      for (std::size_t a = 0; a < intervals(); ++a)
        if (!Traits::is_zero(at(a, d)) || !Traits::is_zero(at(a, -d))) return d;
    return 0;
  }

  NiceFunction trimmed() const {
    int d = effective_degree();
    if (d == degree_) return *this;
    NiceFunction out(partition_, d);
    for (std::size_t a = 0; a < intervals(); ++a)
      for (int j = -d; j <= d; ++j) out.at(a, j) = at(a, j);
    return out;
  }

  friend NiceFunction operator+(const NiceFunction& f, const NiceFunction& g) {
    check_same_partition(f, g);
    NiceFunction out(f.partition_, std::max(f.degree_, g.degree_));
    for (std::size_t a = 0; a < f.intervals(); ++a)
      for (int j = -out.degree_; j <= out.degree_; ++j) out.at(a, j) = f.get(a, j) + g.get(a, j);
    return out;
  }

  /// Pointwise product; per interval this is a convolution of coefficients.
  /// Throws rather than truncating when the product degree exceeds max_degree.
  static NiceFunction multiply(const NiceFunction& f, const NiceFunction& g, int max_degree = 256) {
    check_same_partition(f, g);
    const int d = f.degree_ + g.degree_;
    if (d > max_degree) throw Error("nice function degree " + std::to_string(d) + " exceeds cap " + std::to_string(max_degree));
    NiceFunction out(f.partition_, d);
    for (std::size_t a = 0; a < f.intervals(); ++a)
      for (int i = -f.degree_; i <= f.degree_; ++i) {
        const T& u = f.at(a, i);
        if (Traits::is_zero(u)) continue;
        for (int j = -g.degree_; j <= g.degree_; ++j) {
          const T& v = g.at(a, j);
          if (!Traits::is_zero(v)) out.at(a, i + j) += u * v;
        }
      }
    return out;
  }

  /// c -> int s(c, c') F(c') P(dc'); the result has degree band(s).
  static NiceFunction pair_with_kernel(const Kernel& s, const NiceFunction& f) {
    if (!(s.partition() == f.partition_)) throw PreconditionError("kernel and nice function use different partitions");
    const int K = s.band();
    NiceFunction out(f.partition_, K);
    for (std::size_t a = 0; a < f.intervals(); ++a)
      for (int i = -K; i <= K; ++i) {
        T total = Traits::zero();
        for (std::size_t b = 0; b < f.intervals(); ++b) {
          const auto w = Traits::weight(f.partition_.length(b));
          for (int j = -K; j <= K; ++j) {
            if (std::abs(j) > f.degree_) continue;
            const T& phi = f.at(b, -j);
            if (Traits::is_zero(phi)) continue;
            const QComplex& sij = s.exact(i, j, a, b);
            if (sij.is_zero()) continue;
            total += Traits::from_exact(sij) * phi * w;
          }
        }
        out.at(a, i) = total;
      }
    return out;
  }

  /// <P, F> = sum_a |I_a| F_0(a).
  T integral() const {
    T total = Traits::zero();
    for (std::size_t a = 0; a < intervals(); ++a) total += at(a, 0) * Traits::weight(partition_.length(a));
    return total;
  }

  Complex evaluate(double x, double theta) const {
    const auto a = partition_.locate(x);
    Complex total{};
    for (int j = -degree_; j <= degree_; ++j) total += Traits::to_complex(at(a, j)) * std::polar(1.0, j * theta);
    return total;
  }

  /// Range of the real part over a uniform angular grid fine enough for the degree,
  /// sampled at the midpoint of every interval.
  std::pair<double, double> real_range(std::size_t min_points = 0) const {
    const std::size_t points = std::max<std::size_t>(min_points, static_cast<std::size_t>(4 * degree_ + 1));
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t a = 0; a < intervals(); ++a) {
      const double x = partition_.midpoint(a);
      for (std::size_t p = 0; p < points; ++p) {
        const double v = evaluate(x, 2.0 * std::numbers::pi * static_cast<double>(p) / static_cast<double>(points)).real();
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
    return {lo, hi};
  }

 private:
  static void check_same_partition(const NiceFunction& f, const NiceFunction& g) {
    if (!(f.partition_ == g.partition_)) throw PreconditionError("nice functions use different partitions");
  }
  std::size_t index(std::size_t a, int j) const {
    if (a >= intervals() || std::abs(j) > degree_) throw PreconditionError("nice function index out of range");
    return a * static_cast<std::size_t>(2 * degree_ + 1) + static_cast<std::size_t>(j + degree_);
  }

  IntervalPartition partition_;
  int degree_ = 0;
  std::vector<T> values_;
};

}  // namespace fspectra
