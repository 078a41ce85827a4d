#pragma once
// Real roots of exact univariate polynomials: Sturm-sequence isolation and
// bisection refinement in exact rational arithmetic.

#include "fspectra/polynomial.hpp"

#include <algorithm>
#include <vector>

namespace fspectra {

struct RealRoot {
  Rational lo;
  Rational hi;
  double midpoint = 0.0;
  /// true when lo == hi is the exact root.
  bool exact = false;
};

namespace detail {

inline std::vector<UPoly> sturm_sequence(const UPoly& p) {
  std::vector<UPoly> seq{p, p.derivative()};
  while (!seq.back().is_zero()) {
    UPoly r = UPoly::divmod(seq[seq.size() - 2], seq.back()).second;
    if (r.is_zero()) break;
    seq.push_back(-r);
  }
  return seq;
}

inline int sign_changes(const std::vector<UPoly>& seq, const Rational& x) {
  int changes = 0, last = 0;
  for (const auto& q : seq) {
    const int s = sgn(q.evaluate(x));
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

}  // namespace detail

/// Isolating intervals (lo, hi] of the distinct real roots in increasing
/// order, each refined by bisection to width <= width.
inline std::vector<RealRoot> real_roots(const UPoly& p, double width = 1e-12) {
  if (p.is_zero()) throw PreconditionError("real_roots of the zero polynomial");
  if (p.degree() == 0) return {};
  const UPoly squarefree = UPoly::exact_divide(p, UPoly::gcd(p, p.derivative()));
  const auto seq = detail::sturm_sequence(squarefree);

  // Cauchy bound 1 + max |a_i / a_n|.
  Rational bound = 0;
  for (int i = 0; i < squarefree.degree(); ++i) bound = std::max<Rational>(bound, abs(Rational(squarefree.coeff(i) / squarefree.leading())));
  bound += 1;

  std::vector<RealRoot> out;
  const Rational target = rational_from_double(width);
  std::vector<std::pair<Rational, Rational>> stack{{-bound, bound}};
  std::vector<std::pair<Rational, Rational>> isolated;
  while (!stack.empty()) {
    auto [lo, hi] = stack.back();
    stack.pop_back();
    const int count = detail::sign_changes(seq, lo) - detail::sign_changes(seq, hi);
    if (count == 0) continue;
    if (count == 1) {
      isolated.emplace_back(lo, hi);
      continue;
    }
    Rational mid = (lo + hi) / 2;
    stack.emplace_back(mid, hi);
    stack.emplace_back(lo, mid);
  }
  for (auto [lo, hi] : isolated) {
    RealRoot r;
    if (squarefree.evaluate(hi) == 0) {
      r.lo = r.hi = hi;
      r.exact = true;
    } else {
      int s_hi = sgn(squarefree.evaluate(hi));
      while (hi - lo > target) {
        Rational mid = (lo + hi) / 2;
        const int s = sgn(squarefree.evaluate(mid));
        if (s == 0) {
          lo = hi = mid;
          r.exact = true;
          break;
        }
        if (s == s_hi)
          hi = mid;
        else
          lo = mid;
        s_hi = sgn(squarefree.evaluate(hi));
      }
      r.lo = lo;
      r.hi = hi;
    }
    r.midpoint = Rational((r.lo + r.hi) / 2).get_d();
    out.push_back(r);
  }
  std::sort(out.begin(), out.end(), [](const RealRoot& a, const RealRoot& b) { return a.lo < b.lo; });
  return out;
}

}  // namespace fspectra
