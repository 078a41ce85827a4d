#pragma once
// Exact polynomials over Q: univariate (UPoly), multivariate (Polynomial),
// and gcd / squarefree tools for Q[x][y].

#include "fspectra/exact.hpp"

#include <algorithm>
#include <climits>
#include <complex>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace fspectra {

/// Dense univariate polynomial, c[i] is the coefficient of x^i; no trailing zeros.
class UPoly {
 public:
  UPoly() = default;
  explicit UPoly(std::vector<Rational> c) : c_(std::move(c)) { trim(); }
  UPoly(long constant) : c_{Rational(constant)} { trim(); }
  static UPoly constant(Rational v) { return UPoly(std::vector<Rational>{std::move(v)}); }
  static UPoly x() { return UPoly(std::vector<Rational>{0, 1}); }

  bool is_zero() const { return c_.empty(); }
  /// -1 for the zero polynomial.
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<Rational>& coeffs() const { return c_; }
  Rational coeff(int i) const { return i >= 0 && i < static_cast<int>(c_.size()) ? c_[static_cast<std::size_t>(i)] : Rational(0); }
  Rational leading() const { return c_.empty() ? Rational(0) : c_.back(); }

  friend UPoly operator+(const UPoly& a, const UPoly& b) {
    std::vector<Rational> c(std::max(a.c_.size(), b.c_.size()), Rational(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) c[i] += a.c_[i];
    for (std::size_t i = 0; i < b.c_.size(); ++i) c[i] += b.c_[i];
    return UPoly(std::move(c));
  }
  friend UPoly operator-(const UPoly& a) {
    std::vector<Rational> c(a.c_);
    for (auto& v : c) v = -v;
    return UPoly(std::move(c));
  }
  friend UPoly operator-(const UPoly& a, const UPoly& b) { return a + (-b); }
  friend UPoly operator*(const UPoly& a, const UPoly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<Rational> c(a.c_.size() + b.c_.size() - 1, Rational(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
    return UPoly(std::move(c));
  }
  friend UPoly operator*(const UPoly& a, const Rational& s) {
    std::vector<Rational> c(a.c_);
    for (auto& v : c) v *= s;
    return UPoly(std::move(c));
  }
  friend bool operator==(const UPoly& a, const UPoly& b) { return a.c_ == b.c_; }

  /// Quotient and remainder of Euclidean division by b != 0.
  static std::pair<UPoly, UPoly> divmod(const UPoly& a, const UPoly& b) {
    if (b.is_zero()) throw Error("division by the zero polynomial");
    std::vector<Rational> r(a.c_);
    if (a.degree() < b.degree()) return {UPoly{}, a};
    std::vector<Rational> q(static_cast<std::size_t>(a.degree() - b.degree() + 1), Rational(0));
    const Rational lb = b.leading();
    for (int d = a.degree(); d >= b.degree(); --d) {
      const Rational f = r[static_cast<std::size_t>(d)] / lb;
      if (f == 0) continue;
      q[static_cast<std::size_t>(d - b.degree())] = f;
      for (int i = 0; i <= b.degree(); ++i) r[static_cast<std::size_t>(d - b.degree() + i)] -= f * b.c_[static_cast<std::size_t>(i)];
    }
    return {UPoly(std::move(q)), UPoly(std::move(r))};
  }

  /// Quotient that must be exact.
  static UPoly exact_divide(const UPoly& a, const UPoly& b) {
    auto [q, r] = divmod(a, b);
    if (!r.is_zero()) throw Error("internal: inexact univariate division");
    return q;
  }

  UPoly monic() const { return is_zero() ? *this : *this * Rational(1 / leading()); }

  static UPoly gcd(UPoly a, UPoly b) {
    while (!b.is_zero()) {
      auto r = divmod(a, b).second;
      a = std::move(b);
      b = std::move(r);
    }
    return a.monic();
  }

  UPoly derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<Rational> c(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) c[i - 1] = c_[i] * static_cast<long>(i);
    return UPoly(std::move(c));
  }

  Rational evaluate(const Rational& x) const {
    Rational v = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) v = v * x + *it;
    return v;
  }
  Complex evaluate(Complex x) const {
    Complex v{};
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) v = v * x + it->get_d();
    return v;
  }

  /// Integer coefficients with gcd 1 and positive leading coefficient.
  UPoly primitive() const {
    if (is_zero()) return *this;
    mpz_class l = 1, g = 0;
    for (const auto& v : c_) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), v.get_den_mpz_t());
    for (const auto& v : c_) {
      mpz_class n = v.get_num() * (l / v.get_den());
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), n.get_mpz_t());
    }
    Rational scale(l, g);
    if (leading() < 0) scale = -scale;
    return *this * scale;
  }

  std::string to_string(const std::string& var = "x") const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (int i = degree(); i >= 0; --i) {
      const Rational& v = c_[static_cast<std::size_t>(i)];
      if (v == 0) continue;
      os << (first ? (v < 0 ? "-" : "") : (v < 0 ? " - " : " + "));
      Rational a = abs(v);
      if (a != 1 || i == 0) os << a.get_str();
      if (i > 0) os << (a != 1 ? "*" : "") << var << (i > 1 ? "^" + std::to_string(i) : "");
      first = false;
    }
    return os.str();
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }
  std::vector<Rational> c_;
};

/// Sparse multivariate polynomial over Q in a fixed number of variables.
class Polynomial {
 public:
  using Exponent = std::vector<int>;
  using Terms = std::map<Exponent, Rational>;

  Polynomial() = default;
  explicit Polynomial(std::size_t nvars) : nvars_(nvars) {}

  static Polynomial constant(std::size_t nvars, Rational v) {
    Polynomial p(nvars);
    if (v != 0) p.terms_[Exponent(nvars, 0)] = std::move(v);
    return p;
  }
  static Polynomial variable(std::size_t nvars, std::size_t var, int power = 1) {
    Polynomial p(nvars);
    Exponent e(nvars, 0);
    e[var] = power;
    p.terms_[e] = 1;
    return p;
  }
  static Polynomial monomial(Exponent e, Rational v) {
    Polynomial p(e.size());
    if (v != 0) p.terms_[std::move(e)] = std::move(v);
    return p;
  }

  std::size_t nvars() const { return nvars_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  void add_term(const Exponent& e, const Rational& v) {
    if (e.size() != nvars_) throw PreconditionError("exponent length does not match variable count");
    if (v == 0) return;
    auto [it, inserted] = terms_.try_emplace(e, v);
    if (!inserted) {
      it->second += v;
      if (it->second == 0) terms_.erase(it);
    }
  }

  Rational coefficient(const Exponent& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  /// -1 for the zero polynomial.
  int degree(std::size_t var) const {
    int d = -1;
    for (const auto& [e, v] : terms_) d = std::max(d, e[var]);
    return d;
  }
  int total_degree() const {
    int d = -1;
    for (const auto& [e, v] : terms_) {
      int t = 0;
      for (int x : e) t += x;
      d = std::max(d, t);
    }
    return d;
  }

  /// Coefficient of var^d, as a polynomial with var absent.
  Polynomial coefficient_in(std::size_t var, int d) const {
    Polynomial out(nvars_);
    for (const auto& [e, v] : terms_)
      if (e[var] == d) {
        Exponent f = e;
        f[var] = 0;
        out.terms_[f] = v;
      }
    return out;
  }

  bool uses(std::size_t var) const { return degree(var) > 0; }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) {
    check_vars(a, b);
    for (const auto& [e, v] : b.terms_) a.add_term(e, v);
    return a;
  }
  friend Polynomial operator-(const Polynomial& a) {
    Polynomial out(a.nvars_);
    for (const auto& [e, v] : a.terms_) out.terms_[e] = -v;
    return out;
  }
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-b); }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    check_vars(a, b);
    Polynomial out(a.nvars_);
    Exponent e(a.nvars_);
    for (const auto& [ea, va] : a.terms_)
      for (const auto& [eb, vb] : b.terms_) {
        for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
        out.add_term(e, va * vb);
      }
    return out;
  }
  friend Polynomial operator*(const Polynomial& a, const Rational& s) {
    Polynomial out(a.nvars_);
    if (s == 0) return out;
    for (const auto& [e, v] : a.terms_) out.terms_[e] = v * s;
    return out;
  }
  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.nvars_ == b.nvars_ && a.terms_ == b.terms_; }

  Polynomial pow(int n) const {
    Polynomial out = constant(nvars_, 1), base = *this;
    for (; n > 0; n >>= 1) {
      if (n & 1) out = out * base;
      base = base * base;
    }
    return out;
  }

  Polynomial derivative(std::size_t var) const {
    Polynomial out(nvars_);
    for (const auto& [e, v] : terms_)
      if (e[var] > 0) {
        Exponent f = e;
        --f[var];
        out.add_term(f, v * e[var]);
      }
    return out;
  }

  /// Exact quotient a / b; throws if b does not divide a.
  static Polynomial exact_divide(Polynomial a, const Polynomial& b) {
    check_vars(a, b);
    if (b.is_zero()) throw Error("division by the zero polynomial");
    Polynomial q(a.nvars_);
    const auto& [eb, vb] = *b.terms_.rbegin();
    Exponent d(a.nvars_);
    while (!a.is_zero()) {
      const auto& [ea, va] = *a.terms_.rbegin();
      for (std::size_t i = 0; i < d.size(); ++i) {
        d[i] = ea[i] - eb[i];
        if (d[i] < 0) throw Error("internal: inexact multivariate division");
      }
      Polynomial t = monomial(d, va / vb);
      q = q + t;
      a = a - t * b;
    }
    return q;
  }

  Complex evaluate(const std::vector<Complex>& x) const {
    if (x.size() != nvars_) throw PreconditionError("evaluation point has wrong dimension");
    Complex total{};
    for (const auto& [e, v] : terms_) {
      Complex t = v.get_d();
      for (std::size_t i = 0; i < nvars_; ++i)
        if (e[i] != 0) t *= std::pow(x[i], e[i]);
      total += t;
    }
    return total;
  }

  /// Divides out the largest monomial x^e dividing every term.
  Polynomial strip_monomial() const {
    if (is_zero()) return *this;
    Exponent lo(nvars_, INT_MAX);
    for (const auto& [e, v] : terms_)
      for (std::size_t i = 0; i < nvars_; ++i) lo[i] = std::min(lo[i], e[i]);
    Polynomial out(nvars_);
    for (const auto& [e, v] : terms_) {
      Exponent f = e;
      for (std::size_t i = 0; i < nvars_; ++i) f[i] -= lo[i];
      out.terms_[f] = v;
    }
    return out;
  }

  /// Integer coefficients with gcd 1 and positive leading (lex-largest) term.
  Polynomial primitive() const {
    if (is_zero()) return *this;
    mpz_class l = 1, g = 0;
    for (const auto& [e, v] : terms_) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), v.get_den_mpz_t());
    for (const auto& [e, v] : terms_) {
      mpz_class n = v.get_num() * (l / v.get_den());
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), n.get_mpz_t());
    }
    Rational scale(l, g);
    if (terms_.rbegin()->second < 0) scale = -scale;
    return *this * scale;
  }

  /// True when a = c b for a nonzero rational c.
  static bool proportional(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return a.is_zero() && b.is_zero();
    return a.primitive() == b.primitive();
  }

  /// Same polynomial with variables renamed: new variable map[i] receives old variable i.
  Polynomial remap(std::size_t new_nvars, const std::vector<std::size_t>& map) const {
    Polynomial out(new_nvars);
    for (const auto& [e, v] : terms_) {
      Exponent f(new_nvars, 0);
      for (std::size_t i = 0; i < nvars_; ++i) {
        if (e[i] == 0) continue;
        if (i >= map.size() || map[i] >= new_nvars) throw PreconditionError("remap drops a variable that is in use");
        f[map[i]] += e[i];
      }
      out.add_term(f, v);
    }
    return out;
  }

  /// Univariate view when only `var` occurs.
  UPoly to_upoly(std::size_t var) const {
    std::vector<Rational> c(static_cast<std::size_t>(std::max(degree(var) + 1, 0)), Rational(0));
    for (const auto& [e, v] : terms_) {
      for (std::size_t i = 0; i < nvars_; ++i)
        if (i != var && e[i] != 0) throw PreconditionError("polynomial is not univariate");
      c[static_cast<std::size_t>(e[var])] = v;
    }
    return UPoly(std::move(c));
  }

  static Polynomial from_upoly(const UPoly& p, std::size_t nvars, std::size_t var) {
    Polynomial out(nvars);
    for (int i = 0; i <= p.degree(); ++i) {
      Exponent e(nvars, 0);
      e[var] = i;
      out.add_term(e, p.coeff(i));
    }
    return out;
  }

  std::string to_string(const std::vector<std::string>& names) const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      const auto& [e, v] = *it;
      os << (first ? (v < 0 ? "-" : "") : (v < 0 ? " - " : " + "));
      Rational a = abs(v);
      bool constant_term = std::all_of(e.begin(), e.end(), [](int x) { return x == 0; });
      bool wrote = false;
      if (a != 1 || constant_term) {
        os << a.get_str();
        wrote = true;
      }
      for (std::size_t i = 0; i < nvars_; ++i) {
        if (e[i] == 0) continue;
        os << (wrote ? "*" : "") << (i < names.size() ? names[i] : "x" + std::to_string(i)) << (e[i] > 1 ? "^" + std::to_string(e[i]) : "");
        wrote = true;
      }
      first = false;
    }
    return os.str();
  }

 private:
  static void check_vars(const Polynomial& a, const Polynomial& b) {
    if (a.nvars_ != b.nvars_) throw PreconditionError("polynomials have different variable counts");
  }

  std::size_t nvars_ = 0;
  Terms terms_;
};

/// Polynomial in (X, Y): variable 0 is X, variable 1 is Y.
using BivariatePolynomial = Polynomial;

inline BivariatePolynomial bivariate(const std::vector<std::tuple<int, int, Rational>>& terms) {
  Polynomial p(2);
  for (const auto& [dx, dy, v] : terms) p.add_term({dx, dy}, v);
  return p;
}

/// Q[x][y] as dense lists of y-coefficients in Q[x].
namespace qxy {

using Poly = std::vector<UPoly>;

inline Poly from_bivariate(const BivariatePolynomial& f) {
  Poly out(static_cast<std::size_t>(std::max(f.degree(1) + 1, 0)));
  std::vector<std::vector<Rational>> c(out.size());
  for (const auto& [e, v] : f.terms()) {
    auto& row = c[static_cast<std::size_t>(e[1])];
    if (row.size() <= static_cast<std::size_t>(e[0])) row.resize(static_cast<std::size_t>(e[0]) + 1, Rational(0));
    row[static_cast<std::size_t>(e[0])] = v;
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = UPoly(c[i]);
  return out;
}

inline BivariatePolynomial to_bivariate(const Poly& p) {
  Polynomial out(2);
  for (std::size_t j = 0; j < p.size(); ++j)
    for (int i = 0; i <= p[j].degree(); ++i) out.add_term({i, static_cast<int>(j)}, p[j].coeff(i));
  return out;
}

inline void trim(Poly& p) {
  while (!p.empty() && p.back().is_zero()) p.pop_back();
}

inline int degree(const Poly& p) { return static_cast<int>(p.size()) - 1; }

/// Monic gcd in Q[x] of the y-coefficients.
inline UPoly content(const Poly& p) {
  UPoly g;
  for (const auto& c : p) g = UPoly::gcd(g, c);
  return g;
}

inline Poly divide_content(Poly p, const UPoly& c) {
  for (auto& v : p) v = UPoly::exact_divide(v, c);
  return p;
}

inline Poly primitive_part(const Poly& p) {
  if (p.empty()) return p;
  return divide_content(p, content(p));
}

/// Pseudo-remainder of a by b in y: lc(b)^{deg a - deg b + 1} a mod b.
inline Poly pseudo_remainder(Poly a, const Poly& b) {
  const int db = degree(b);
  const UPoly& lb = b.back();
  while (degree(a) >= db && !a.empty()) {
    const int shift = degree(a) - db;
    const UPoly la = a.back();
    for (auto& v : a) v = v * lb;
    for (int i = 0; i <= db; ++i) a[static_cast<std::size_t>(i + shift)] = a[static_cast<std::size_t>(i + shift)] - la * b[static_cast<std::size_t>(i)];
    trim(a);
  }
  return a;
}

/// gcd in Q[x][y] of primitive parts (content gcd ignored), by primitive PRS.
inline Poly primitive_gcd(Poly a, Poly b) {
  a = primitive_part(a);
  b = primitive_part(b);
  if (degree(a) < degree(b)) std::swap(a, b);
  while (!b.empty()) {
    Poly r = pseudo_remainder(a, b);
    a = std::move(b);
    b = r.empty() ? r : primitive_part(r);
  }
  if (a.empty()) return a;
  // Normalize: leading y-coefficient monic in x.
  const Rational l = a.back().leading();
  for (auto& v : a) v = v * Rational(1 / l);
  return a;
}

/// Exact quotient a / b in Q[x][y].
inline Poly exact_divide(Poly a, const Poly& b) {
  const int db = degree(b);
  if (db < 0) throw Error("division by the zero polynomial");
  Poly q(static_cast<std::size_t>(std::max(degree(a) - db + 1, 0)));
  while (degree(a) >= db && !a.empty()) {
    const int shift = degree(a) - db;
    const UPoly t = UPoly::exact_divide(a.back(), b.back());
    q[static_cast<std::size_t>(shift)] = t;
    for (int i = 0; i <= db; ++i) a[static_cast<std::size_t>(i + shift)] = a[static_cast<std::size_t>(i + shift)] - t * b[static_cast<std::size_t>(i)];
    trim(a);
  }
  if (!a.empty()) throw Error("internal: inexact division in Q[x][y]");
  return q;
}

inline Poly derivative_y(const Poly& p) {
  Poly out;
  for (std::size_t j = 1; j < p.size(); ++j) out.push_back(p[j] * Rational(static_cast<long>(j)));
  trim(out);
  return out;
}

/// Squarefree decomposition of a polynomial of positive degree in y, up
/// to content in x: factors[i-1] is the product of the irreducible factors
/// of multiplicity exactly i. Uses f_0 = pp(p), f_{i+1} = gcd(f_i, d f_i / dy),
/// r_i = f_i / f_{i+1}, factors[i] = r_i / r_{i+1}.
inline std::vector<Poly> squarefree(const Poly& p) {
  std::vector<Poly> chain{primitive_part(p)};
  while (degree(chain.back()) > 0) chain.push_back(primitive_gcd(chain.back(), derivative_y(chain.back())));
  std::vector<Poly> radicals;
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) radicals.push_back(primitive_part(exact_divide(chain[i], chain[i + 1])));
  std::vector<Poly> out;
  for (std::size_t i = 0; i < radicals.size(); ++i) {
    const Poly next = i + 1 < radicals.size() ? radicals[i + 1] : Poly{UPoly(1)};
    out.push_back(primitive_part(exact_divide(radicals[i], next)));
  }
  return out;
}

}  // namespace qxy

}  // namespace fspectra
