#pragma once
// Exact rational and complex-rational scalars, string parsing, and the
// scalar traits shared by the exact and floating-point code paths.

#include <gmpxx.h>

#include <cctype>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fspectra {

using Rational = mpq_class;
using Complex = std::complex<double>;

/// Base class of every error raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A documented precondition of an operation was not met.
struct PreconditionError : Error {
  using Error::Error;
};

/// Parses "p/q", an integer, or a decimal with optional exponent
/// ("-1.25e-3") into an exact rational.
inline Rational parse_rational(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  text = trim(text);
  if (text.empty()) throw PreconditionError("empty rational literal");

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Rational num = parse_rational(text.substr(0, slash));
    Rational den = parse_rational(text.substr(slash + 1));
    if (den == 0) throw PreconditionError("zero denominator in rational literal '" + std::string(text) + "'");
    Rational q = num / den;
    q.canonicalize();
    return q;
  }

  bool negative = false;
  std::size_t pos = 0;
  if (text[pos] == '+' || text[pos] == '-') {
    negative = text[pos] == '-';
    ++pos;
  }
  std::string digits;
  long exponent = 0;
  bool seen_point = false, seen_digit = false;
  for (; pos < text.size(); ++pos) {
    char ch = text[pos];
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      digits.push_back(ch);
      seen_digit = true;
      if (seen_point) --exponent;
    } else if (ch == '.' && !seen_point) {
      seen_point = true;
    } else if (ch == 'e' || ch == 'E') {
      long e = 0;
      auto tail = text.substr(pos + 1);
      if (!tail.empty() && tail.front() == '+') tail.remove_prefix(1);
      auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), e);
      if (ec != std::errc() || ptr != tail.data() + tail.size())
        throw PreconditionError("bad exponent in '" + std::string(text) + "'");
      exponent += e;
      pos = text.size();
      break;
    } else {
      throw PreconditionError("bad rational literal '" + std::string(text) + "'");
    }
  }
  if (!seen_digit) throw PreconditionError("bad rational literal '" + std::string(text) + "'");

  mpz_class mantissa(digits, 10);
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
  Rational q = exponent >= 0 ? Rational(mantissa * scale) : Rational(mantissa, scale);
  q.canonicalize();
  return negative ? Rational(-q) : q;
}

/// Shortest round-trip decimal of a double, read back exactly. This keeps
/// "0.1" meaning 1/10 rather than the nearest binary fraction.
inline Rational rational_from_double(double value) {
  if (!std::isfinite(value)) throw PreconditionError("non-finite value cannot be made rational");
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw PreconditionError("double formatting failed");
  return parse_rational(std::string_view(buf, static_cast<std::size_t>(ptr - buf)));
}

inline std::string to_string(const Rational& q) { return q.get_str(); }

/// Exact complex number with rational parts.
struct QComplex {
  Rational re{0};
  Rational im{0};

  QComplex() = default;
  QComplex(Rational r) : re(std::move(r)) {}
  QComplex(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}
  QComplex(long r) : re(r) {}

  bool is_zero() const { return re == 0 && im == 0; }
  QComplex conj() const { return {re, -im}; }
  Complex to_complex() const { return {re.get_d(), im.get_d()}; }

  friend QComplex operator+(const QComplex& a, const QComplex& b) { return {a.re + b.re, a.im + b.im}; }
  friend QComplex operator-(const QComplex& a, const QComplex& b) { return {a.re - b.re, a.im - b.im}; }
  friend QComplex operator-(const QComplex& a) { return {-a.re, -a.im}; }
  friend QComplex operator*(const QComplex& a, const QComplex& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend QComplex operator*(const QComplex& a, const Rational& b) { return {a.re * b, a.im * b}; }
  QComplex& operator+=(const QComplex& b) {
    re += b.re;
    im += b.im;
    return *this;
  }
  QComplex& operator-=(const QComplex& b) {
    re -= b.re;
    im -= b.im;
    return *this;
  }
  friend bool operator==(const QComplex& a, const QComplex& b) { return a.re == b.re && a.im == b.im; }
};

/// Operations the nice-function and tree-integral code needs from its scalar.
template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<Complex> {
  using Weight = double;
  static Complex zero() { return {}; }
  static Complex one() { return {1.0, 0.0}; }
  static Complex from_exact(const QComplex& q) { return q.to_complex(); }
  static double weight(const Rational& w) { return w.get_d(); }
  static Complex conj(const Complex& z) { return std::conj(z); }
  static bool is_zero(const Complex& z) { return z == Complex{}; }
  static Complex to_complex(const Complex& z) { return z; }
};

template <>
struct ScalarTraits<QComplex> {
  using Weight = Rational;
  static QComplex zero() { return {}; }
  static QComplex one() { return QComplex(Rational(1)); }
  static QComplex from_exact(const QComplex& q) { return q; }
  static const Rational& weight(const Rational& w) { return w; }
  static QComplex conj(const QComplex& z) { return z.conj(); }
  static bool is_zero(const QComplex& z) { return z.is_zero(); }
  static Complex to_complex(const QComplex& z) { return z.to_complex(); }
};

}  // namespace fspectra
