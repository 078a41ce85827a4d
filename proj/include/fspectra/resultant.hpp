#pragma once
// Resultants and discriminants of multivariate polynomials over Q via the
// Sylvester matrix and fraction-free (Bareiss) elimination.

#include "fspectra/polynomial.hpp"

#include <string>
#include <utility>
#include <vector>

namespace fspectra {

using PolyMatrix = std::vector<std::vector<Polynomial>>;

/// Sylvester matrix of p and q as polynomials in `var`: deg q rows of p's
/// coefficients followed by deg p rows of q's, highest power first.
inline PolyMatrix sylvester_matrix(const Polynomial& p, const Polynomial& q, std::size_t var) {
  const int m = p.degree(var), n = q.degree(var);
  if (m < 0 || n < 0) throw PreconditionError("resultant of the zero polynomial");
  const std::size_t size = static_cast<std::size_t>(m + n);
  const Polynomial zero(p.nvars());
  PolyMatrix S(size, std::vector<Polynomial>(size, zero));
  for (int r = 0; r < n; ++r)
    for (int d = 0; d <= m; ++d) S[static_cast<std::size_t>(r)][static_cast<std::size_t>(r + m - d)] = p.coefficient_in(var, d);
  for (int r = 0; r < m; ++r)
    for (int d = 0; d <= n; ++d) S[static_cast<std::size_t>(n + r)][static_cast<std::size_t>(r + n - d)] = q.coefficient_in(var, d);
  return S;
}

/// Determinant by Bareiss elimination; every division is exact.
inline Polynomial bareiss_determinant(PolyMatrix M, std::size_t nvars) {
  const std::size_t n = M.size();
  if (n == 0) return Polynomial::constant(nvars, 1);
  Polynomial previous = Polynomial::constant(nvars, 1);
  bool negate = false;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (M[k][k].is_zero()) {
      std::size_t r = k + 1;
      while (r < n && M[r][k].is_zero()) ++r;
      if (r == n) return Polynomial(nvars);
      std::swap(M[k], M[r]);
      negate = !negate;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j)
        M[i][j] = Polynomial::exact_divide(M[i][j] * M[k][k] - M[i][k] * M[k][j], previous);
      M[i][k] = Polynomial(nvars);
    }
    previous = M[k][k];
  }
  return negate ? -M[n - 1][n - 1] : M[n - 1][n - 1];
}

/// res_var(p, q). If one input is constant in var, the resultant is that
/// constant raised to the other's degree.
inline Polynomial resultant(const Polynomial& p, const Polynomial& q, std::size_t var) {
  if (p.nvars() != q.nvars()) throw PreconditionError("resultant operands have different variable counts");
  if (p.is_zero() || q.is_zero()) throw PreconditionError("resultant operand is the zero polynomial");
  if (p.degree(var) == 0 && q.degree(var) == 0)
    throw PreconditionError("resultant is degenerate: both polynomials are constant in the eliminated variable");
  return bareiss_determinant(sylvester_matrix(p, q, var), p.nvars());
}

/// (-1)^{n(n-1)/2} res_var(F, dF/dvar) / lc_var(F), n = deg_var F.
inline Polynomial discriminant(const Polynomial& F, std::size_t var) {
  const int n = F.degree(var);
  if (n < 1) throw PreconditionError("discriminant needs positive degree in the variable");
  const Polynomial lc = F.coefficient_in(var, n);
  if (lc.is_zero()) throw Error("zero leading coefficient in discriminant");
  if (n == 1) return Polynomial::constant(F.nvars(), 1);
  Polynomial d = Polynomial::exact_divide(resultant(F, F.derivative(var), var), lc);
  return (n * (n - 1) / 2) % 2 ? -d : d;
}

}  // namespace fspectra
