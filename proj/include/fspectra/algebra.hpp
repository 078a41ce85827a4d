#pragma once
// Algebraic curves F(lambda, S) = 0 for the Stieltjes transform: numerical
// certification against the color-equation solver, and the rank-one
// elimination pipeline
//
//   lambda S = 1 + w^2,   1 + w^2 = m T,   m w = lambda,   R(m, T) = 0,
//
// where T = S_f(m) is the Stieltjes transform of the law of f and R is
// either den(m) T - num(m) or a user-supplied polynomial relation.

#include "fspectra/colorsolve.hpp"
#include "fspectra/polynomial.hpp"
#include "fspectra/random_walk.hpp"
#include "fspectra/real_roots.hpp"
#include "fspectra/resultant.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace fspectra {

/// num / den with gcd(num, den) = 1 and den monic.
class UnivariateRationalFunction {
 public:
  UnivariateRationalFunction(UPoly numerator, UPoly denominator) {
    if (denominator.is_zero()) throw PreconditionError("rational function with zero denominator");
    const UPoly g = UPoly::gcd(numerator, denominator);
    if (g.degree() > 0) {
      numerator = UPoly::exact_divide(numerator, g);
      denominator = UPoly::exact_divide(denominator, g);
    }
    const Rational lc = denominator.leading();
    num_ = numerator * Rational(1 / lc);
    den_ = denominator * Rational(1 / lc);
  }

  const UPoly& numerator() const { return num_; }
  const UPoly& denominator() const { return den_; }

  Complex evaluate(Complex x) const { return num_.evaluate(x) / den_.evaluate(x); }

  /// den(m) T - num(m) in (m, T).
  BivariatePolynomial relation() const {
    return Polynomial::from_upoly(den_, 2, 0) * Polynomial::variable(2, 1) - Polynomial::from_upoly(num_, 2, 0);
  }

 private:
  UPoly num_;
  UPoly den_;
};

/// Evenly spaced points on |lambda| = radius, offset by half a step so none is real.
inline std::vector<Complex> circle_samples(double radius, std::size_t count) {
  std::vector<Complex> out;
  for (std::size_t k = 0; k < count; ++k) out.push_back(std::polar(radius, 2.0 * std::numbers::pi * (static_cast<double>(k) + 0.5) / static_cast<double>(count)));
  return out;
}

struct CurveCheck {
  double max_residual = 0.0;
  std::vector<Complex> lambdas;
  std::vector<Complex> stieltjes;
  /// |F(lambda, S)| / |F_n(lambda)|, or / max_j |F_j(lambda)| where F_n(lambda) is tiny.
  std::vector<double> residuals;
};

/// |F(lambda, S(lambda))| at each sample with S from the color-equation solver.
/// Samples with |lambda| <= 2A and |Im lambda| < A are reached by continuation
/// from 4A i; real ones must lie off the support.
inline CurveCheck verify_curve(const BivariatePolynomial& F, const Kernel& k, const std::vector<Complex>& lambdas, const SolverOptions& options = {}) {
  if (F.nvars() != 2) throw PreconditionError("curve must be bivariate");
  if (F.degree(1) < 1) throw PreconditionError("curve must have positive degree in S");
  const double A = kernel_bound_A(k);
  const ColorEquation eq(k);
  const int n = F.degree(1);
  std::vector<UPoly> coeffs;
  for (int j = 0; j <= n; ++j) coeffs.push_back(F.coefficient_in(1, j).to_upoly(0));
  CurveCheck out;
  for (const Complex lambda : lambdas) {
    const bool near_axis = !(std::abs(lambda) > 2.0 * A) && std::abs(lambda.imag()) < A;
    const auto sol = near_axis ? detail::path_with(eq, A, {lambda}, Complex(0.0, 4.0 * A), options).front()
                                : detail::solve_with(eq, A, lambda, std::nullopt, options);
    Complex value{}, power = 1.0;
    double largest = 0.0;
    for (int j = 0; j <= n; ++j) {
      const Complex c = coeffs[static_cast<std::size_t>(j)].evaluate(lambda);
      value += c * power;
      power *= sol.stieltjes;
      largest = std::max(largest, std::abs(c));
    }
    const double lead = std::abs(coeffs.back().evaluate(lambda));
    const double scale = lead >= 1e-8 * largest ? lead : largest;
    const double r = std::abs(value) / scale;
    out.lambdas.push_back(lambda);
    out.stieltjes.push_back(sol.stieltjes);
    out.residuals.push_back(r);
    out.max_residual = std::max(out.max_residual, r);
  }
  return out;
}

struct EliminationOptions {
  /// Candidates are certified on count points of |lambda| = radius_factor * A.
  double radius_factor = 3.0;
  std::size_t samples = 20;
  double tolerance = 1e-8;
  SolverOptions solver{};
};

struct EliminationCandidate {
  BivariatePolynomial curve;
  int multiplicity = 1;
  double residual = 0.0;
  bool accepted = false;
};

struct EliminationResult {
  /// Primitive curve in (lambda, S) that passed verify_curve.
  BivariatePolynomial curve;
  /// Eliminant before factor stripping.
  BivariatePolynomial eliminant;
  std::vector<EliminationCandidate> candidates;
};

namespace detail {

inline Polynomial eliminate_step(const Polynomial& p, const Polynomial& q, std::size_t var, const char* name) {
  Polynomial r = resultant(p, q, var).strip_monomial();
  if (r.is_zero()) throw Error(std::string("elimination collapsed to zero when eliminating ") + name + " from " + p.to_string({"lambda", "S", "w", "m", "T"}) +
                               " and " + q.to_string({"lambda", "S", "w", "m", "T"}) + " (common factor)");
  return r.primitive();
}

}  // namespace detail

/// Eliminates w, m, T from the rank-one system given R(m, T) = 0 (bivariate,
/// variable 0 = m, variable 1 = T). The eliminant is split into squarefree
/// factors in S after removing monomials and content in lambda; each factor
/// is certified against the solver for kernel k, and the lowest-degree
/// certified factor is returned. Throws if none passes.
inline EliminationResult rank_one_eliminate(const BivariatePolynomial& relation, const Kernel& k, const EliminationOptions& options = {}) {
  if (relation.nvars() != 2) throw PreconditionError("S_f relation must be bivariate in (m, T)");
  if (relation.degree(1) < 1) throw PreconditionError("S_f relation must involve T");
  constexpr std::size_t L = 0, S = 1, W = 2, M = 3, T = 4, N = 5;
  const auto var = [](std::size_t v, int p = 1) { return Polynomial::variable(N, v, p); };
  const Polynomial one = Polynomial::constant(N, 1);
  const Polynomial e1 = var(L) * var(S) - one - var(W, 2);
  const Polynomial e2 = var(M) * var(W) - var(L);
  const Polynomial e3 = one + var(W, 2) - var(M) * var(T);
  const Polynomial r = relation.remap(N, {M, T});

  const Polynomial p1 = detail::eliminate_step(e3, r, T, "T");
  const Polynomial p2 = detail::eliminate_step(e2, p1, M, "m");
  const Polynomial p3 = detail::eliminate_step(e1, p2, W, "w");

  EliminationResult out;
  out.eliminant = p3.remap(2, {0, 1});
  if (out.eliminant.degree(1) < 1) throw Error("eliminant does not involve S: " + out.eliminant.to_string({"lambda", "S"}));

  const auto samples = circle_samples(options.radius_factor * kernel_bound_A(k), options.samples);
  const auto factors = qxy::squarefree(qxy::from_bivariate(out.eliminant));
  const EliminationCandidate* best = nullptr;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (qxy::degree(factors[i]) < 1) continue;
    EliminationCandidate c;
    c.curve = qxy::to_bivariate(factors[i]).strip_monomial().primitive();
    c.multiplicity = static_cast<int>(i) + 1;
    c.residual = verify_curve(c.curve, k, samples, options.solver).max_residual;
    c.accepted = c.residual < options.tolerance;
    out.candidates.push_back(c);
  }
  for (const auto& c : out.candidates)
    if (c.accepted && (!best || c.curve.total_degree() < best->curve.total_degree())) best = &c;
  if (!best) {
    std::string report = "no factor of the eliminant passed verify_curve:";
    for (const auto& c : out.candidates) report += " [" + c.curve.to_string({"lambda", "S"}) + "]^" + std::to_string(c.multiplicity) + " residual " + std::to_string(c.residual) + ";";
    throw Error(report);
  }
  out.curve = best->curve;
  return out;
}

inline EliminationResult rank_one_eliminate(const UnivariateRationalFunction& Sf, const Kernel& k, const EliminationOptions& options = {}) {
  return rank_one_eliminate(Sf.relation(), k, options);
}

}  // namespace fspectra
