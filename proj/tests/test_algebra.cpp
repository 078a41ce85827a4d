#include "fspectra/algebra.hpp"
#include "fspectra/rng.hpp"

#include <catch_amalgamated.hpp>

using namespace fspectra;
using Catch::Approx;

namespace {

Polynomial x1(int power = 1) { return Polynomial::variable(1, 0, power); }
Polynomial c1(long v) { return Polynomial::constant(1, Rational(v)); }

/// Univariate polynomial with small random integer coefficients and nonzero leading term.
Polynomial random_poly(std::uint64_t seed, std::uint32_t stream, int degree) {
  Polynomial p(1);
  for (int d = 0; d <= degree; ++d) {
    const auto bits = Philox4x32::generate({static_cast<std::uint32_t>(d), stream, 0, 0}, Philox4x32::key_from_seed(seed));
    long v = static_cast<long>(bits[0] % 11u) - 5;
    if (d == degree && v == 0) v = 1;
    p.add_term({d}, Rational(v));
  }
  return p;
}

Rational constant_of(const Polynomial& p) { return p.coefficient(std::vector<int>(p.nvars(), 0)); }

bool same(const Polynomial& a, const Polynomial& b) { return a.terms() == b.terms(); }

/// U <- B + A(1+U)C(1+U), the form missing the B U term.
CMatrix printed_u(const WalkBlocks& b) {
  const CMatrix I = CMatrix::Identity(b.A.rows(), b.A.cols());
  CMatrix U = CMatrix::Zero(b.A.rows(), b.A.cols());
  for (int it = 0; it < 2000; ++it) U = b.B + b.A * (I + U) * b.C * (I + U);
  return U;
}

}  // namespace

TEST_CASE("resultants of linear factors") {
  const Polynomial f = x1() - c1(3), g = x1() - c1(7);
  CHECK(constant_of(resultant(f, g, 0)) == -4);
  const Polynomial w = Polynomial::variable(2, 1), X = Polynomial::variable(2, 0);
  const Polynomial r = resultant(w * w - X, w - X * X, 1);
  CHECK(same(r, X.pow(4) - X));
}

TEST_CASE("resultant is multiplicative and vanishes exactly on common factors") {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const Polynomial f = random_poly(seed, 0, 3), g = random_poly(seed, 1, 2), h = random_poly(seed, 2, 4);
    CHECK(constant_of(resultant(f * g, h, 0)) == constant_of(resultant(f, h, 0)) * constant_of(resultant(g, h, 0)));
    const Rational fg = constant_of(resultant(f, g, 0));
    const bool coprime = UPoly::gcd(f.to_upoly(0), g.to_upoly(0)).degree() == 0;
    CHECK((fg != 0) == coprime);
    CHECK(constant_of(resultant(f * h, g * h, 0)) == 0);
  }
  CHECK_THROWS_AS(resultant(c1(2), c1(3), 0), PreconditionError);
  CHECK_THROWS_AS(resultant(Polynomial(1), x1(), 0), PreconditionError);
}

TEST_CASE("discriminants") {
  const Polynomial y = Polynomial::variable(2, 1), X = Polynomial::variable(2, 0);
  CHECK(same(discriminant(y * y - X, 1), Polynomial::constant(2, 4) * X));
  CHECK(constant_of(discriminant(x1(2) - c1(3) * x1() + c1(1), 0)) == 5);
  CHECK(constant_of(discriminant(x1(3) - x1(), 0)) == 4);
}

TEST_CASE("real roots by Sturm sequences") {
  const auto r2 = real_roots(UPoly({-2, 0, 1}));
  REQUIRE(r2.size() == 2);
  CHECK(r2[0].midpoint == Approx(-std::sqrt(2.0)).epsilon(1e-12));
  CHECK(r2[1].midpoint == Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(real_roots(UPoly({1, 0, 1})).empty());
  const auto r = real_roots(UPoly({-1024, 0, 107, 0, 8}));
  REQUIRE(r.size() == 2);
  const double edge = 0.25 * std::sqrt(-107.0 + 51.0 * std::sqrt(17.0));
  CHECK(r[1].midpoint == Approx(edge).epsilon(1e-12));
  CHECK(edge == Approx(2.540649362201776).epsilon(1e-14));
  const auto dbl = real_roots(UPoly({0, 0, 1}) * UPoly({-1, 1}));
  REQUIRE(dbl.size() == 2);
  CHECK(dbl[0].midpoint == Approx(0.0).margin(1e-12));
}

TEST_CASE("rational functions are reduced with a monic denominator") {
  const UnivariateRationalFunction f(UPoly({-1, 0, 1}), UPoly({-4, 2, 2}));
  CHECK(f.denominator() == UPoly({2, 1}));
  CHECK(f.numerator() == UPoly({Rational(1, 2), Rational(1, 2)}));
  const Complex z(3.0, 1.0);
  CHECK(std::abs(f.evaluate(z) - (z + 1.0) / (2.0 * (z + 2.0))) < 1e-15);
  const UnivariateRationalFunction g(UPoly({-1, 0, 1}), UPoly({-2, 2}));
  CHECK(g.denominator() == UPoly({1}));
  CHECK_THROWS_AS(UnivariateRationalFunction(UPoly({1}), UPoly(std::vector<Rational>{})), PreconditionError);
}

TEST_CASE("compass filter curve by elimination") {
  const Kernel s = kernel_from_filter(compass_filter());
  const auto relation = bivariate({{2, 2, Rational(1)}, {1, 2, Rational(-2)}, {0, 0, Rational(-1)}});
  const auto result = rank_one_eliminate(relation, s);
  const auto quartic = bivariate({{2, 4, Rational(4)}, {3, 3, Rational(-1)}, {2, 2, Rational(-1)}, {1, 1, Rational(1)}, {0, 0, Rational(1)}});
  CHECK(Polynomial::proportional(result.curve, quartic));
  const auto disc = discriminant(quartic, 1).to_upoly(0);
  const auto roots = real_roots(disc * quartic.coefficient_in(1, 4).to_upoly(0));
  REQUIRE(roots.size() == 3);
  CHECK(roots[0].midpoint == Approx(-2.540649362201776).epsilon(1e-12));
  CHECK(roots[1].midpoint == Approx(0.0).margin(1e-12));
  CHECK(roots[2].midpoint == Approx(2.540649362201776).epsilon(1e-12));
}

TEST_CASE("rank-one curves for the delta and two-atom kernels") {
  const auto semicircle = rank_one_eliminate(UnivariateRationalFunction(UPoly({1}), UPoly({-1, 1})), Kernel::constant());
  CHECK(Polynomial::proportional(semicircle.curve, bivariate({{1, 1, Rational(1)}, {0, 2, Rational(-1)}, {0, 0, Rational(-1)}})));

  Kernel two_atom(IntervalPartition({Rational(0), Rational(1, 2), Rational(1)}), 0);
  two_atom.set(0, 0, 1, 1, QComplex(Rational(4)));
  const auto r = rank_one_eliminate(UnivariateRationalFunction(UPoly({-1, 1}), UPoly({0, -2, 1})), two_atom);
  CHECK(Polynomial::proportional(r.curve, bivariate({{3, 1, Rational(1)}, {2, 2, Rational(-4)}, {2, 0, Rational(-1)}, {1, 1, Rational(4)}, {0, 0, Rational(-1)}})));
  for (const auto& c : r.candidates)
    if (c.accepted) CHECK(c.residual < 1e-8);
}

TEST_CASE("verify_curve separates right and wrong curves") {
  const Kernel s = Kernel::constant();
  const auto right = bivariate({{0, 2, Rational(1)}, {1, 1, Rational(-1)}, {0, 0, Rational(1)}});
  const auto wrong = bivariate({{0, 2, Rational(1)}, {1, 1, Rational(-1)}, {0, 0, Rational(2)}});
  const auto lambdas = circle_samples(6.0, 20);
  for (const auto& l : lambdas) CHECK(l.imag() != 0.0);
  CHECK(verify_curve(right, s, lambdas).max_residual < 1e-10);
  CHECK(verify_curve(right, s, {Complex(3.0, 0.0), Complex(0.2, 0.1)}).max_residual < 1e-10);
  CHECK(verify_curve(wrong, s, lambdas).max_residual > 0.1);
  CHECK_THROWS_AS(verify_curve(Polynomial::variable(2, 0), s, lambdas), PreconditionError);
}

TEST_CASE("random-walk recursions agree with path sums") {
  const std::vector<Complex> z1{0.1, 0.2, 0.1};
  const auto check1 = random_walk_recursion_check(z1, 1, 80);
  CHECK(check1.max_residual < 1e-10);
  CHECK(check1.tail_bound < 1e-10);

  std::vector<Complex> z2;
  for (std::uint32_t k = 0; k < 5; ++k) {
    const auto bits = Philox4x32::generate({k, 0, 0, 0}, Philox4x32::key_from_seed(77));
    z2.push_back(std::polar(0.06, 2.0 * std::numbers::pi * uniform_open(bits[0])));
  }
  const auto check2 = random_walk_recursion_check(z2, 2, 60);
  CHECK(check2.max_residual < 1e-10);

  const auto zero = solve_walk_recursions({0.0, 0.0, 0.0}, 1);
  CHECK(zero.U.isZero(0.0));
  CHECK(zero.W.isZero(0.0));
  CHECK(zero.residual < 1e-14);
  CHECK_THROWS_AS(solve_walk_recursions({0.5, 0.1, 0.5}, 1), PreconditionError);
}

TEST_CASE("dropping the B U term breaks agreement with path sums") {
  const std::vector<Complex> z{0.1, 0.2, 0.1};
  const auto series = walk_series(z, 1, 80);
  const auto fixed = solve_walk_recursions(z, 1);
  CHECK((fixed.U - series.U).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((printed_u(walk_blocks(z, 1)) - series.U).cwiseAbs().maxCoeff() > 1e-3);
}
