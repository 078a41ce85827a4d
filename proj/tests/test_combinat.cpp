#include "fspectra/combinat.hpp"
#include "test_support.hpp"

#include <catch_amalgamated.hpp>

#include <set>

using namespace fspectra;
using Catch::Approx;

namespace {

long catalan(int n) {
  long c = 1;
  for (int i = 0; i < n; ++i) c = c * 2 * (2 * i + 1) / (i + 2);
  return c;
}

}  // namespace

TEST_CASE("Wigner partitions are counted by Catalan numbers") {
  for (int k = 1; k <= 14; ++k) {
    const auto parts = enumerate_wigner_partitions(k);
    CHECK(static_cast<long>(parts.size()) == (k % 2 ? 0 : catalan(k / 2)));
    std::set<std::vector<int>> distinct;
    for (const auto& p : parts) {
      CHECK_NOTHROW(check_wigner_partition(p));
      distinct.insert(p.block);
    }
    CHECK(distinct.size() == parts.size());
  }
}

TEST_CASE("sigma is a fixed-point-free involution pairing opposite steps") {
  for (const auto& p : enumerate_wigner_partitions(10))
    for (int i = 1; i <= p.k; ++i) {
      CHECK(p.sigma_of(i) != i);
      CHECK(p.sigma_of(p.sigma_of(i)) == i);
    }
}

TEST_CASE("check_wigner_partition rejects tampered partitions") {
  auto p = enumerate_wigner_partitions(6)[2];
  auto q = p;
  std::swap(q.sigma[0], q.sigma[1]);
  CHECK_THROWS_AS(check_wigner_partition(q), Error);
  q = p;
  q.edges.pop_back();
  CHECK_THROWS_AS(check_wigner_partition(q), Error);
}

TEST_CASE("tree integrals of the constant kernel are 1") {
  const Kernel s = Kernel::constant();
  for (const auto& p : enumerate_wigner_partitions(8)) {
    CHECK(tree_integral(s, p) == Approx(1.0));
    CHECK(tree_integral_exact(s, p) == QComplex(Rational(1)));
  }
}

TEST_CASE("tree integral modes agree for the compass filter") {
  const Kernel s = kernel_from_filter(compass_filter());
  for (int k : {4, 6, 8}) {
    TreeIntegrator integrator(s, k);
    for (const auto& p : enumerate_wigner_partitions(k)) {
      const double exact = integrator.fourier_elimination<QComplex>(p).re.get_d();
      CHECK(integrator.evaluate(p, TreeIntegralMode::quadrature) == Approx(exact).margin(1e-12));
      CHECK(integrator.evaluate(p, TreeIntegralMode::fourier_lattice) == Approx(exact).margin(1e-12));
    }
  }
}

TEST_CASE("quadrature and exact tree integrals agree on multi-interval kernels") {
  for (std::uint64_t seed : {5u, 11u}) {
    const Kernel s = testing::random_two_interval_kernel(seed);
    TreeIntegrator integrator(s, 6);
    for (const auto& p : enumerate_wigner_partitions(6))
      CHECK(integrator.evaluate(p, TreeIntegralMode::quadrature) == Approx(integrator.fourier_elimination<QComplex>(p).re.get_d()).margin(1e-12));
    CHECK_THROWS_AS(integrator.fourier_lattice(enumerate_wigner_partitions(6)[0]), PreconditionError);
  }
}

TEST_CASE("enumeration moments of the compass filter") {
  const auto m = moments_by_enumeration_exact(kernel_from_filter(compass_filter()), 8);
  CHECK(m[0] == 0);
  CHECK(m[1] == 1);
  CHECK(m[2] == 0);
  CHECK(m[3] == 3);
  CHECK(m[5] == Rational(47, 4));
  CHECK(m[7] == Rational(209, 4));
  CHECK_THROWS_AS(moments_by_enumeration(Kernel::constant(), kMaxEnumerationMoment + 1), PreconditionError);
}

TEST_CASE("scaling the kernel by c scales m_2k by c^k") {
  const auto base = moments_by_enumeration_exact(Kernel::constant(), 8);
  const auto scaled = moments_by_enumeration_exact(Kernel::constant(Rational(3)), 8);
  for (int k = 2; k <= 8; k += 2) {
    Rational factor = 1;
    for (int i = 0; i < k / 2; ++i) factor *= 3;
    CHECK(scaled[static_cast<std::size_t>(k - 1)] == base[static_cast<std::size_t>(k - 1)] * factor);
  }
}
