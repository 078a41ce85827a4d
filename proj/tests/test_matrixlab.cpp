#include "fspectra/matrixlab.hpp"
#include "test_support.hpp"

#include <catch_amalgamated.hpp>

#include <numeric>

using namespace fspectra;
using Catch::Approx;

TEST_CASE("Philox4x32-10 known-answer vectors") {
  using P = Philox4x32;
  CHECK(P::generate({0, 0, 0, 0}, {0, 0}) == P::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(P::generate({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
        P::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(P::generate({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
        P::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("variates have the right first moments") {
  double sum = 0, sq = 0, rsum = 0;
  int off_support = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double g = philox_variate(9, static_cast<std::uint32_t>(i), 0, 0, EntryLaw::gaussian);
    sum += g;
    sq += g * g;
    const double r = philox_variate(9, static_cast<std::uint32_t>(i), 0, 0, EntryLaw::rademacher);
    if (r != 1.0 && r != -1.0) ++off_support;
    rsum += r;
  }
  CHECK(std::abs(sum / n) < 5.0 / std::sqrt(n));
  CHECK(std::abs(sq / n - 1.0) < 5.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(rsum / n) < 5.0 / std::sqrt(n));
  CHECK(off_support == 0);
}

TEST_CASE("filtered Wigner entries unroll the filter") {
  SampleConfig cfg;
  cfg.N = 6;
  cfg.seed = 17;
  const Matrix X = sample_filtered_wigner(cfg, compass_filter(), 3);
  auto Y = [&](int k, int l) { return wigner_field(cfg.seed, cfg.entry_law, 3, k, l); };
  CHECK(X(1, 3) == Approx(0.5 * (Y(1, 5) + Y(1, 3) + Y(3, 5) + Y(3, 3))).margin(1e-15));
  CHECK(Y(3, 3) == 0.0);
  CHECK(X(0, 0) == Approx(0.5 * (Y(0, 2) + Y(0, 0) + Y(2, 2) + Y(2, 0))).margin(1e-15));
  CHECK(X == X.transpose());
  const Matrix D = sample_filtered_wigner(cfg, delta_filter(), 3);
  CHECK(D(2, 4) == Y(3, 5));
}

TEST_CASE("samples are reproducible and independent across trials and seeds") {
  SampleConfig cfg;
  cfg.N = 40;
  const Matrix a = sample_filtered_wigner(cfg, compass_filter(), 1);
  CHECK(a == sample_filtered_wigner(cfg, compass_filter(), 1));
  CHECK(a != sample_filtered_wigner(cfg, compass_filter(), 2));
  cfg.seed = 43;
  CHECK(a != sample_filtered_wigner(cfg, compass_filter(), 1));
  const Kernel s = kernel_from_filter(compass_filter());
  CHECK(sample_colored_gaussian(s, 8, 5, 0) == sample_colored_gaussian(s, 8, 5, 0));
}

TEST_CASE("threaded simulation matches the serial one bit for bit") {
  SampleConfig cfg;
  cfg.N = 60;
  cfg.trials = 6;
  const auto serial = simulate_filtered_wigner(cfg, compass_filter(), 6);
  cfg.threads = 4;
  const auto threaded = simulate_filtered_wigner(cfg, compass_filter(), 6);
  for (std::size_t t = 0; t < serial.size(); ++t) CHECK(serial[t].empirical_moments == threaded[t].empirical_moments);
}

TEST_CASE("eigenvalues satisfy the trace identities") {
  SampleConfig cfg;
  cfg.N = 80;
  const Matrix X = sample_filtered_wigner(cfg, compass_filter());
  const auto ev = eigenvalues_symmetric(X);
  CHECK(std::is_sorted(ev.begin(), ev.end()));
  double s1 = 0, s2 = 0;
  for (double v : ev) {
    s1 += v;
    s2 += v * v;
  }
  CHECK(s1 == Approx(X.trace()).margin(1e-9));
  CHECK(s2 == Approx(X.squaredNorm()).epsilon(1e-12));
  CHECK(std::abs(s2 - (X * X).trace()) < 1e-9 * s2);
  CHECK(eigen_reconstruction_error(X, 10, 3) < 1e-13);
  Matrix asym = X;
  asym(0, 1) += 1.0;
  CHECK_THROWS_AS(eigenvalues_symmetric(asym), PreconditionError);
}

TEST_CASE("fluctuations of m4 shrink with N") {
  auto spread = [](int N, int trials) {
    SampleConfig cfg;
    cfg.N = N;
    cfg.seed = 5;
    std::vector<double> m4;
    for (int t = 0; t < trials; ++t) {
      const Matrix X = sample_filtered_wigner(cfg, compass_filter(), static_cast<std::uint64_t>(t));
      m4.push_back((X * X).squaredNorm() / std::pow(static_cast<double>(N), 3));
    }
    const double mean = std::accumulate(m4.begin(), m4.end(), 0.0) / trials;
    double var = 0;
    for (double v : m4) var += (v - mean) * (v - mean);
    return var / (trials - 1);
  };
  const double ratio = spread(200, 20) / spread(800, 20);
  INFO("variance ratio " << ratio);
  CHECK(ratio > 2.0);
}

TEST_CASE("colored Gaussian moments match the finite-N Wick expectation") {
  const Kernel s = kernel_from_filter(compass_filter());
  const int N = 6;
  const auto [m2, m4] = testing::colored_finite_n_moments(s, N);
  SampleConfig cfg;
  cfg.N = N;
  cfg.trials = 4000;
  cfg.threads = 4;
  const auto stats = esd_statistics(simulate_colored_gaussian(cfg, s, 4), 4);
  CHECK(std::abs(stats.mean[1] - m2) < 4.0 * stats.standard_error[1]);
  CHECK(std::abs(stats.mean[3] - m4) < 4.0 * stats.standard_error[3]);
  CHECK(std::abs(stats.mean[0]) < 4.0 * stats.standard_error[0]);
}

TEST_CASE("colored Gaussian sampler rejects negative kernels and large N") {
  Kernel bad(IntervalPartition{}, 2);
  bad.set(0, 0, 0, 0, QComplex(Rational(1)));
  bad.set(2, 0, 0, 0, QComplex(Rational(1)));
  bad.set(-2, 0, 0, 0, QComplex(Rational(1)));
  CHECK_THROWS_AS(sample_colored_gaussian(bad, 8, 1), Error);
  CHECK_THROWS_AS(sample_colored_gaussian(Kernel::constant(), kMaxColoredN + 1, 1), PreconditionError);
}

TEST_CASE("entry covariance in general position") {
  SampleConfig cfg;
  cfg.N = 48;
  cfg.trials = 20000;
  cfg.threads = 4;
  CHECK_FALSE(in_general_position({1, 20, 10, 30}, 48, 2));
  CHECK_FALSE(in_general_position({10, 11, 10, 30}, 48, 2));
  CHECK(in_general_position({10, 20, 12, 18}, 48, 2));
  const auto r = covariance_check(compass_filter(), cfg, {10, 20, 12, 18});
  CHECK(r.theoretical == Approx(0.25));
  CHECK(std::abs(r.z_score) < 4.0);
  const auto far = covariance_check(compass_filter(), cfg, {10, 20, 15, 40});
  CHECK(far.theoretical == 0.0);
  CHECK(std::abs(far.z_score) < 4.0);
}

TEST_CASE("histograms use Freedman-Diaconis bins by default") {
  CHECK(freedman_diaconis_bins({1.0}) >= 1);
  SampleConfig cfg;
  cfg.N = 100;
  cfg.trials = 2;
  const auto stats = esd_statistics(simulate_filtered_wigner(cfg, delta_filter(), 4), 4);
  CHECK(stats.trials == 2);
  CHECK(stats.histogram.mass.size() > 1);
}
