#pragma once
// Random matrix samplers, eigenvalues and empirical spectral statistics.

#include "fspectra/kernel.hpp"
#include "fspectra/parallel.hpp"
#include "fspectra/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

namespace fspectra {

using Matrix = Eigen::MatrixXd;

struct SampleConfig {
  int N = 100;
  std::uint64_t seed = 42;
  EntryLaw entry_law = EntryLaw::gaussian;
  int trials = 1;
  unsigned threads = 1;

  void check() const {
    if (N < 1) throw PreconditionError("N must be >= 1");
    if (trials < 1) throw PreconditionError("trials must be >= 1");
  }
};

/// The symmetric i.i.d. field Y on Z x Z with Y_kk = 0, one variate per
/// unordered pair {k, l} and trial.
inline double wigner_field(std::uint64_t seed, EntryLaw law, std::uint64_t trial, std::int64_t k, std::int64_t l) {
  if (k == l) return 0.0;
  if (k > l) std::swap(k, l);
  return philox_variate(seed, static_cast<std::uint32_t>(static_cast<std::int32_t>(k)), static_cast<std::uint32_t>(static_cast<std::int32_t>(l)),
                        trial, law);
}

/// X_ij = sum_{(p,q)} h(p,q) Y_{i-p, j+q} for 1 <= i, j <= N.
/// The upper triangle is computed and mirrored, so X is symmetric to the bit.
inline Matrix sample_filtered_wigner(const SampleConfig& cfg, const Filter& h, std::uint64_t trial = 0) {
  cfg.check();
  const int N = cfg.N;
  const int r = h.support_bound() / 2;
  const int W = N + 2 * r;
  // Y over the window {1-r .. N+r}^2, stored at offset r-1.
  Matrix Y(W, W);
  for (int a = 0; a < W; ++a) {
    Y(a, a) = 0.0;
    for (int b = a + 1; b < W; ++b) Y(a, b) = Y(b, a) = wigner_field(cfg.seed, cfg.entry_law, trial, a + 1 - r, b + 1 - r);
  }
  std::vector<std::pair<std::array<int, 2>, double>> taps;
  for (const auto& [pq, v] : h.entries()) taps.push_back({{pq.first, pq.second}, v.get_d()});
  Matrix X(N, N);
  for (int i = 1; i <= N; ++i)
    for (int j = i; j <= N; ++j) {
      double total = 0.0;
      for (const auto& [pq, v] : taps) total += v * Y(i - pq[0] - 1 + r, j + pq[1] - 1 + r);
      X(i - 1, j - 1) = total;
      X(j - 1, i - 1) = total;
    }
  return X;
}

constexpr int kMaxColoredN = 64;

/// N^2 x N^2 matrix with entries 2^{delta_ij/2} sqrt(s(c_i, c_j)) g_{ij}, colors
/// c = (a/N, e^{2 pi i b/N}) at index a N + b. Kernel values below 1e-12 ||s||_inf
/// in magnitude are treated as exact zeros.
inline Matrix sample_colored_gaussian(const Kernel& s, int N, std::uint64_t seed, std::uint64_t trial = 0) {
  if (N < 1) throw PreconditionError("N must be >= 1");
  if (N > kMaxColoredN) throw PreconditionError("colored Gaussian model limited to N <= " + std::to_string(kMaxColoredN));
  const std::size_t n = static_cast<std::size_t>(N);
  std::vector<std::size_t> cell(n);
  for (std::size_t a = 0; a < n; ++a) cell[a] = s.partition().locate(static_cast<double>(a) / N);
  const std::size_t intervals = s.intervals();
  std::vector<std::vector<double>> grids(intervals * intervals);
  double sup = 0.0;
  for (std::size_t a = 0; a < intervals; ++a)
    for (std::size_t b = 0; b < intervals; ++b) {
      grids[a * intervals + b] = detail::kernel_cell_grid(s, a, b, n);
      for (double v : grids[a * intervals + b]) sup = std::max(sup, std::abs(v));
    }
  const double snap = 1e-12 * std::max(sup, 1.0);
  const int D = N * N;
  Matrix X(D, D);
  for (int i = 0; i < D; ++i)
    for (int j = i; j < D; ++j) {
      const auto ai = static_cast<std::size_t>(i / N), bi = static_cast<std::size_t>(i % N);
      const auto aj = static_cast<std::size_t>(j / N), bj = static_cast<std::size_t>(j % N);
      double v = grids[cell[ai] * intervals + cell[aj]][bi * n + bj];
      if (v < -snap) throw Error("kernel is negative at a color grid point");
      if (v < snap) v = 0.0;
      double entry = 0.0;
      if (v > 0.0) {
        entry = std::sqrt(v) * philox_variate(seed, static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), trial, EntryLaw::gaussian);
        if (i == j) entry *= std::numbers::sqrt2;
      }
      X(i, j) = entry;
      X(j, i) = entry;
    }
  return X;
}

/// Sorted spectrum of a real symmetric matrix.
inline std::vector<double> eigenvalues_symmetric(const Matrix& m) {
  if (m.rows() != m.cols()) throw PreconditionError("eigenvalues_symmetric needs a square matrix");
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = i + 1; j < m.cols(); ++j)
      if (m(i, j) != m(j, i)) throw PreconditionError("eigenvalues_symmetric needs a symmetric matrix");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error("internal: symmetric eigensolver did not converge");
  std::vector<double> out(solver.eigenvalues().data(), solver.eigenvalues().data() + solver.eigenvalues().size());
  std::sort(out.begin(), out.end());
  return out;
}

/// max over `pairs` eigenpairs of ||m v - lambda v|| / ||m||_F.
inline double eigen_reconstruction_error(const Matrix& m, int pairs, std::uint64_t seed) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  if (solver.info() != Eigen::Success) throw Error("internal: symmetric eigensolver did not converge");
  const double norm = std::max(m.norm(), 1e-300);
  double worst = 0.0;
  for (int t = 0; t < pairs; ++t) {
    const auto bits = Philox4x32::generate({static_cast<std::uint32_t>(t), 0, 0, 0}, Philox4x32::key_from_seed(seed));
    const Eigen::Index idx = static_cast<Eigen::Index>(bits[0] % static_cast<std::uint32_t>(m.rows()));
    const Eigen::VectorXd v = solver.eigenvectors().col(idx);
    worst = std::max(worst, (m * v - solver.eigenvalues()(idx) * v).norm() / norm);
  }
  return worst;
}

struct ESD {
  /// Sorted eigenvalues of the normalized matrix.
  std::vector<double> eigenvalues;
  /// empirical_moments[k-1] = mean of lambda^k, k = 1..kmax.
  std::vector<double> empirical_moments;
};

/// Eigenvalues of m / scale and their first kmax moments.
inline ESD make_esd(const Matrix& m, double scale, int kmax) {
  ESD esd;
  esd.eigenvalues = eigenvalues_symmetric(m);
  for (double& x : esd.eigenvalues) x /= scale;
  esd.empirical_moments.assign(static_cast<std::size_t>(kmax), 0.0);
  for (int k = 1; k <= kmax; ++k) {
    std::vector<double> powers(esd.eigenvalues.size());
    std::transform(esd.eigenvalues.begin(), esd.eigenvalues.end(), powers.begin(), [k](double x) { return std::pow(x, k); });
    esd.empirical_moments[static_cast<std::size_t>(k - 1)] = pairwise_sum(powers) / static_cast<double>(powers.size());
  }
  return esd;
}

struct Histogram {
  std::vector<double> lo, hi, mass;
};

struct ESDStatistics {
  std::vector<double> mean;
  std::vector<double> standard_error;
  int trials = 0;
  Histogram histogram;
};

/// Freedman-Diaconis bin count for pooled values, at least 1.
inline int freedman_diaconis_bins(std::vector<double> v) {
  if (v.size() < 2) return 1;
  std::sort(v.begin(), v.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto i = static_cast<std::size_t>(pos);
    const double f = pos - static_cast<double>(i);
    return i + 1 < v.size() ? v[i] * (1 - f) + v[i + 1] * f : v[i];
  };
  const double iqr = quantile(0.75) - quantile(0.25);
  const double width = 2.0 * iqr / std::cbrt(static_cast<double>(v.size()));
  const double range = v.back() - v.front();
  if (!(width > 0.0) || !(range > 0.0)) return 1;
  return std::max(1, static_cast<int>(std::ceil(range / width)));
}

/// Moment means with standard errors over trials, and a histogram of the
/// pooled eigenvalues (mass = fraction of eigenvalues per bin).
inline ESDStatistics esd_statistics(const std::vector<ESD>& samples, int kmax, int bins = 0) {
  if (kmax < 1 || kmax > 10) throw PreconditionError("esd_statistics needs 1 <= kmax <= 10");
  if (samples.empty()) throw PreconditionError("esd_statistics needs at least one sample");
  ESDStatistics st;
  st.trials = static_cast<int>(samples.size());
  const double T = static_cast<double>(samples.size());
  for (int k = 1; k <= kmax; ++k) {
    std::vector<double> values;
    for (const auto& e : samples) {
      if (static_cast<int>(e.empirical_moments.size()) < k) throw PreconditionError("sample has fewer moments than kmax");
      values.push_back(e.empirical_moments[static_cast<std::size_t>(k - 1)]);
    }
    const double mean = pairwise_sum(values) / T;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    st.mean.push_back(mean);
    st.standard_error.push_back(samples.size() > 1 ? std::sqrt(ss / (T - 1.0) / T) : std::numeric_limits<double>::quiet_NaN());
  }
  std::vector<double> pooled;
  for (const auto& e : samples) pooled.insert(pooled.end(), e.eigenvalues.begin(), e.eigenvalues.end());
  if (bins <= 0) bins = freedman_diaconis_bins(pooled);
  const auto [mn, mx] = std::minmax_element(pooled.begin(), pooled.end());
  const double lo = *mn, hi = *mx > *mn ? *mx : *mn + 1.0;
  const double width = (hi - lo) / bins;
  std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
  for (double x : pooled) counts[static_cast<std::size_t>(std::min(bins - 1, static_cast<int>((x - lo) / width)))] += 1.0;
  for (int b = 0; b < bins; ++b) {
    st.histogram.lo.push_back(lo + b * width);
    st.histogram.hi.push_back(b + 1 == bins ? hi : lo + (b + 1) * width);
    st.histogram.mass.push_back(counts[static_cast<std::size_t>(b)] / static_cast<double>(pooled.size()));
  }
  return st;
}

/// `cfg.trials` filtered Wigner samples, eigenvalues of X / sqrt(N).
inline std::vector<ESD> simulate_filtered_wigner(const SampleConfig& cfg, const Filter& h, int kmax) {
  cfg.check();
  std::vector<ESD> out(static_cast<std::size_t>(cfg.trials));
  parallel_for(out.size(), cfg.threads, [&](std::size_t t) {
    out[t] = make_esd(sample_filtered_wigner(cfg, h, t), std::sqrt(static_cast<double>(cfg.N)), kmax);
  });
  return out;
}

/// `cfg.trials` colored Gaussian samples, eigenvalues of X / N.
inline std::vector<ESD> simulate_colored_gaussian(const SampleConfig& cfg, const Kernel& s, int kmax) {
  cfg.check();
  std::vector<ESD> out(static_cast<std::size_t>(cfg.trials));
  parallel_for(out.size(), cfg.threads, [&](std::size_t t) {
    out[t] = make_esd(sample_colored_gaussian(s, cfg.N, cfg.seed, t), static_cast<double>(cfg.N), kmax);
  });
  return out;
}

struct IndexQuad {
  int i, j, k, l;
};

struct CovarianceResult {
  double empirical = 0.0;
  double theoretical = 0.0;
  double standard_error = 0.0;
  double z_score = 0.0;
};

/// Q_K for a pure-Fourier kernel: indices farther than K from 0 and N.
inline bool in_general_position(const IndexQuad& q, int N, int K) {
  auto inside = [&](int x) { return x >= 1 && x <= N && std::abs(x) > K && std::abs(x - N) > K; };
  return inside(q.i) && inside(q.j) && inside(q.k) && inside(q.l) && std::min(q.j - q.i, q.l - q.k) > K;
}

/// Monte Carlo estimate of E X_ij X_kl against s_{i-k, l-j}. Entries are
/// computed directly from the Y field, without forming X.
inline CovarianceResult covariance_check(const Filter& h, const SampleConfig& cfg, const IndexQuad& q) {
  cfg.check();
  const int K = h.support_bound();
  if (!in_general_position(q, cfg.N, K)) throw PreconditionError("indices not in general position");
  const Kernel s = kernel_from_filter(h);
  CovarianceResult res;
  res.theoretical = (std::abs(q.i - q.k) <= K && std::abs(q.l - q.j) <= K) ? s.coeff(q.i - q.k, q.l - q.j, 0, 0).real() : 0.0;
  std::vector<std::pair<std::array<int, 2>, double>> taps;
  for (const auto& [pq, v] : h.entries()) taps.push_back({{pq.first, pq.second}, v.get_d()});
  auto entry = [&](std::uint64_t t, int i, int j) {
    double total = 0.0;
    for (const auto& [pq, v] : taps) total += v * wigner_field(cfg.seed, cfg.entry_law, t, i - pq[0], j + pq[1]);
    return total;
  };
  std::vector<double> products(static_cast<std::size_t>(cfg.trials));
  parallel_for(products.size(), cfg.threads, [&](std::size_t t) { products[t] = entry(t, q.i, q.j) * entry(t, q.k, q.l); });
  const double T = static_cast<double>(cfg.trials);
  res.empirical = pairwise_sum(products) / T;
  double ss = 0.0;
  for (double p : products) ss += (p - res.empirical) * (p - res.empirical);
  res.standard_error = cfg.trials > 1 ? std::sqrt(ss / (T - 1.0) / T) : std::numeric_limits<double>::quiet_NaN();
  res.z_score = res.standard_error > 0.0 ? (res.empirical - res.theoretical) / res.standard_error : 0.0;
  return res;
}

}  // namespace fspectra
