#pragma once
// Wigner set partitions of {1..k} and their tree integrals.
//
// A Dyck path of length k is read as the contour walk of a rooted planar
// tree, v_0 = root, v_1, ..., v_k = root. Index i belongs to the part of
// vertex v_{i-1}, so part labels in order of first appearance are the
// restricted-growth string of the partition.

#include "fspectra/kernel.hpp"
#include "fspectra/nice_function.hpp"
#include "fspectra/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

namespace fspectra {

struct WignerPartition {
  int k = 0;
  /// Sorted 1-based index lists, ordered by smallest element.
  std::vector<std::vector<int>> parts;
  /// block[i-1] = part holding index i (0-based part number).
  std::vector<int> block;
  /// Tree edges (parent part, child part); part 0 is the root.
  std::vector<std::pair<int, int>> edges;
  /// sigma[i-1] = sigma(i), tau[i-1] = tau(i), both 1-based.
  std::vector<int> sigma;
  std::vector<int> tau;

  int sigma_of(int i) const { return sigma[static_cast<std::size_t>(i - 1)]; }
  int tau_of(int i) const { return tau[static_cast<std::size_t>(i - 1)]; }
  int part_of(int i) const { return block[static_cast<std::size_t>(i - 1)]; }
};

/// tau cycles each part in increasing order; sigma(i) = tau(i) - 1 mod k.
/// Throws if sigma is not a fixed-point-free involution, which happens
/// exactly when the input is not a Wigner partition.
inline std::pair<std::vector<int>, std::vector<int>> canonical_permutations(const WignerPartition& p) {
  const int k = p.k;
  std::vector<int> tau(static_cast<std::size_t>(k), 0), sigma(static_cast<std::size_t>(k), 0);
  for (const auto& part : p.parts)
    for (std::size_t r = 0; r < part.size(); ++r) tau[static_cast<std::size_t>(part[r] - 1)] = part[(r + 1) % part.size()];
  for (int i = 1; i <= k; ++i) {
    int t = tau[static_cast<std::size_t>(i - 1)];
    if (t == 0) throw PreconditionError("parts do not cover {1..k}");
    sigma[static_cast<std::size_t>(i - 1)] = t == 1 ? k : t - 1;
  }
  for (int i = 1; i <= k; ++i) {
    int s = sigma[static_cast<std::size_t>(i - 1)];
    if (s == i) throw PreconditionError("sigma has a fixed point at " + std::to_string(i) + "; not a Wigner partition");
    if (sigma[static_cast<std::size_t>(s - 1)] != i) throw PreconditionError("sigma is not an involution; not a Wigner partition");
  }
  return {tau, sigma};
}

namespace detail {

inline WignerPartition partition_from_dyck(const std::vector<int>& steps) {
  WignerPartition p;
  p.k = static_cast<int>(steps.size());
  std::vector<int> vertex{0}, parent{-1};
  int current = 0, count = 1;
  p.block.resize(steps.size());
  for (std::size_t t = 0; t < steps.size(); ++t) {
    p.block[t] = current;
    if (steps[t] > 0) {
      parent.push_back(current);
      p.edges.emplace_back(current, count);
      current = count++;
    } else {
      current = parent[static_cast<std::size_t>(current)];
    }
  }
  p.parts.assign(static_cast<std::size_t>(count), {});
  for (std::size_t t = 0; t < steps.size(); ++t) p.parts[static_cast<std::size_t>(p.block[t])].push_back(static_cast<int>(t) + 1);
  std::tie(p.tau, p.sigma) = canonical_permutations(p);
  return p;
}

}  // namespace detail

/// Structural checks: vertex/edge counts, no part repeats at consecutive
/// steps, and each tree edge is walked by exactly one sigma-pair of steps.
inline void check_wigner_partition(const WignerPartition& p) {
  const int k = p.k;
  if (static_cast<int>(p.parts.size()) != k / 2 + 1 || static_cast<int>(p.edges.size()) != k / 2)
    throw Error("Wigner partition has wrong vertex or edge count");
  for (int i = 1; i <= k; ++i)
    if (p.part_of(i) == p.part_of(i % k + 1)) throw Error("Wigner partition repeats a part at consecutive steps");
  std::vector<int> used(p.edges.size(), 0);
  for (int i = 1; i <= k; ++i) {
    int u = p.part_of(i), v = p.part_of(i % k + 1);
    int j = p.sigma_of(i);
    if (p.part_of(j) != v || p.part_of(j % k + 1) != u) throw Error("sigma does not pair opposite traversals of an edge");
    auto e = std::find_if(p.edges.begin(), p.edges.end(), [&](const auto& ed) {
      return (ed.first == u && ed.second == v) || (ed.first == v && ed.second == u);
    });
    if (e == p.edges.end()) throw Error("walk step does not follow a tree edge");
    ++used[static_cast<std::size_t>(e - p.edges.begin())];
  }
  for (int c : used)
    if (c != 2) throw Error("tree edge not walked exactly twice");
}

/// All Wigner partitions of {1..k} in restricted-growth-string order.
/// Empty for odd k.
inline std::vector<WignerPartition> enumerate_wigner_partitions(int k) {
  if (k < 1) throw PreconditionError("k must be positive");
  std::vector<WignerPartition> out;
  if (k % 2 != 0) return out;
  std::vector<int> steps;
  std::function<void(int, int)> walk = [&](int up, int height) {
    if (static_cast<int>(steps.size()) == k) {
      out.push_back(detail::partition_from_dyck(steps));
      return;
    }
    if (up < k / 2) {
      steps.push_back(1);
      walk(up + 1, height + 1);
      steps.pop_back();
    }
    if (height > 0) {
      steps.push_back(-1);
      walk(up, height - 1);
      steps.pop_back();
    }
  };
  walk(0, 0);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.block < b.block; });
  return out;
}

enum class TreeIntegralMode { quadrature, fourier_lattice, exact };

/// Evaluates E prod_{edges} s(kappa_A, kappa_B) for Wigner partitions of one size k.
/// Quadrature state is built once per (kernel, k).
class TreeIntegrator {
 public:
  TreeIntegrator(const Kernel& s, int k) : s_(s), k_(k) {
    const int K = s.band();
    grid_ = K == 0 ? 1 : static_cast<std::size_t>(2 * K * k + 1);
    const std::size_t n = s.intervals();
    const std::size_t m = n * grid_;
    weights_.resize(m);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t p = 0; p < grid_; ++p) weights_[a * grid_ + p] = s.partition().length_d(a) / static_cast<double>(grid_);
    values_.assign(m * m, 0.0);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        auto cell = detail::kernel_cell_grid(s, a, b, grid_);
        for (std::size_t p = 0; p < grid_; ++p)
          for (std::size_t q = 0; q < grid_; ++q) values_[(a * grid_ + p) * m + b * grid_ + q] = cell[p * grid_ + q];
      }
    for (int i = -K; i <= K; ++i)
      for (int j = -K; j <= K; ++j)
        if (s.coeff(i, j, 0, 0) != Complex{}) support_.push_back({i, j, s.coeff(i, j, 0, 0)});
  }

  std::size_t angular_nodes() const { return grid_; }

  double quadrature(const WignerPartition& p) const {
    check_size(p);
    const std::size_t m = weights_.size();
    auto children = child_lists(p);
    std::function<std::vector<double>(int)> product_at = [&](int v) {
      std::vector<double> f(m, 1.0);
      for (int c : children[static_cast<std::size_t>(v)]) {
        auto g = product_at(c);
        std::vector<double> msg(m, 0.0);
        for (std::size_t r = 0; r < m; ++r) {
          double total = 0.0;
          const double* row = &values_[r * m];
          for (std::size_t q = 0; q < m; ++q) total += row[q] * weights_[q] * g[q];
          msg[r] = total;
        }
        for (std::size_t r = 0; r < m; ++r) f[r] *= msg[r];
      }
      return f;
    };
    auto root = product_at(0);
    double total = 0.0;
    for (std::size_t r = 0; r < m; ++r) total += weights_[r] * root[r];
    return total;
  }

  /// Sum over labelings f of the walk steps by Fourier indices with zero sum
  /// on every part, of prod_{i < sigma(i)} s_{f(i), f(sigma(i))}.
  Complex fourier_lattice(const WignerPartition& p) const {
    check_size(p);
    if (!s_.is_pure_fourier()) throw PreconditionError("fourier-lattice tree integrals need a single-interval kernel");
    // The up step into each child vertex is the smaller index of its sigma pair.
    // Visiting edges child-first fixes the label at the child from the
    // labels already placed on its own child edges.
    auto children = child_lists(p);
    std::vector<int> order;
    std::function<void(int)> post = [&](int v) {
      for (int c : children[static_cast<std::size_t>(v)]) {
        post(c);
        order.push_back(c);
      }
    };
    post(0);
    std::vector<int> parent(p.parts.size(), -1);
    for (const auto& [u, v] : p.edges) parent[static_cast<std::size_t>(v)] = u;
    std::vector<int> sum(p.parts.size(), 0);
    Complex total{};
    std::function<void(std::size_t, Complex)> assign = [&](std::size_t e, Complex weight) {
      if (e == order.size()) {
        if (sum[0] == 0) total += weight;
        return;
      }
      const int v = order[e], u = parent[static_cast<std::size_t>(v)];
      const int need = -sum[static_cast<std::size_t>(v)];
      for (const auto& term : support_) {
        if (term.j != need) continue;
        sum[static_cast<std::size_t>(u)] += term.i;
        assign(e + 1, weight * term.value);
        sum[static_cast<std::size_t>(u)] -= term.i;
      }
    };
    assign(0, Complex{1.0, 0.0});
    return total;
  }

  /// Leaf elimination on the Fourier coefficients, in scalar type T.
  template <class T>
  T fourier_elimination(const WignerPartition& p) const {
    check_size(p);
    using NF = NiceFunction<T>;
    auto children = child_lists(p);
    std::function<NF(int)> product_at = [&](int v) {
      NF f = NF::constant(s_.partition(), ScalarTraits<T>::one());
      for (int c : children[static_cast<std::size_t>(v)]) f = NF::multiply(f, NF::pair_with_kernel(s_, product_at(c))).trimmed();
      return f;
    };
    return product_at(0).integral();
  }

  double evaluate(const WignerPartition& p, TreeIntegralMode mode) const {
    switch (mode) {
      case TreeIntegralMode::quadrature:
        return quadrature(p);
      case TreeIntegralMode::fourier_lattice:
        return fourier_lattice(p).real();
      case TreeIntegralMode::exact:
        return fourier_elimination<QComplex>(p).re.get_d();
    }
    return 0.0;
  }

 private:
  struct Term {
    int i, j;
    Complex value;
  };

  void check_size(const WignerPartition& p) const {
    if (p.k != k_) throw PreconditionError("tree integrator built for a different k");
  }
  static std::vector<std::vector<int>> child_lists(const WignerPartition& p) {
    std::vector<std::vector<int>> children(p.parts.size());
    for (const auto& [u, v] : p.edges) children[static_cast<std::size_t>(u)].push_back(v);
    return children;
  }

  const Kernel& s_;
  int k_;
  std::size_t grid_ = 1;
  std::vector<double> weights_;
  std::vector<double> values_;
  std::vector<Term> support_;
};

inline double tree_integral(const Kernel& s, const WignerPartition& p, TreeIntegralMode mode = TreeIntegralMode::quadrature) {
  return TreeIntegrator(s, p.k).evaluate(p, mode);
}

inline QComplex tree_integral_exact(const Kernel& s, const WignerPartition& p) {
  return TreeIntegrator(s, p.k).fourier_elimination<QComplex>(p);
}

constexpr int kMaxEnumerationMoment = 16;

/// m_1..m_kmax as sums of tree integrals over all Wigner partitions.
inline std::vector<double> moments_by_enumeration(const Kernel& s, int kmax, TreeIntegralMode mode = TreeIntegralMode::quadrature,
                                                  unsigned threads = 1) {
  if (kmax < 1) throw PreconditionError("kmax must be >= 1");
  if (kmax > kMaxEnumerationMoment)
    throw PreconditionError("kmax " + std::to_string(kmax) + " exceeds the enumeration limit " + std::to_string(kMaxEnumerationMoment));
  std::vector<double> m(static_cast<std::size_t>(kmax), 0.0);
  for (int k = 2; k <= kmax; k += 2) {
    auto parts = enumerate_wigner_partitions(k);
    TreeIntegrator integrator(s, k);
    std::vector<double> values(parts.size());
    parallel_for(parts.size(), threads, [&](std::size_t i) { values[i] = integrator.evaluate(parts[i], mode); });
    m[static_cast<std::size_t>(k - 1)] = pairwise_sum(values);
  }
  return m;
}

inline std::vector<Rational> moments_by_enumeration_exact(const Kernel& s, int kmax) {
  if (kmax < 1) throw PreconditionError("kmax must be >= 1");
  if (kmax > kMaxEnumerationMoment)
    throw PreconditionError("kmax " + std::to_string(kmax) + " exceeds the enumeration limit " + std::to_string(kMaxEnumerationMoment));
  std::vector<Rational> m(static_cast<std::size_t>(kmax), Rational(0));
  for (int k = 2; k <= kmax; k += 2) {
    TreeIntegrator integrator(s, k);
    QComplex total;
    for (const auto& p : enumerate_wigner_partitions(k)) total += integrator.fourier_elimination<QComplex>(p);
    if (total.im != 0) throw Error("internal: exact tree integral sum has a nonzero imaginary part");
    m[static_cast<std::size_t>(k - 1)] = total.re;
  }
  return m;
}

}  // namespace fspectra
