#pragma once
// Moments of the limit law from the generating-function recursion
//
//   Phi_1 = 1,  Psi_n = s * Phi_n,  Phi_n = sum_{j+m=n-1} Psi_j Phi_m  (n >= 2),
//   m_k = <P, Phi_{k+1}>.

#include "fspectra/kernel.hpp"
#include "fspectra/nice_function.hpp"

#include <vector>

namespace fspectra {

template <class T>
struct PhiPsi {
  /// phi[n-1] = Phi_n, psi[n-1] = Psi_n for n = 1..nmax.
  std::vector<NiceFunction<T>> phi;
  std::vector<NiceFunction<T>> psi;
};

template <class T>
PhiPsi<T> phi_psi_recursion(const Kernel& s, int nmax, int degree_cap = 256) {
  if (nmax < 1) throw PreconditionError("phi/psi recursion needs nmax >= 1");
  using Traits = ScalarTraits<T>;
  const auto& part = s.partition();
  PhiPsi<T> out;
  out.phi.reserve(static_cast<std::size_t>(nmax));
  out.psi.reserve(static_cast<std::size_t>(nmax));
  for (int n = 1; n <= nmax; ++n) {
    NiceFunction<T> phi = NiceFunction<T>::constant(part, n == 1 ? Traits::one() : Traits::zero());
    for (int j = 1; j <= n - 2; ++j) {
      const int m = n - 1 - j;
      const auto& psi_j = out.psi[static_cast<std::size_t>(j - 1)];
      const auto& phi_m = out.phi[static_cast<std::size_t>(m - 1)];
      phi = phi + NiceFunction<T>::multiply(psi_j, phi_m, degree_cap);
    }
    phi = phi.trimmed();
    out.psi.push_back(NiceFunction<T>::pair_with_kernel(s, phi).trimmed());
    out.phi.push_back(std::move(phi));
  }
  return out;
}

/// m_1..m_kmax in floating point.
inline std::vector<double> theoretical_moments(const Kernel& s, int kmax, int degree_cap = 256) {
  if (kmax < 1) throw PreconditionError("kmax must be >= 1");
  auto rec = phi_psi_recursion<Complex>(s, kmax + 1, degree_cap);
  std::vector<double> m;
  for (int k = 1; k <= kmax; ++k) m.push_back(rec.phi[static_cast<std::size_t>(k)].integral().real());
  return m;
}

/// m_1..m_kmax as exact rationals.
inline std::vector<Rational> theoretical_moments_exact(const Kernel& s, int kmax, int degree_cap = 256) {
  if (kmax < 1) throw PreconditionError("kmax must be >= 1");
  auto rec = phi_psi_recursion<QComplex>(s, kmax + 1, degree_cap);
  std::vector<Rational> m;
  for (int k = 1; k <= kmax; ++k) {
    QComplex v = rec.phi[static_cast<std::size_t>(k)].integral();
    if (v.im != 0) throw Error("internal: exact moment has a nonzero imaginary part");
    m.push_back(v.re);
  }
  return m;
}

}  // namespace fspectra
