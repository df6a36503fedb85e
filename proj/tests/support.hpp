#pragma once

#include <cstdint>
#include <random>

#include "qsync/model.hpp"

// Hand-rolled generators for the property tests. Fixed seeds keep every
// failure reproducible; the case index goes into the doctest CAPTURE.
namespace qsync::testing {

inline constexpr int kCases = 20;

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64{0x5eedULL * 7919 + seed}; }

inline Operator random_matrix(Index d, std::mt19937_64& g) {
  std::normal_distribution<double> n;
  Operator m(d, d);
  for (Index j = 0; j < d; ++j)
    for (Index i = 0; i < d; ++i) m(i, j) = Complex{n(g), n(g)};
  return m;
}

inline Operator random_hermitian(Index d, std::mt19937_64& g) {
  Operator m = random_matrix(d, g);
  return (m + m.adjoint()) / 2.0;
}

/// Full-rank density matrix G G^dag / Tr.
inline DensityMatrix random_density(Index d, std::mt19937_64& g) {
  Operator m = random_matrix(d, g);
  DensityMatrix rho = m * m.adjoint();
  return rho / rho.trace().real();
}

inline StateVector random_ket(Index d, std::mt19937_64& g) {
  std::normal_distribution<double> n;
  StateVector v(d);
  for (Index i = 0; i < d; ++i) v(i) = Complex{n(g), n(g)};
  return v.normalized();
}

/// Random but physically sensible parameters away from kappa_A = kappa_B.
inline ModelParams random_params(std::mt19937_64& g, int n_max = 2) {
  std::uniform_real_distribution<double> omega(40.0, 80.0), kappa(0.2, 2.0), rate(0.0, 0.5);
  ModelParams p;
  p.omega_A = omega(g);
  p.omega_B = omega(g);
  p.omega_r = omega(g);
  p.kappa_A = kappa(g);
  do {
    p.kappa_B = kappa(g);
  } while (std::abs(p.kappa_B - p.kappa_A) < 0.1);
  p.kappa_AB = kappa(g);
  p.gamma_diss_r = rate(g);
  p.gamma_diss_A = rate(g);
  p.gamma_diss_B = rate(g);
  p.gamma_deph_A = rate(g);
  p.gamma_deph_B = rate(g);
  p.n_max = n_max;
  return p;
}

/// Fig. 1 parameters with only the resonator loss active.
inline ModelParams resonator_only() {
  ModelParams p = default_params();
  p.gamma_diss_r = 0.5;
  return p;
}

}  // namespace qsync::testing
