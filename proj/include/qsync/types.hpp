#pragma once

#include <complex>

#include <Eigen/Dense>

namespace qsync {

using Complex = std::complex<double>;
using Index = Eigen::Index;

/// Dense operator on the composite resonator x qubit A x qubit B space.
using Operator = Eigen::MatrixXcd;
/// Hermitian, unit-trace, positive semidefinite Operator.
using DensityMatrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

inline constexpr Complex kI{0.0, 1.0};

/// Commutator [A, B].
template <typename A, typename B>
auto commutator(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  return (a * b - b * a).eval();
}

template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

template <typename Derived>
double hermiticity_defect(const Eigen::MatrixBase<Derived>& m) {
  return max_abs(m - m.adjoint());
}

inline Operator projector(const StateVector& psi) { return psi * psi.adjoint(); }

}  // namespace qsync
