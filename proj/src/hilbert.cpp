#include "qsync/hilbert.hpp"

#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>

#include "qsync/errors.hpp"

namespace qsync {
namespace {

Eigen::Matrix2cd qubit_identity() { return Eigen::Matrix2cd::Identity(); }

// Single-qubit matrices in the ordered basis {|->, |+>}.
Eigen::Matrix2cd qubit_raise() {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  m(1, 0) = 1.0;
  return m;
}

Eigen::Matrix2cd qubit_z() {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  m(0, 0) = -1.0;
  m(1, 1) = 1.0;
  return m;
}

Operator embed_qubit(const Space& space, Qubit which, const Eigen::Matrix2cd& op) {
  const Operator fock_id = Operator::Identity(space.n_max() + 1, space.n_max() + 1);
  const Eigen::Matrix2cd a_part = which == Qubit::A ? op : qubit_identity();
  const Eigen::Matrix2cd b_part = which == Qubit::B ? op : qubit_identity();
  return Eigen::kroneckerProduct(fock_id, Eigen::kroneckerProduct(a_part, b_part).eval());
}

char level_char(Level s) { return s == Level::Plus ? '+' : '-'; }

}  // namespace

std::string to_string(const BasisIndex& b) {
  return "|" + std::to_string(b.n_phot) + "," + level_char(b.s_A) + "," + level_char(b.s_B) + ">";
}

Space::Space(int n_max) : n_max_(n_max) {
  if (n_max < 1) {
    throw InvalidTruncationError("Fock truncation n_max must be >= 1, got " + std::to_string(n_max));
  }
}

Index Space::flat(const BasisIndex& b) const {
  if (b.n_phot < 0 || b.n_phot > n_max_) {
    throw ShapeError("Fock level " + std::to_string(b.n_phot) + " outside [0, " +
                     std::to_string(n_max_) + "]");
  }
  return 4 * b.n_phot + 2 * static_cast<int>(b.s_A) + static_cast<int>(b.s_B);
}

BasisIndex Space::basis(Index flat) const {
  if (flat < 0 || flat >= dim()) {
    throw ShapeError("flat index " + std::to_string(flat) + " outside the space");
  }
  return {static_cast<int>(flat / 4), static_cast<Level>((flat / 2) % 2), static_cast<Level>(flat % 2)};
}

StateVector Space::ket(const BasisIndex& b) const {
  StateVector v = StateVector::Zero(dim());
  v(flat(b)) = 1.0;
  return v;
}

Space build_space(int n_max) { return Space(n_max); }

LadderOps ladder_ops(const Space& space) {
  const int levels = space.n_max() + 1;
  Operator a_fock = Operator::Zero(levels, levels);
  for (int n = 1; n < levels; ++n) a_fock(n - 1, n) = std::sqrt(static_cast<double>(n));
  const Operator qubits = Operator::Identity(4, 4);
  Operator a = Eigen::kroneckerProduct(a_fock, qubits);
  Operator a_dag = a.adjoint();
  return {std::move(a), std::move(a_dag)};
}

PauliOps pauli_ops(const Space& space, Qubit which) {
  const Eigen::Matrix2cd raise = qubit_raise();
  const Eigen::Matrix2cd lower = raise.adjoint();
  PauliOps ops;
  ops.z = embed_qubit(space, which, qubit_z());
  ops.plus = embed_qubit(space, which, raise);
  ops.minus = embed_qubit(space, which, lower);
  ops.x = ops.plus + ops.minus;
  // sigma_pm = (sigma_x +- i sigma_y)/2  =>  sigma_y = -i (sigma_+ - sigma_-)
  ops.y = -kI * (ops.plus - ops.minus);
  return ops;
}

Operator number_operator(const Space& space) {
  const auto [a, a_dag] = ladder_ops(space);
  const Operator z_a = pauli_ops(space, Qubit::A).z;
  const Operator z_b = pauli_ops(space, Qubit::B).z;
  return a_dag * a + 0.5 * (z_a + z_b) + Operator::Identity(space.dim(), space.dim());
}

int excitations(const BasisIndex& b) {
  return b.n_phot + static_cast<int>(b.s_A) + static_cast<int>(b.s_B);
}

StateVector coherent_state(const Space& space, Complex alpha, Level s_A, Level s_B, double leakage_tol) {
  const double mean = std::norm(alpha);
  // Poisson weights e^{-|a|^2} |a|^{2n} / n!, accumulated in log space.
  auto weight = [mean](int n) {
    if (mean == 0.0) return n == 0 ? 1.0 : 0.0;
    return std::exp(-mean + n * std::log(mean) - std::lgamma(n + 1.0));
  };

  double kept = 0.0;
  for (int n = 0; n <= space.n_max(); ++n) kept += weight(n);
  const double tail = 1.0 - kept;
  if (tail > leakage_tol) {
    int required = space.n_max();
    double acc = kept;
    while (1.0 - acc > leakage_tol && required < 10000) acc += weight(++required);
    throw TruncationLeakageError("coherent state |alpha|=" + std::to_string(std::abs(alpha)) +
                                     " leaks " + std::to_string(tail) + " beyond n_max=" +
                                     std::to_string(space.n_max()) + "; need n_max >= " +
                                     std::to_string(required),
                                 required);
  }

  StateVector psi = StateVector::Zero(space.dim());
  const double phase_arg = std::arg(alpha);
  for (int n = 0; n <= space.n_max(); ++n) {
    psi(space.flat({n, s_A, s_B})) = std::sqrt(weight(n)) * std::polar(1.0, n * phase_arg);
  }
  psi.normalize();
  return psi;
}

}  // namespace qsync
