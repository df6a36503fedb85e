#pragma once

#include <string>

#include "qsync/types.hpp"

namespace qsync {

enum class Level : int { Minus = 0, Plus = 1 };
enum class Qubit { A, B };

/// Basis ket |n, s_A, s_B>.
struct BasisIndex {
  int n_phot = 0;
  Level s_A = Level::Minus;
  Level s_B = Level::Minus;

  friend bool operator==(const BasisIndex&, const BasisIndex&) = default;
};

std::string to_string(const BasisIndex& b);

/// Truncated resonator (Fock levels 0..n_max) x qubit A x qubit B.
///
/// Flat ordering: resonator index slowest, then qubit A, then qubit B, with
/// |-> before |+>. So flat = 4*n + 2*s_A + s_B. Superoperator vectorization
/// depends on this ordering; do not change it.
class Space {
 public:
  explicit Space(int n_max);

  int n_max() const noexcept { return n_max_; }
  Index dim() const noexcept { return 4 * (n_max_ + 1); }

  Index flat(const BasisIndex& b) const;
  BasisIndex basis(Index flat) const;
  StateVector ket(const BasisIndex& b) const;

  friend bool operator==(const Space&, const Space&) = default;

 private:
  int n_max_;
};

/// Throws InvalidTruncationError for n_max < 1.
Space build_space(int n_max);

struct LadderOps {
  Operator a;
  Operator a_dag;
};

LadderOps ladder_ops(const Space& space);

struct PauliOps {
  Operator z;
  Operator plus;
  Operator minus;
  Operator x;
  Operator y;
};

PauliOps pauli_ops(const Space& space, Qubit which);

/// Total excitation number a^dag a + (sz_A + sz_B)/2 + 1.
Operator number_operator(const Space& space);

/// Integer excitation number of a basis ket.
int excitations(const BasisIndex& b);

inline constexpr double kDefaultLeakageTol = 1e-8;

/// |alpha> (x) |s_A> (x) |s_B>, renormalized after truncation. Throws
/// TruncationLeakageError when the discarded Poisson mass exceeds leakage_tol.
StateVector coherent_state(const Space& space, Complex alpha, Level s_A = Level::Minus,
                           Level s_B = Level::Minus, double leakage_tol = kDefaultLeakageTol);

}  // namespace qsync
