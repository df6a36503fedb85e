#pragma once

#include <vector>

#include "qsync/hilbert.hpp"

namespace qsync {

/// Physical constants, all in units of kappa_A (times in 1/kappa_A).
struct ModelParams {
  double omega_A = 55.0;
  double omega_B = 70.0;
  double omega_r = 64.0;
  double kappa_A = 1.0;
  double kappa_B = 3.0;
  double kappa_AB = 0.0;
  double gamma_diss_r = 0.0;
  double gamma_diss_A = 0.0;
  double gamma_diss_B = 0.0;
  double gamma_deph_A = 0.0;
  double gamma_deph_B = 0.0;
  int n_max = 4;

  /// Throws InvalidParamsError naming the offending field.
  void validate() const;
  /// Same checks, but admits the free limit kappa_A = 0: a legal operator,
  /// just not a legal unit system. Used by the operator builders.
  void validate_operator_inputs() const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// The (Omega_A=55, Omega_B=70, Omega_r=64, kappa_B=3, gamma_r=0.5) set used
/// throughout the synchronization runs, with kappa_AB tuned.
ModelParams default_params();

/// H = sum_j (Omega_j/2) sz_j + Omega_r a^dag a + sum_j kappa_j (s+_j a + s-_j a^dag)
///     + kappa_AB (s-_A s+_B + s+_A s-_B).
Operator build_hamiltonian(const ModelParams& params);
Operator build_hamiltonian(const ModelParams& params, const Space& space);

/// Relative threshold on |kappa_A^2 - kappa_B^2| (scaled by kappa_A^2).
inline constexpr double kSingularCouplingEps = 1e-9;

/// Qubit-qubit coupling that makes |P> an eigenstate of H:
/// (Omega_A - Omega_B) kappa_A kappa_B / (kappa_A^2 - kappa_B^2).
double tuned_kappa_AB(const ModelParams& params);

/// Copy of params with kappa_AB replaced by tuned_kappa_AB(params).
ModelParams with_tuned_coupling(ModelParams params);

/// |P> = cos(theta)|0,+,-> + sin(theta)|0,-,+>, tan(theta) = -kappa_A/kappa_B,
/// and the ground state |G> = |0,-,->.
struct ProtectedPair {
  StateVector state_P;
  StateVector state_G;
  double energy_P = 0.0;
  double energy_G = 0.0;
  double theta = 0.0;
  double kappa_AB_tuned = 0.0;

  double transition_frequency() const { return energy_P - energy_G; }
};

ProtectedPair protected_pair(const ModelParams& params);

/// |P> alone; defined for every kappa_B >= 0 (no tuning needed).
StateVector protected_state(const ModelParams& params);

struct ExcitationBlock {
  int n = 0;                    // eigenvalue of the number operator
  std::vector<Index> members;   // flat indices, ascending
  int degeneracy() const { return static_cast<int>(members.size()); }
};

/// Partition of the basis by excitation number, ordered by n. Blocks near the
/// truncation edge are smaller than 4.
std::vector<ExcitationBlock> excitation_blocks(const Space& space);

/// Projector onto the span of a block.
Operator block_projector(const Space& space, const ExcitationBlock& block);

}  // namespace qsync
