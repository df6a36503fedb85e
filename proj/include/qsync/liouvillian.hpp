#pragma once

#include <span>
#include <vector>

#include "qsync/model.hpp"

namespace qsync {

enum class DynamicsMode {
  Full,           // resonator + qubit dissipation and qubit dephasing
  PureDephasing,  // only the two sigma_z channels
};

/// Lindblad channel rate * D[jump].
struct Channel {
  Operator jump;
  double rate = 0.0;
};

/// Hamiltonian plus channels; everything a right-hand side needs.
struct MasterEquation {
  Space space{1};
  Operator hamiltonian;
  std::vector<Channel> channels;
};

/// Channels with zero rate are omitted.
MasterEquation master_equation(const ModelParams& params, DynamicsMode mode = DynamicsMode::Full);

/// D[X]rho = X rho X^dag - (X^dag X rho + rho X^dag X)/2.
Operator dissipator_apply(const Operator& jump, const DensityMatrix& rho);

/// Direct evaluation of -i[H, rho] + sum_k rate_k D[X_k] rho.
Operator apply_rhs(const MasterEquation& eq, const DensityMatrix& rho);
Operator apply_rhs(const ModelParams& params, const DensityMatrix& rho,
                   DynamicsMode mode = DynamicsMode::Full);

enum class VecConvention { ColumnStacking };

/// Superoperator on column-stacked density matrices:
/// vec(A rho B) = (B^T kron A) vec(rho).
struct Liouvillian {
  Index dim = 0;  // d^2
  Eigen::MatrixXcd matrix;
  VecConvention convention = VecConvention::ColumnStacking;

  Index hilbert_dim() const;
};

Liouvillian build_liouvillian(const MasterEquation& eq);
Liouvillian build_liouvillian(const ModelParams& params, DynamicsMode mode = DynamicsMode::Full);

/// Column-stacked vec(rho) and its inverse. Eigen storage is column-major so
/// these are plain copies.
Eigen::VectorXcd vec(const Operator& rho);
Operator unvec(const Eigen::VectorXcd& v);

/// Flat index of |i><j| inside vec(.) for a d-dimensional space.
inline Index vec_index(Index i, Index j, Index d) { return i + j * d; }

}  // namespace qsync
