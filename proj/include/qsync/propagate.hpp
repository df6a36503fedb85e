#pragma once

#include <functional>
#include <span>
#include <vector>

#include "qsync/liouvillian.hpp"

namespace qsync {

/// Uniform grid t_k = k * t_end / n_steps, k = 0..n_steps.
struct TimeGrid {
  double t_end = 0.0;
  int n_steps = 1;

  int points() const { return n_steps + 1; }
  double dt() const { return t_end / n_steps; }
  double time(int k) const { return k == n_steps ? t_end : k * dt(); }
  std::vector<double> times() const;

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;
};

struct InvariantTolerances {
  double trace = 1e-9;
  double hermiticity = 1e-10;
  double min_eigenvalue = -1e-8;
};

/// Throws NumericalInvariantError if rho is not a valid density matrix within tol.
void check_density_matrix(const DensityMatrix& rho, const InvariantTolerances& tol = {}, double t = 0.0);

double min_eigenvalue(const DensityMatrix& rho);

struct PropagateOptions {
  bool retain_states = false;
  bool check_invariants = true;
  InvariantTolerances tolerances{};
};

/// Called once per grid point, in order, with the state at that time.
using Observer = std::function<void(double t, const DensityMatrix& rho)>;

struct Trajectory {
  std::vector<double> times;
  std::vector<DensityMatrix> states;  // empty unless retain_states
  DensityMatrix final_state;
};

/// Connected components of the sparsity graph of a square matrix. Each
/// component spans an invariant subspace, so exp() is block diagonal in it.
std::vector<std::vector<Index>> invariant_blocks(const Eigen::MatrixXcd& m);

/// Scaling-and-squaring Pade exponential (Eigen MatrixFunctions) after a
/// trace shift.
Eigen::MatrixXcd expm(const Eigen::MatrixXcd& m);

/// exp(L dt) stored as one dense exponential per invariant block of L.
class StepPropagator {
 public:
  StepPropagator(const Liouvillian& l, double dt);

  void apply(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const;
  /// Assembled full d^2 x d^2 step matrix.
  Eigen::MatrixXcd dense() const;

  std::size_t block_count() const { return blocks_.size(); }
  Index largest_block() const;

 private:
  struct Block {
    std::vector<Index> indices;
    Eigen::MatrixXcd step;
  };
  Index dim_;
  std::vector<Block> blocks_;
};

Trajectory propagate_expm(const Liouvillian& l, const DensityMatrix& rho0, const TimeGrid& grid,
                          const PropagateOptions& options = {}, const Observer& observer = {});

/// Same, on an explicit time list which must be uniformly spaced (relative
/// spacing defect < 1e-9); otherwise NonUniformGridError.
Trajectory propagate_expm(const Liouvillian& l, const DensityMatrix& rho0, std::span<const double> times,
                          const PropagateOptions& options = {}, const Observer& observer = {});

/// Adaptive Dormand-Prince integration of apply_rhs; arbitrary increasing
/// times. tol in [1e-12, 1e-6].
Trajectory propagate_integrator(const MasterEquation& eq, const DensityMatrix& rho0,
                                std::span<const double> times, double tol,
                                const PropagateOptions& options = {}, const Observer& observer = {});

}  // namespace qsync
