#pragma once

#include <optional>
#include <vector>

#include "qsync/liouvillian.hpp"

namespace qsync {

/// Pi_n / g_n for the excitation block n. Throws EmptyBlockError if no basis
/// state of the space carries n excitations.
DensityMatrix microcanonical_state(const Space& space, int n);

/// max |L vec(rho)|.
double stationarity_residual(const Liouvillian& l, const DensityMatrix& rho);

inline constexpr double kKernelRelTol = 1e-10;

struct StationarySet {
  std::optional<int> block_label;       // empty: the whole operator space
  std::vector<Operator> basis;          // Hermitian, trace-normalized where possible
  std::vector<Eigen::VectorXcd> span;   // orthonormal kernel vectors (vec form)
  int dimension = 0;

  /// Distance of vec(x) from the kernel span relative to |x|.
  double distance_from_span(const Operator& x) const;
};

/// Null space of L (optionally restricted to the operators |i><j| with i, j in
/// block n) from the singular values below kKernelRelTol * sigma_max.
StationarySet kernel_dimension(const Liouvillian& l, const Space& space, std::optional<int> block = std::nullopt);

/// True when some Hamiltonian eigenvector in block n is mapped by sigma_z^A or
/// sigma_z^B onto a multiple of an eigenvector (itself included) within tol.
/// That is the exception under which pure dephasing can admit non-microcanonical
/// stationary states. One-dimensional blocks are never flagged.
bool dephasing_caveat_applies(const Operator& hamiltonian, const Space& space, int n, double tol = 1e-8);

}  // namespace qsync
