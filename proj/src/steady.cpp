#include "qsync/steady.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qsync/errors.hpp"

namespace qsync {
namespace {

const ExcitationBlock& find_block(const std::vector<ExcitationBlock>& blocks, int n) {
  for (const auto& b : blocks)
    if (b.n == n) return b;
  throw EmptyBlockError("no basis state with " + std::to_string(n) + " excitations");
}

// Hermitian basis of a space of operators that is closed under adjoint.
// Hermitian parts are orthonormalized in real coordinates (Re vec, Im vec), so
// every output column is a real combination of Hermitian matrices.
std::vector<Operator> hermitian_basis(const std::vector<Eigen::VectorXcd>& kernel, Index d) {
  if (kernel.empty()) return {};
  const Index k = static_cast<Index>(kernel.size());
  const Index n = d * d;
  Eigen::MatrixXd candidates(2 * n, 2 * k);
  for (Index c = 0; c < k; ++c) {
    const Operator x = unvec(kernel[c]);
    const Eigen::VectorXcd re_part = vec(x + x.adjoint());
    const Eigen::VectorXcd im_part = vec(kI * (x - x.adjoint()));
    candidates.col(2 * c) << re_part.real(), re_part.imag();
    candidates.col(2 * c + 1) << im_part.real(), im_part.imag();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(candidates, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  std::vector<Operator> basis;
  for (Index c = 0; c < sv.size() && static_cast<Index>(basis.size()) < k; ++c) {
    if (sv(c) <= 1e-8 * sv(0)) break;
    const auto u = svd.matrixU().col(c);
    Eigen::VectorXcd v(n);
    v.real() = u.head(n);
    v.imag() = u.tail(n);
    const Operator h = unvec(v);
    basis.push_back(0.5 * (h + h.adjoint()));
  }
  // Trace normalization: traceless elements are shifted by the max-trace one.
  auto best = std::max_element(basis.begin(), basis.end(), [](const Operator& a, const Operator& b) {
    return std::abs(a.trace()) < std::abs(b.trace());
  });
  if (best == basis.end() || std::abs(best->trace()) < 1e-12) return basis;
  const Operator anchor = *best / best->trace().real();
  for (auto& h : basis) {
    const double tr = h.trace().real();
    h = std::abs(tr) < 1e-9 ? Operator(h + anchor) : Operator(h / tr);
  }
  return basis;
}

}  // namespace

DensityMatrix microcanonical_state(const Space& space, int n) {
  const auto blocks = excitation_blocks(space);
  const ExcitationBlock& block = find_block(blocks, n);
  return block_projector(space, block) / static_cast<double>(block.degeneracy());
}

double stationarity_residual(const Liouvillian& l, const DensityMatrix& rho) {
  if (rho.size() != l.dim) throw ShapeError("stationarity_residual: shape mismatch");
  return max_abs(l.matrix * vec(rho));
}

double StationarySet::distance_from_span(const Operator& x) const {
  Eigen::VectorXcd v = vec(x);
  const double norm = v.norm();
  if (norm == 0.0) return 0.0;
  for (const auto& k : span) v -= k * k.dot(v);
  return v.norm() / norm;
}

StationarySet kernel_dimension(const Liouvillian& l, const Space& space, std::optional<int> block) {
  const Index d = space.dim();
  if (l.dim != d * d) throw ShapeError("kernel_dimension: Liouvillian does not match the space");

  std::vector<Index> idx;
  if (block) {
    const auto blocks = excitation_blocks(space);
    const ExcitationBlock& b = find_block(blocks, *block);
    for (Index j : b.members)
      for (Index i : b.members) idx.push_back(vec_index(i, j, d));
  } else {
    idx.resize(static_cast<std::size_t>(l.dim));
    for (Index i = 0; i < l.dim; ++i) idx[i] = i;
  }

  const Index m = static_cast<Index>(idx.size());
  Eigen::MatrixXcd sub(m, m);
  for (Index c = 0; c < m; ++c)
    for (Index r = 0; r < m; ++r) sub(r, c) = l.matrix(idx[r], idx[c]);

  Eigen::BDCSVD<Eigen::MatrixXcd> svd(sub, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cutoff = kKernelRelTol * std::max(sv(0), 1e-300);

  StationarySet out;
  out.block_label = block;
  for (Index c = 0; c < m; ++c) {
    if (sv(c) >= cutoff) continue;
    Eigen::VectorXcd full = Eigen::VectorXcd::Zero(l.dim);
    for (Index r = 0; r < m; ++r) full(idx[r]) = svd.matrixV()(r, c);
    out.span.push_back(std::move(full));
  }
  out.dimension = static_cast<int>(out.span.size());
  out.basis = hermitian_basis(out.span, d);
  return out;
}

bool dephasing_caveat_applies(const Operator& hamiltonian, const Space& space, int n, double tol) {
  const auto blocks = excitation_blocks(space);
  const ExcitationBlock& b = find_block(blocks, n);
  const Index g = b.degeneracy();
  if (g < 2) return false;

  Operator h(g, g);
  for (Index c = 0; c < g; ++c)
    for (Index r = 0; r < g; ++r) h(r, c) = hamiltonian(b.members[r], b.members[c]);
  Eigen::SelfAdjointEigenSolver<Operator> eig(h);
  const Operator& vecs = eig.eigenvectors();

  for (Qubit q : {Qubit::A, Qubit::B}) {
    // sigma_z is diagonal in the product basis, so restrict it directly.
    const Operator z_full = pauli_ops(space, q).z;
    Eigen::VectorXcd z(g);
    for (Index r = 0; r < g; ++r) z(r) = z_full(b.members[r], b.members[r]);
    for (Index k = 0; k < g; ++k) {
      const Eigen::VectorXcd mapped = z.cwiseProduct(vecs.col(k));
      for (Index m = 0; m < g; ++m) {
        if (std::abs(std::abs(vecs.col(m).dot(mapped)) - 1.0) < tol) return true;
      }
    }
  }
  return false;
}

}  // namespace qsync
