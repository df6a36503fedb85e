#include "qsync/liouvillian.hpp"

#include <cmath>
#include <string>

#include "qsync/errors.hpp"

namespace qsync {
namespace {

void check_square_match(const Operator& a, const Operator& b, const char* what) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    throw ShapeError(std::string(what) + ": shape mismatch (" + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                     std::to_string(b.cols()) + ")");
  }
}

// L += coeff * (right^T kron left), skipping structural zeros. The operators
// of this model are very sparse so this is much cheaper than a dense kron.
void add_sandwich(Eigen::MatrixXcd& l, Complex coeff, const Operator& left, const Operator& right) {
  const Index d = left.rows();
  std::vector<std::pair<Index, Index>> left_nz;
  for (Index j = 0; j < d; ++j)
    for (Index i = 0; i < d; ++i)
      if (left(i, j) != 0.0) left_nz.emplace_back(i, j);

  // (B^T kron A)(i + k d, j + m d) = B(m, k) A(i, j)
  for (Index m = 0; m < d; ++m) {
    for (Index k = 0; k < d; ++k) {
      const Complex b = right(m, k);
      if (b == 0.0) continue;
      const Complex cb = coeff * b;
      for (const auto& [i, j] : left_nz) l(i + k * d, j + m * d) += cb * left(i, j);
    }
  }
}

}  // namespace

MasterEquation master_equation(const ModelParams& params, DynamicsMode mode) {
  params.validate_operator_inputs();
  MasterEquation eq{build_space(params.n_max), {}, {}};
  eq.hamiltonian = build_hamiltonian(params, eq.space);

  const PauliOps qa = pauli_ops(eq.space, Qubit::A);
  const PauliOps qb = pauli_ops(eq.space, Qubit::B);
  auto add = [&eq](const Operator& jump, double rate) {
    if (rate > 0.0) eq.channels.push_back({jump, rate});
  };
  if (mode == DynamicsMode::Full) {
    add(ladder_ops(eq.space).a, params.gamma_diss_r);
    add(qa.minus, params.gamma_diss_A);
    add(qb.minus, params.gamma_diss_B);
  }
  add(qa.z, params.gamma_deph_A);
  add(qb.z, params.gamma_deph_B);
  return eq;
}

Operator dissipator_apply(const Operator& jump, const DensityMatrix& rho) {
  check_square_match(jump, rho, "dissipator_apply");
  const Operator jdj = jump.adjoint() * jump;
  return jump * rho * jump.adjoint() - 0.5 * (jdj * rho + rho * jdj);
}

Operator apply_rhs(const MasterEquation& eq, const DensityMatrix& rho) {
  check_square_match(eq.hamiltonian, rho, "apply_rhs");
  Operator out = -kI * commutator(eq.hamiltonian, rho);
  for (const Channel& c : eq.channels) out += c.rate * dissipator_apply(c.jump, rho);
  return out;
}

Operator apply_rhs(const ModelParams& params, const DensityMatrix& rho, DynamicsMode mode) {
  return apply_rhs(master_equation(params, mode), rho);
}

Index Liouvillian::hilbert_dim() const {
  return static_cast<Index>(std::llround(std::sqrt(static_cast<double>(dim))));
}

Liouvillian build_liouvillian(const MasterEquation& eq) {
  const Index d = eq.hamiltonian.rows();
  const Operator id = Operator::Identity(d, d);

  Liouvillian l;
  l.dim = d * d;
  l.matrix = Eigen::MatrixXcd::Zero(l.dim, l.dim);

  // -i[H, rho] = -i H rho I + i I rho H
  add_sandwich(l.matrix, -kI, eq.hamiltonian, id);
  add_sandwich(l.matrix, kI, id, eq.hamiltonian);
  for (const Channel& c : eq.channels) {
    const Operator jdj = c.jump.adjoint() * c.jump;
    add_sandwich(l.matrix, c.rate, c.jump, c.jump.adjoint());
    add_sandwich(l.matrix, -0.5 * c.rate, jdj, id);
    add_sandwich(l.matrix, -0.5 * c.rate, id, jdj);
  }
  return l;
}

Liouvillian build_liouvillian(const ModelParams& params, DynamicsMode mode) {
  return build_liouvillian(master_equation(params, mode));
}

Eigen::VectorXcd vec(const Operator& rho) {
  return Eigen::Map<const Eigen::VectorXcd>(rho.data(), rho.size());
}

Operator unvec(const Eigen::VectorXcd& v) {
  const auto d = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
  if (d * d != v.size()) throw ShapeError("unvec: length " + std::to_string(v.size()) + " is not a square");
  return Eigen::Map<const Operator>(v.data(), d, d);
}

}  // namespace qsync
