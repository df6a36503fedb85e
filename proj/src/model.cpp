#include "qsync/model.hpp"

#include <cmath>
#include <map>
#include <string>

#include "qsync/errors.hpp"

namespace qsync {
namespace {

void require(bool ok, const std::string& field, const std::string& message) {
  if (!ok) throw InvalidParamsError(field + ": " + message);
}

}  // namespace

void ModelParams::validate() const {
  const auto finite = [](double v) { return std::isfinite(v); };
  require(finite(omega_A), "omega_A", "must be finite");
  require(finite(omega_B), "omega_B", "must be finite");
  require(finite(omega_r), "omega_r", "must be finite");
  require(finite(kappa_AB), "kappa_AB", "must be finite");
  require(finite(kappa_A) && kappa_A > 0.0, "kappa_A", "must be > 0");
  require(finite(kappa_B) && kappa_B >= 0.0, "kappa_B", "must be >= 0");
  require(finite(gamma_diss_r) && gamma_diss_r >= 0.0, "gamma_diss_r", "must be >= 0");
  require(finite(gamma_diss_A) && gamma_diss_A >= 0.0, "gamma_diss_A", "must be >= 0");
  require(finite(gamma_diss_B) && gamma_diss_B >= 0.0, "gamma_diss_B", "must be >= 0");
  require(finite(gamma_deph_A) && gamma_deph_A >= 0.0, "gamma_deph_A", "must be >= 0");
  require(finite(gamma_deph_B) && gamma_deph_B >= 0.0, "gamma_deph_B", "must be >= 0");
  require(n_max >= 1, "n_max", "must be >= 1");
}

void ModelParams::validate_operator_inputs() const {
  ModelParams probe = *this;
  if (probe.kappa_A == 0.0) probe.kappa_A = 1.0;
  probe.validate();
}

ModelParams default_params() {
  ModelParams p;
  p.gamma_diss_r = 0.5;
  return with_tuned_coupling(p);
}

Operator build_hamiltonian(const ModelParams& params) {
  return build_hamiltonian(params, build_space(params.n_max));
}

Operator build_hamiltonian(const ModelParams& params, const Space& space) {
  params.validate_operator_inputs();
  const auto [a, a_dag] = ladder_ops(space);
  const PauliOps qa = pauli_ops(space, Qubit::A);
  const PauliOps qb = pauli_ops(space, Qubit::B);

  Operator h = 0.5 * params.omega_A * qa.z + 0.5 * params.omega_B * qb.z + params.omega_r * (a_dag * a);
  h += params.kappa_A * (qa.plus * a + qa.minus * a_dag);
  h += params.kappa_B * (qb.plus * a + qb.minus * a_dag);
  h += params.kappa_AB * (qa.minus * qb.plus + qa.plus * qb.minus);
  return h;
}

double tuned_kappa_AB(const ModelParams& params) {
  const double ka = params.kappa_A;
  const double kb = params.kappa_B;
  const double denom = ka * ka - kb * kb;
  if (std::abs(denom) <= kSingularCouplingEps * ka * ka) {
    const double scale = std::max({std::abs(params.omega_A), std::abs(params.omega_B), 1.0});
    if (std::abs(params.omega_A - params.omega_B) <= 1e-12 * scale) {
      throw SingularCouplingError(
          "kappa_A == kappa_B with Omega_A == Omega_B: every kappa_AB decouples |P>; choose one explicitly",
          SingularCouplingError::Kind::Trivial);
    }
    throw SingularCouplingError("kappa_A == kappa_B with Omega_A != Omega_B: no kappa_AB makes |P> an eigenstate",
                                SingularCouplingError::Kind::Impossible);
  }
  return (params.omega_A - params.omega_B) * ka * kb / denom;
}

ModelParams with_tuned_coupling(ModelParams params) {
  params.kappa_AB = tuned_kappa_AB(params);
  return params;
}

StateVector protected_state(const ModelParams& params) {
  params.validate();
  const Space space = build_space(params.n_max);
  // atan2(-ka, kb) with kb >= 0 lands in [-pi/2, 0), so cos(theta) >= 0.
  const double theta = std::atan2(-params.kappa_A, params.kappa_B);
  return std::cos(theta) * space.ket({0, Level::Plus, Level::Minus}) +
         std::sin(theta) * space.ket({0, Level::Minus, Level::Plus});
}

ProtectedPair protected_pair(const ModelParams& params) {
  params.validate();
  const Space space = build_space(params.n_max);
  const double ka = params.kappa_A;
  const double kb = params.kappa_B;

  ProtectedPair pair;
  pair.kappa_AB_tuned = tuned_kappa_AB(params);
  pair.theta = std::atan2(-ka, kb);
  pair.state_P = protected_state(params);
  pair.state_G = space.ket({0, Level::Minus, Level::Minus});
  pair.energy_P = (params.omega_B - params.omega_A) * (ka * ka + kb * kb) / (2.0 * (ka * ka - kb * kb));
  pair.energy_G = -0.5 * (params.omega_A + params.omega_B);
  return pair;
}

std::vector<ExcitationBlock> excitation_blocks(const Space& space) {
  std::map<int, ExcitationBlock> by_n;
  for (Index i = 0; i < space.dim(); ++i) {
    const int n = excitations(space.basis(i));
    auto& block = by_n[n];
    block.n = n;
    block.members.push_back(i);
  }
  std::vector<ExcitationBlock> blocks;
  blocks.reserve(by_n.size());
  for (auto& [n, block] : by_n) blocks.push_back(std::move(block));
  return blocks;
}

Operator block_projector(const Space& space, const ExcitationBlock& block) {
  Operator p = Operator::Zero(space.dim(), space.dim());
  for (Index i : block.members) p(i, i) = 1.0;
  return p;
}

}  // namespace qsync
