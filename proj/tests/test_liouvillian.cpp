#include <doctest.h>

#include "qsync/liouvillian.hpp"
#include "qsync/model.hpp"
#include "support.hpp"

using namespace qsync;

namespace {

Operator kron(const Operator& a, const Operator& b) {
  Operator out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Operator act(const Liouvillian& l, const Operator& rho) { return unvec(l.matrix * vec(rho)); }

/// Largest entry of x outside the rows/cols of excitation block n.
double leakage(const Space& s, const Operator& x, int n) {
  double worst = 0.0;
  for (Index i = 0; i < s.dim(); ++i)
    for (Index j = 0; j < s.dim(); ++j)
      if (excitations(s.basis(i)) != n || excitations(s.basis(j)) != n) worst = std::max(worst, std::abs(x(i, j)));
  return worst;
}

}  // namespace

TEST_CASE("dissipator examples") {
  const Space s(3);
  const Operator a = ladder_ops(s).a;
  const Operator vac = projector(s.ket({0, Level::Minus, Level::Minus}));
  const Operator one = projector(s.ket({1, Level::Minus, Level::Minus}));
  CHECK(max_abs(dissipator_apply(a, vac)) == 0.0);
  CHECK(max_abs(dissipator_apply(a, one) - (vac - one)) < 1e-15);
}

TEST_CASE("closed system is the pure commutator") {
  ModelParams p = default_params();
  p.gamma_diss_r = 0.0;
  p.n_max = 2;
  const Liouvillian l = build_liouvillian(p);
  const Operator h = build_hamiltonian(p);
  const Index d = h.rows();
  const Operator id = Operator::Identity(d, d);
  const Operator expected = -kI * (kron(id, h) - kron(h.transpose(), id));
  CHECK(l.dim == d * d);
  CHECK(l.hilbert_dim() == d);
  CHECK(max_abs(Operator(l.matrix - expected)) < 1e-14);
  CHECK(master_equation(p).channels.empty());
}

TEST_CASE("column stacking convention") {
  auto g = testing::rng(4);
  const Operator a = testing::random_matrix(5, g), b = testing::random_matrix(5, g), r = testing::random_matrix(5, g);
  CHECK(max_abs(Eigen::VectorXcd(vec(a * r * b) - kron(b.transpose(), a) * vec(r))) < 1e-12);
  CHECK(max_abs(Operator(unvec(vec(r)) - r)) == 0.0);
  CHECK(vec(r)(vec_index(2, 3, 5)) == r(2, 3));
}

TEST_CASE("channel inventory") {
  ModelParams p = default_params();
  p.gamma_diss_A = 0.1;
  p.gamma_deph_B = 0.2;
  CHECK(master_equation(p).channels.size() == 3);  // a, s-_A, sz_B
  CHECK(master_equation(p, DynamicsMode::PureDephasing).channels.size() == 1);
  p.gamma_deph_A = 0.3;
  CHECK(master_equation(p, DynamicsMode::PureDephasing).channels.size() == 2);
}

TEST_CASE("dark pair under resonator loss") {
  const ModelParams p = testing::resonator_only();
  const ProtectedPair pair = protected_pair(p);
  const Liouvillian l = build_liouvillian(p);
  const Operator PP = projector(pair.state_P);
  const Operator GG = projector(pair.state_G);
  const Operator PG = pair.state_P * pair.state_G.adjoint();
  CHECK(max_abs(act(l, PP)) < 1e-12);
  CHECK(max_abs(act(l, GG)) < 1e-12);
  CHECK(max_abs(Operator(act(l, PG) + kI * 53.125 * PG)) < 1e-10);

  // The ground state stays dark with every channel switched on.
  ModelParams all = p;
  all.gamma_diss_A = all.gamma_diss_B = 0.1;
  all.gamma_deph_A = all.gamma_deph_B = 0.2;
  CHECK(max_abs(act(build_liouvillian(all), GG)) < 1e-12);
}

TEST_CASE("property: superoperator matches direct evaluation") {
  auto g = testing::rng(5);
  for (int c = 0; c < testing::kCases; ++c) {
    CAPTURE(c);
    const ModelParams p = testing::random_params(g, 1 + c % 3);
    const Space s(p.n_max);
    for (DynamicsMode mode : {DynamicsMode::Full, DynamicsMode::PureDephasing}) {
      const MasterEquation eq = master_equation(p, mode);
      const Liouvillian l = build_liouvillian(eq);
      const Operator rho = testing::random_hermitian(s.dim(), g);
      CHECK(max_abs(Operator(act(l, rho) - apply_rhs(eq, rho))) < 1e-12);
      // Trace preservation: vec(I)^dag L = 0.
      const Eigen::VectorXcd id = vec(Operator::Identity(s.dim(), s.dim()));
      CHECK(max_abs(Eigen::RowVectorXcd(id.adjoint() * l.matrix)) < 1e-12);
    }
  }
}

TEST_CASE("property: dissipators are traceless and Hermiticity preserving") {
  auto g = testing::rng(6);
  for (int c = 0; c < testing::kCases; ++c) {
    CAPTURE(c);
    const ModelParams p = testing::random_params(g, 2);
    const MasterEquation eq = master_equation(p);
    const Operator rho = testing::random_density(eq.space.dim(), g);
    for (const Channel& ch : eq.channels) {
      const Operator d = dissipator_apply(ch.jump, rho);
      CHECK(std::abs(d.trace()) < 1e-12);
      CHECK(hermiticity_defect(d) < 1e-12);
    }
  }
}

TEST_CASE("property: pure dephasing keeps excitation blocks closed") {
  auto g = testing::rng(7);
  for (int c = 0; c < testing::kCases; ++c) {
    CAPTURE(c);
    const ModelParams p = testing::random_params(g, 3);
    const Space s(p.n_max);
    const Liouvillian l = build_liouvillian(p, DynamicsMode::PureDephasing);
    for (const ExcitationBlock& b : excitation_blocks(s)) {
      StateVector psi = StateVector::Zero(s.dim());
      for (Index i : b.members) psi(i) = testing::random_ket(1, g)(0);
      psi.normalize();
      CHECK(leakage(s, act(l, projector(psi)), b.n) < 1e-13);
    }
  }
}

TEST_CASE("property: dissipation moves population only downward") {
  auto g = testing::rng(8);
  for (int c = 0; c < testing::kCases; ++c) {
    CAPTURE(c);
    const ModelParams p = testing::random_params(g, 3);
    const Space s(p.n_max);
    const Liouvillian l = build_liouvillian(p);
    const auto blocks = excitation_blocks(s);
    for (int n = 0; n <= 2; ++n) {
      StateVector psi = StateVector::Zero(s.dim());
      for (Index i : blocks[n].members) psi(i) = testing::random_ket(1, g)(0);
      psi.normalize();
      const Operator drho = act(l, projector(psi));
      double lower = 0.0;
      for (const ExcitationBlock& b : blocks) {
        double pop = 0.0;
        for (Index i : b.members) pop += drho(i, i).real();
        if (b.n > n) CHECK(std::abs(pop) < 1e-13);
        if (b.n < n) {
          CHECK(pop >= -1e-13);
          lower += pop;
        }
      }
      if (n == 0) CHECK(lower == 0.0);
    }
  }
}
