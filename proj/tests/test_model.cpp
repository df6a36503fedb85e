#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "qsync/errors.hpp"
#include "qsync/model.hpp"
#include "support.hpp"

using namespace qsync;

namespace {

double eigen_residual(const Operator& h, const StateVector& v, double e) { return (h * v - e * v).norm(); }

}  // namespace

TEST_CASE("free Hamiltonian is diagonal") {
  ModelParams p;
  p.kappa_A = p.kappa_B = p.kappa_AB = 0.0;
  const Space s(3);
  const Operator h = build_hamiltonian(p, s);
  CHECK(max_abs(Operator(h - Operator(h.diagonal().asDiagonal()))) == 0.0);
  CHECK(h(0, 0).real() == -(p.omega_A + p.omega_B) / 2.0);
  const Index k = s.flat({2, Level::Plus, Level::Minus});
  CHECK(h(k, k).real() == doctest::Approx(p.omega_A / 2 - p.omega_B / 2 + 2 * p.omega_r));
}

TEST_CASE("qubit-resonator matrix element") {
  const ModelParams p = default_params();
  const Space s(p.n_max);
  const Operator h = build_hamiltonian(p, s);
  const Index up = s.flat({0, Level::Plus, Level::Minus});
  const Index photon = s.flat({1, Level::Minus, Level::Minus});
  CHECK(h(up, photon) == Complex{p.kappa_A, 0.0});
  CHECK(h(s.flat({0, Level::Minus, Level::Plus}), photon) == Complex{p.kappa_B, 0.0});
  CHECK(h(up, s.flat({0, Level::Minus, Level::Plus})) == Complex{p.kappa_AB, 0.0});
}

TEST_CASE("tuned coupling and protected pair at the default parameters") {
  ModelParams p = default_params();
  CHECK(std::abs(tuned_kappa_AB(p) - 5.625) < 1e-14);
  CHECK(p.kappa_AB == tuned_kappa_AB(p));

  const ProtectedPair pair = protected_pair(p);
  CHECK(std::abs(pair.energy_P + 9.375) < 1e-12);
  CHECK(std::abs(pair.energy_G + 62.5) < 1e-12);
  CHECK(std::abs(pair.transition_frequency() - 53.125) < 1e-12);
  CHECK(std::abs(std::cos(pair.theta) - 0.948683298050514) < 1e-14);
  CHECK(std::abs(std::sin(pair.theta) + 0.316227766016838) < 1e-14);
  CHECK(std::abs(pair.state_P.norm() - 1.0) < 1e-15);

  const Operator h = build_hamiltonian(p);
  CHECK(eigen_residual(h, pair.state_P, pair.energy_P) < 1e-10);
  CHECK(eigen_residual(h, pair.state_G, pair.energy_G) < 1e-12);

  // Dense diagonalization sees both energies in the spectrum.
  Eigen::SelfAdjointEigenSolver<Operator> es(h);
  auto has = [&](double e) { return ((es.eigenvalues().array() - e).abs() < 1e-10).any(); };
  CHECK(has(-9.375));
  CHECK(has(-62.5));
}

TEST_CASE("equal qubit frequencies need no coupling") {
  ModelParams p;
  p.omega_B = p.omega_A;
  CHECK(tuned_kappa_AB(p) == 0.0);
}

TEST_CASE("singular coupling geometry") {
  ModelParams p;
  p.kappa_B = p.kappa_A;
  try {
    tuned_kappa_AB(p);
    FAIL("expected SingularCouplingError");
  } catch (const SingularCouplingError& e) {
    CHECK(e.kind() == SingularCouplingError::Kind::Impossible);
  }
  p.omega_B = p.omega_A;
  try {
    tuned_kappa_AB(p);
    FAIL("expected SingularCouplingError");
  } catch (const SingularCouplingError& e) {
    CHECK(e.kind() == SingularCouplingError::Kind::Trivial);
  }
  // |P> itself does not need the tuning.
  CHECK(std::abs(protected_state(p).norm() - 1.0) < 1e-15);
}

TEST_CASE("degenerate pair at kappa_B/kappa_A = sqrt(Omega_B/Omega_A)") {
  ModelParams p = default_params();
  p.kappa_B = p.kappa_A * std::sqrt(p.omega_B / p.omega_A);
  p = with_tuned_coupling(p);
  const ProtectedPair pair = protected_pair(p);
  CHECK(std::abs(pair.transition_frequency()) < 1e-10);
  CHECK(eigen_residual(build_hamiltonian(p), pair.state_P, pair.energy_P) < 1e-10);
}

TEST_CASE("parameter validation names the field") {
  ModelParams p;
  p.gamma_deph_A = -1.0;
  CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("gamma_deph_A"), InvalidParamsError);
  p = {};
  p.n_max = 0;
  CHECK_THROWS_AS(p.validate(), Error);
  p = {};
  p.omega_r = std::nan("");
  CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("omega_r"), InvalidParamsError);
}

TEST_CASE("excitation blocks") {
  const Space s(4);
  const auto blocks = excitation_blocks(s);
  REQUIRE(blocks.size() == 7);  // n = 0..6
  CHECK(blocks[0].n == 0);
  CHECK(blocks[0].members == std::vector<Index>{s.flat({0, Level::Minus, Level::Minus})});
  CHECK(blocks[1].degeneracy() == 3);
  CHECK(blocks[1].members == std::vector<Index>{s.flat({0, Level::Minus, Level::Plus}),
                                                s.flat({0, Level::Plus, Level::Minus}),
                                                s.flat({1, Level::Minus, Level::Minus})});
  for (int n = 2; n <= 4; ++n) CHECK(blocks[n].degeneracy() == 4);
  CHECK(blocks[5].degeneracy() == 3);  // |5,-,-> is cut
  CHECK(blocks[6].degeneracy() == 1);  // |4,+,+>
  Index total = 0;
  for (const auto& b : blocks) total += b.degeneracy();
  CHECK(total == s.dim());

  Operator sum = Operator::Zero(s.dim(), s.dim());
  for (const auto& b : blocks) sum += block_projector(s, b);
  CHECK(max_abs(Operator(sum - Operator::Identity(s.dim(), s.dim()))) == 0.0);
}

TEST_CASE("E_P equals the n=1 block eigenvalue") {
  const ModelParams p = default_params();
  const Space s(p.n_max);
  const Operator h = build_hamiltonian(p, s);
  const auto blocks = excitation_blocks(s);
  const auto& m = blocks[1].members;
  Operator hb(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) hb(i, j) = h(m[i], m[j]);
  Eigen::SelfAdjointEigenSolver<Operator> es(hb);
  const double e_p = protected_pair(p).energy_P;
  CHECK((es.eigenvalues().array() - e_p).abs().minCoeff() < 1e-10);
}

TEST_CASE("property: Hamiltonian structure on random parameters") {
  auto g = testing::rng(2);
  for (int c = 0; c < testing::kCases; ++c) {
    CAPTURE(c);
    const ModelParams p = testing::random_params(g, 1 + c % 4);
    const Space s(p.n_max);
    const Operator h = build_hamiltonian(p, s);
    CHECK(hermiticity_defect(h) < 1e-13);
    CHECK(max_abs(commutator(h, number_operator(s))) < 1e-12);
    for (Index i = 0; i < s.dim(); ++i)
      for (Index j = 0; j < s.dim(); ++j)
        if (excitations(s.basis(i)) != excitations(s.basis(j))) CHECK(h(i, j) == Complex{});

    const ModelParams tuned = with_tuned_coupling(p);
    const ProtectedPair pair = protected_pair(tuned);
    CHECK(eigen_residual(build_hamiltonian(tuned, s), pair.state_P, pair.energy_P) <
          1e-10 * std::max(1.0, std::abs(tuned.kappa_AB)));
  }
}

TEST_CASE("property: eigen residual grows linearly with detuning") {
  auto g = testing::rng(3);
  for (int c = 0; c < testing::kCases; ++c) {
    CAPTURE(c);
    const ModelParams tuned = with_tuned_coupling(testing::random_params(g, 1));
    const ProtectedPair pair = protected_pair(tuned);
    auto residual = [&](double delta) {
      ModelParams p = tuned;
      p.kappa_AB += delta;
      return eigen_residual(build_hamiltonian(p), pair.state_P, pair.energy_P);
    };
    const double r3 = residual(1e-3), r2 = residual(1e-2);
    CHECK(r3 > 0.0);
    CHECK(std::abs(r2 / r3 - 10.0) < 1e-6);
  }
}
