#include "qsync/propagate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include <boost/numeric/odeint.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include "qsync/errors.hpp"

namespace qsync {
namespace {

struct DisjointSets {
  std::vector<Index> parent;
  explicit DisjointSets(Index n) : parent(static_cast<std::size_t>(n)) {
    std::iota(parent.begin(), parent.end(), Index{0});
  }
  Index find(Index x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(Index a, Index b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

class Recorder {
 public:
  Recorder(Trajectory& traj, const PropagateOptions& options, const Observer& observer)
      : traj_(traj), options_(options), observer_(observer) {}

  void operator()(double t, const DensityMatrix& rho) {
    if (options_.check_invariants) check_density_matrix(rho, options_.tolerances, t);
    store(t, rho);
  }

  // For states whose raw form was already checked by the caller.
  void store(double t, const DensityMatrix& rho) {
    traj_.times.push_back(t);
    if (options_.retain_states) traj_.states.push_back(rho);
    if (observer_) observer_(t, rho);
  }

 private:
  Trajectory& traj_;
  const PropagateOptions& options_;
  const Observer& observer_;
};

std::string fmt_time(double t) {
  std::ostringstream os;
  os << t;
  return os.str();
}

}  // namespace

std::vector<double> TimeGrid::times() const {
  std::vector<double> out(static_cast<std::size_t>(points()));
  for (int k = 0; k < points(); ++k) out[k] = time(k);
  return out;
}

double min_eigenvalue(const DensityMatrix& rho) {
  const Operator herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Operator> solver(herm, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

void check_density_matrix(const DensityMatrix& rho, const InvariantTolerances& tol, double t) {
  const double trace_err = std::abs(rho.trace() - 1.0);
  if (!(trace_err < tol.trace)) {
    throw NumericalInvariantError("trace defect " + fmt_time(trace_err) + " at t=" + fmt_time(t));
  }
  const double herm = hermiticity_defect(rho);
  if (!(herm < tol.hermiticity)) {
    throw NumericalInvariantError("Hermiticity defect " + fmt_time(herm) + " at t=" + fmt_time(t));
  }
  const double lmin = min_eigenvalue(rho);
  if (!(lmin > tol.min_eigenvalue)) {
    throw NumericalInvariantError("negative eigenvalue " + fmt_time(lmin) + " at t=" + fmt_time(t));
  }
}

std::vector<std::vector<Index>> invariant_blocks(const Eigen::MatrixXcd& m) {
  const Index n = m.rows();
  DisjointSets sets(n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i)
      if (i != j && m(i, j) != 0.0) sets.unite(i, j);

  std::vector<std::vector<Index>> blocks;
  std::vector<Index> slot(static_cast<std::size_t>(n), -1);
  for (Index i = 0; i < n; ++i) {
    const Index root = sets.find(i);
    if (slot[root] < 0) {
      slot[root] = static_cast<Index>(blocks.size());
      blocks.emplace_back();
    }
    blocks[slot[root]].push_back(i);
  }
  return blocks;
}

Eigen::MatrixXcd expm(const Eigen::MatrixXcd& m) {
  if (m.rows() == 0) return m;
  // exp(A) = e^mu exp(A - mu I) with mu = tr(A)/n; the shift removes the
  // common rotation of a coherence sector and saves squarings.
  const Complex mu = m.trace() / static_cast<double>(m.rows());
  Eigen::MatrixXcd shifted = m;
  shifted.diagonal().array() -= mu;
  Eigen::MatrixXcd out = shifted.exp();
  out *= std::exp(mu);
  return out;
}

StepPropagator::StepPropagator(const Liouvillian& l, double dt) : dim_(l.dim) {
  for (auto& indices : invariant_blocks(l.matrix)) {
    const Index n = static_cast<Index>(indices.size());
    Eigen::MatrixXcd sub(n, n);
    for (Index c = 0; c < n; ++c)
      for (Index r = 0; r < n; ++r) sub(r, c) = l.matrix(indices[r], indices[c]);
    blocks_.push_back({std::move(indices), expm(sub * dt)});
  }
}

void StepPropagator::apply(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const {
  out.resize(dim_);
  Eigen::VectorXcd x;
  for (const Block& b : blocks_) {
    const Index n = static_cast<Index>(b.indices.size());
    if (n == 1) {
      out(b.indices[0]) = b.step(0, 0) * in(b.indices[0]);
      continue;
    }
    x.resize(n);
    for (Index k = 0; k < n; ++k) x(k) = in(b.indices[k]);
    const Eigen::VectorXcd y = b.step * x;
    for (Index k = 0; k < n; ++k) out(b.indices[k]) = y(k);
  }
}

Eigen::MatrixXcd StepPropagator::dense() const {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim_, dim_);
  for (const Block& b : blocks_) {
    const Index n = static_cast<Index>(b.indices.size());
    for (Index c = 0; c < n; ++c)
      for (Index r = 0; r < n; ++r) m(b.indices[r], b.indices[c]) = b.step(r, c);
  }
  return m;
}

Index StepPropagator::largest_block() const {
  Index best = 0;
  for (const Block& b : blocks_) best = std::max(best, static_cast<Index>(b.indices.size()));
  return best;
}

Trajectory propagate_expm(const Liouvillian& l, const DensityMatrix& rho0, const TimeGrid& grid,
                          const PropagateOptions& options, const Observer& observer) {
  if (!(grid.t_end > 0.0) || grid.n_steps < 1) {
    throw NonUniformGridError("time grid needs t_end > 0 and n_steps >= 1");
  }
  const Index d = l.hilbert_dim();
  if (rho0.rows() != d || rho0.cols() != d) throw ShapeError("propagate_expm: rho0 does not match the Liouvillian");

  Trajectory traj;
  traj.times.reserve(grid.points());
  Recorder record(traj, options, observer);

  const StepPropagator step(l, grid.dt());
  Eigen::VectorXcd v = vec(rho0);
  Eigen::VectorXcd next;
  record(0.0, rho0);
  DensityMatrix rho;
  for (int k = 1; k <= grid.n_steps; ++k) {
    step.apply(v, next);
    rho = unvec(next);
    // Each step adds ~1e-14 of anti-Hermitian roundoff (more for long steps,
    // where the exponential needs many squarings). Check the raw step, then
    // project so the drift cannot build up over thousands of steps.
    if (options.check_invariants) check_density_matrix(rho, options.tolerances, grid.time(k));
    rho = (0.5 * (rho + rho.adjoint())).eval();
    record.store(grid.time(k), rho);
    v = vec(rho);
  }
  traj.final_state = rho;
  return traj;
}

Trajectory propagate_expm(const Liouvillian& l, const DensityMatrix& rho0, std::span<const double> times,
                          const PropagateOptions& options, const Observer& observer) {
  if (times.size() < 2) throw NonUniformGridError("need at least two time points");
  const double t0 = times.front();
  const int n_steps = static_cast<int>(times.size()) - 1;
  const double dt = (times.back() - t0) / n_steps;
  if (!(dt > 0.0)) throw NonUniformGridError("times must be increasing");
  for (int k = 0; k <= n_steps; ++k) {
    if (std::abs(times[k] - (t0 + k * dt)) > 1e-9 * std::max(1.0, std::abs(times.back()))) {
      throw NonUniformGridError("time grid is not uniform at index " + std::to_string(k) +
                                "; use propagate_integrator");
    }
  }
  const TimeGrid grid{times.back() - t0, n_steps};
  if (t0 == 0.0) return propagate_expm(l, rho0, grid, options, observer);

  Observer shifted;
  if (observer) shifted = [&](double t, const DensityMatrix& rho) { observer(t + t0, rho); };
  Trajectory traj = propagate_expm(l, rho0, grid, options, shifted);
  for (double& t : traj.times) t += t0;
  return traj;
}

Trajectory propagate_integrator(const MasterEquation& eq, const DensityMatrix& rho0,
                                std::span<const double> times, double tol, const PropagateOptions& options,
                                const Observer& observer) {
  namespace ode = boost::numeric::odeint;
  if (!(tol >= 1e-12 && tol <= 1e-6)) {
    throw InvalidParamsError("integrator tolerance must lie in [1e-12, 1e-6]");
  }
  if (times.empty()) throw NonUniformGridError("need at least one time point");
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1])) throw NonUniformGridError("times must be strictly increasing");
  }
  const Index d = eq.hamiltonian.rows();
  if (rho0.rows() != d || rho0.cols() != d) throw ShapeError("propagate_integrator: rho0 does not match H");

  // Interleaved (re, im) storage; std::complex<double> is layout compatible with double[2].
  using State = std::vector<double>;
  const auto as_matrix = [d](const State& x) {
    return Eigen::Map<const Operator>(reinterpret_cast<const Complex*>(x.data()), d, d);
  };

  State x(static_cast<std::size_t>(2 * d * d));
  Eigen::Map<Operator>(reinterpret_cast<Complex*>(x.data()), d, d) = rho0;

  auto rhs = [&](const State& in, State& out, double) {
    out.resize(in.size());
    Eigen::Map<Operator>(reinterpret_cast<Complex*>(out.data()), d, d) = apply_rhs(eq, as_matrix(in));
  };

  Trajectory traj;
  traj.times.reserve(times.size());
  Recorder record(traj, options, observer);
  auto obs = [&](const State& s, double t) { record(t, as_matrix(s)); };

  // Local error control two decades below the requested global tolerance:
  // global error accumulates over ~10^5 steps on the longer runs.
  auto stepper = ode::make_dense_output(0.01 * tol, 0.01 * tol, ode::runge_kutta_dopri5<State>());
  const double span = times.back() - times.front();
  const double dt0 = times.size() > 1 ? std::min(1e-3, span / 1000.0) : 1e-3;
  try {
    ode::integrate_times(stepper, rhs, x, times.begin(), times.end(), dt0, obs, ode::max_step_checker(1000000));
  } catch (const ode::odeint_error& e) {
    throw StiffnessError(std::string("adaptive integrator gave up: ") + e.what());
  }
  traj.final_state = as_matrix(x);
  return traj;
}

}  // namespace qsync
