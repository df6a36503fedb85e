// Acceptance suite: one PASS/FAIL line per primary criterion, at the
// tolerances of the project's acceptance list.
//
//   acceptance            run everything
//   acceptance 1 3 9      run a subset
//
// Exit status is 0 only when every selected criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <thread>

#include <Eigen/Eigenvalues>

#include "qsync/errors.hpp"
#include "qsync/scenarios.hpp"
#include "qsync/steady.hpp"

using namespace qsync;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

ScenarioConfig preset_scenario(const std::string& name) {
  return std::get<ScenarioConfig>(load_config(resolve_config(name)));
}

SweepConfig preset_sweep(const std::string& name) { return std::get<SweepConfig>(load_config(resolve_config(name))); }

// fig1 is needed by criteria 3 and 4; run it once.
const ScenarioResult& fig1_result(double* runtime = nullptr) {
  static double elapsed = 0.0;
  static const ScenarioResult result = [] {
    const auto start = Clock::now();
    ScenarioResult r = run_scenario(preset_scenario("fig1"));
    elapsed = seconds_since(start);
    return r;
  }();
  if (runtime) *runtime = elapsed;
  return result;
}

ModelParams reference_params() {
  ModelParams p;  // 55 / 70 / 64, kappa_A = 1, kappa_B = 3
  return with_tuned_coupling(p);
}

Outcome eigenstate_tuning() {
  const auto start = Clock::now();
  const ModelParams p = reference_params();
  const ProtectedPair pair = protected_pair(p);
  const Operator h = build_hamiltonian(p);
  const double residual = (h * pair.state_P - pair.energy_P * pair.state_P).norm();
  Eigen::SelfAdjointEigenSolver<Operator> es(h);
  auto in_spectrum = [&](double e) { return (es.eigenvalues().array() - e).abs().minCoeff(); };
  const double dev_P = in_spectrum(pair.energy_P), dev_G = in_spectrum(pair.energy_G);
  const double t = seconds_since(start);
  const bool pass = std::abs(p.kappa_AB - 5.625) < 1e-12 && residual < 1e-10 &&
                    std::abs(pair.energy_P + 9.375) < 1e-12 && std::abs(pair.energy_G + 62.5) < 1e-12 &&
                    dev_P < 1e-10 && dev_G < 1e-10 && t < 1.0;
  return {pass, fmt("kappa_AB=%.12g |H P - E_P P|=%.2e E_P=%.12g E_G=%.12g diag dev %.1e/%.1e, %.3f s",
                    p.kappa_AB, residual, pair.energy_P, pair.energy_G, dev_P, dev_G, t)};
}

Outcome dark_pair() {
  ModelParams p = reference_params();
  p.gamma_diss_r = 0.5;
  const ProtectedPair pair = protected_pair(p);
  const Liouvillian l = build_liouvillian(p);
  auto act = [&](const Operator& x) { return unvec(l.matrix * vec(x)); };
  const Operator PG = pair.state_P * pair.state_G.adjoint();
  const double rP = max_abs(act(projector(pair.state_P)));
  const double rG = max_abs(act(projector(pair.state_G)));
  const double rPG = max_abs(Operator(act(PG) + kI * 53.125 * PG));
  return {rP < 1e-12 && rG < 1e-12 && rPG < 1e-10,
          fmt("|L PP|=%.2e |L GG|=%.2e |L PG + 53.125i PG|=%.2e", rP, rG, rPG)};
}

Outcome fig1_reproduction() {
  double runtime = 0.0;
  const ScenarioResult& r = fig1_result(&runtime);
  const Index d = Space(r.params.n_max).dim();
  const SyncReport sync = sync_diagnostics(r.records, r.pair.transition_frequency());
  double dP = 0.0, dC = 0.0;
  for (const auto& rec : r.records) {
    dP = std::max(dP, std::abs(rec.pop_P - 0.25));
    dC = std::max(dC, std::abs(rec.coh_PG - 0.25));
  }
  const double dG = std::abs(r.records.back().pop_G - 0.75);
  const double fA = sync.peak_A.frequency, fB = sync.peak_B.frequency, bin = sync.resolution;
  const bool freq_ok = sync.peak_A.found && sync.peak_B.found && std::abs(fA - 53.125) <= bin &&
                       std::abs(fB - 53.125) <= bin && sync.common_frequency;
  const bool pass = d == 20 && r.records.size() == 8001 && freq_ok && dP < 1e-3 && dC < 1e-3 && dG < 1e-3 &&
                    runtime < 30.0;
  return {pass, fmt("d=%d points=%zu freq_A=%.4f freq_B=%.4f (bin %.4f) max|pop_P-.25|=%.1e max|coh-.25|=%.1e "
                    "|pop_G(200)-.75|=%.1e synchronized=%s, %.2f s",
                    int(d), r.records.size(), fA, fB, bin, dP, dC, dG, sync.synchronized ? "yes" : "no", runtime)};
}

Outcome fig2_degradation() {
  const ScenarioResult& clean = fig1_result();
  const ScenarioResult noisy = run_scenario(preset_scenario("fig2"));
  if (noisy.records.size() != clean.records.size()) return {false, "fig1/fig2 grids differ"};
  const std::size_t n = noisy.records.size();
  bool decreasing = true;
  double worst_gap = 1e300;
  for (std::size_t k = n - n / 4; k < n; ++k) {
    if (noisy.records[k].t != clean.records[k].t) return {false, "time mismatch"};
    const double gap = clean.records[k].coh_PG - noisy.records[k].coh_PG;
    worst_gap = std::min(worst_gap, gap);
    decreasing = decreasing && gap > 0.0;
  }
  const double final = noisy.records.back().coh_PG;
  return {decreasing && final > 0.1,
          fmt("tail coh strictly below fig1: %s (min gap %.3e); coh_PG(t=%.0f)=%.4f vs threshold 0.1", decreasing ? "yes" : "no",
              worst_gap, noisy.records.back().t, final)};
}

Outcome fig3_low_coherence() {
  const ScenarioResult r = run_scenario(preset_scenario("fig3"));
  const double c0 = r.records.front().coh_PG;
  const double c = r.records.back().coh_PG, pP = r.records.back().pop_P;
  const bool pass = c0 < 1e-12 && c > 0.0 && c < 0.05 && pP > 1e-6 && pP < 0.05;
  return {pass, fmt("coh_PG(0)=%.1e coh_PG(%.0f)=%.5f pop_P=%.5f", c0, r.records.back().t, c, pP)};
}

Outcome fig4_sweep() {
  const SweepConfig a = preset_sweep("fig4a");
  const SweepConfig b = preset_sweep("fig4b");
  auto timed = [](const SweepConfig& s, int jobs, double& t) {
    const auto start = Clock::now();
    SweepGrid g = run_sweep(s, jobs);
    t = seconds_since(start);
    return g;
  };
  double ta = 0.0, tb = 0.0, tb4 = 0.0;
  const SweepGrid ga = timed(a, 1, ta);
  std::printf("       fig4a serial: %.1f s\n", ta);
  std::fflush(stdout);
  const SweepGrid gb = timed(b, 1, tb);
  std::printf("       fig4b serial: %.1f s\n", tb);
  std::fflush(stdout);
  const SweepGrid gb4 = timed(b, 4, tb4);
  std::printf("       fig4b 4 workers: %.1f s\n", tb4);

  const std::size_t nk = ga.kappa_B_over_kA.size(), ng = ga.log10_gamma_r.size();
  const bool shape = nk == 41 && ng == 31 && ga.coh_PG.size() == nk * ng && gb.coh_PG.size() == nk * ng;
  std::size_t expected_gaps = 0;
  for (double r : ga.kappa_B_over_kA) expected_gaps += in_singular_band(a.axes, r) ? ng : 0;
  bool complete = ga.gap_count() == expected_gaps && gb.gap_count() == expected_gaps;
  bool monotone = true, last_column = true;
  double worst = -1e300;
  for (std::size_t i = 0; i < nk; ++i) {
    for (std::size_t j = 0; j < ng; ++j) {
      const auto &va = ga.at(i, j), &vb = gb.at(i, j);
      if (va.has_value() != vb.has_value()) complete = false;
      if (!va || !vb) continue;
      if (!std::isfinite(*va) || !std::isfinite(*vb)) complete = false;
      worst = std::max(worst, *vb - *va);
      monotone = monotone && *vb <= *va + 1e-9;
      if (j + 1 == ng && in_singular_band(a.axes, ga.kappa_B_over_kA[i]) == false)
        last_column = last_column && std::isfinite(*va) && std::isfinite(*vb);
    }
  }
  last_column = last_column && std::abs(ga.log10_gamma_r.back() - 1.0) < 1e-12;
  const double speedup = tb / tb4;
  const bool identical = gb4.coh_PG == gb.coh_PG;
  const bool pass = shape && complete && monotone && last_column && identical && ta < 900.0 && tb < 900.0 &&
                    speedup >= 3.0;
  return {pass, fmt("grid %zux%zu, gaps %zu, complete=%s, max(b-a)=%.2e monotone=%s, gamma_r=10 column ok=%s, "
                    "serial %.1f s / %.1f s (limit 900), 4-worker speedup %.2fx (need 3x; %u hardware threads), "
                    "parallel==serial %s",
                    nk, ng, ga.gap_count(), complete ? "yes" : "no", worst, monotone ? "yes" : "no",
                    last_column ? "yes" : "no", ta, tb, speedup, std::thread::hardware_concurrency(),
                    identical ? "yes" : "no")};
}

Outcome fig5_microcanonical() {
  const std::vector<BasisIndex> n2{{2, Level::Minus, Level::Minus},
                                   {1, Level::Plus, Level::Minus},
                                   {1, Level::Minus, Level::Plus},
                                   {0, Level::Plus, Level::Plus}};
  std::string detail;
  bool pass = true;
  auto check = [&](const char* name, double target, bool populations) {
    const ScenarioResult r = run_scenario(preset_scenario(name));
    const double purity = r.records.back().purity;
    pass = pass && std::abs(purity - target) < 1e-2;
    detail += fmt("%s purity=%.5f", name, purity);
    if (populations) {
      const Space s(r.params.n_max);
      double worst = 0.0;
      for (const auto& b : n2) worst = std::max(worst, std::abs(r.trajectory.final_state(s.flat(b), s.flat(b)).real() - 0.25));
      pass = pass && worst < 1e-2;
      detail += fmt(" max|pop_n2-.25|=%.1e", worst);
    }
    detail += "; ";
  };
  check("fig5a", 1.0 / 3.0, false);
  check("fig5a_n2", 0.25, true);
  check("fig5b", 0.25, true);
  return {pass, detail};
}

Outcome stationarity() {
  ModelParams p = reference_params();
  p.gamma_deph_A = p.gamma_deph_B = 0.003;
  const Space s(p.n_max);
  const Liouvillian l = build_liouvillian(p, DynamicsMode::PureDephasing);
  double worst = 0.0;
  for (int n = 0; n <= 3; ++n) worst = std::max(worst, stationarity_residual(l, microcanonical_state(s, n)));
  std::string dims;
  bool all_one = true;
  for (const ExcitationBlock& b : excitation_blocks(s)) {
    const int dim = kernel_dimension(l, s, b.n).dimension;
    all_one = all_one && dim == 1;
    dims += std::to_string(dim);
  }
  return {worst < 1e-12 && all_one,
          fmt("max residual n=0..3 %.2e; kernel dims per block n=0..%d: %s", worst, s.n_max() + 2, dims.c_str())};
}

struct Hygiene {
  double trace = 0.0, min_eig = 1.0, agreement = 0.0, number = 0.0, semigroup = 0.0;
};

Hygiene hygiene(const ScenarioConfig& cfg) {
  Hygiene h;
  const ModelParams p = cfg.resolved_params();
  const MasterEquation eq = master_equation(p, cfg.mode);
  const Liouvillian l = build_liouvillian(eq);
  const DensityMatrix rho0 = initial_density(cfg.initial_state, p);
  PropagateOptions unchecked;
  unchecked.check_invariants = false;

  propagate_expm(l, rho0, cfg.time, unchecked, [&](double, const DensityMatrix& rho) {
    h.trace = std::max(h.trace, std::abs(rho.trace().real() - 1.0));
    h.min_eig = std::min(h.min_eig, min_eigenvalue(rho));
  });

  // Integrator cross-check on the opening stretch of the grid (at least two
  // steps, up to t = 20): the explicit stepper is far slower than expm.
  const double dt = cfg.time.dt();
  const int k = std::clamp(static_cast<int>(20.0 / dt), 2, cfg.time.n_steps);
  std::vector<double> times = cfg.time.times();
  times.resize(k + 1);
  PropagateOptions keep = unchecked;
  keep.retain_states = true;
  const Trajectory a = propagate_expm(l, rho0, times, keep);
  const Trajectory b = propagate_integrator(eq, rho0, times, 1e-9, keep);
  for (std::size_t i = 0; i < a.states.size(); ++i)
    h.agreement = std::max(h.agreement, max_abs(Operator(a.states[i] - b.states[i])));

  ModelParams deph = p;
  if (deph.gamma_deph_A == 0.0) deph.gamma_deph_A = 0.003;
  if (deph.gamma_deph_B == 0.0) deph.gamma_deph_B = 0.003;
  const Operator N = number_operator(eq.space);
  const double n0 = (rho0 * N).trace().real();
  propagate_expm(build_liouvillian(deph, DynamicsMode::PureDephasing), rho0, cfg.time, unchecked,
                 [&](double, const DensityMatrix& rho) {
                   h.number = std::max(h.number, std::abs((rho * N).trace().real() - n0));
                 });

  for (const auto& block : invariant_blocks(l.matrix)) {
    const Index m = static_cast<Index>(block.size());
    Eigen::MatrixXcd sub(m, m);
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < m; ++j) sub(i, j) = l.matrix(block[i], block[j]);
    const Eigen::MatrixXcd one = expm(sub * dt);
    h.semigroup = std::max(h.semigroup, max_abs(Eigen::MatrixXcd(expm(sub * (2 * dt)) - one * one)));
  }
  return h;
}

Outcome numerical_hygiene() {
  bool pass = true;
  std::string detail;
  for (const std::string& name : list_presets()) {
    const ExperimentConfig cfg = load_config(resolve_config(name));
    ScenarioConfig scenario;
    if (const auto* s = std::get_if<ScenarioConfig>(&cfg)) {
      scenario = *s;
    } else {
      // Sweeps: the base point, on the grid the sweep uses (t = t_factor / gamma_r).
      const auto& sw = std::get<SweepConfig>(cfg);
      scenario = sw.base;
      scenario.time = TimeGrid{sw.axes.t_factor / scenario.model.gamma_diss_r, sw.axes.n_steps};
    }
    const Hygiene h = hygiene(scenario);
    const bool ok = h.trace < 1e-9 && h.min_eig > -1e-8 && h.agreement < 1e-7 && h.number < 1e-10 &&
                    h.semigroup < 1e-11;
    pass = pass && ok;
    detail += fmt("\n       %-12s %s tr %.1e  min-eig %+.1e  expm/int %.1e  dN %.1e  semigroup %.1e", name.c_str(),
                  ok ? "ok " : "BAD", h.trace, h.min_eig, h.agreement, h.number, h.semigroup);
  }
  return {pass, detail};
}

struct Criterion {
  int id;
  const char* title;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "eigenstate tuning", eigenstate_tuning},
      {2, "dark pair", dark_pair},
      {3, "fig1 synchronization", fig1_reproduction},
      {4, "fig2 degradation", fig2_degradation},
      {5, "fig3 low coherence", fig3_low_coherence},
      {6, "fig4 sweep", fig4_sweep},
      {7, "fig5 microcanonical relaxation", fig5_microcanonical},
      {8, "stationarity and uniqueness", stationarity},
      {9, "numerical hygiene", numerical_hygiene},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const Criterion& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto start = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("[%s] criterion %d (%s): %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.title, o.detail.c_str(),
                seconds_since(start));
    std::fflush(stdout);
  }
  std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
