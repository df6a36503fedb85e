#include "qsync/observables.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include <unsupported/Eigen/FFT>

#include "qsync/errors.hpp"

namespace qsync {

Complex expectation(const DensityMatrix& rho, const Operator& op) {
  if (rho.rows() != op.cols() || rho.cols() != op.rows()) throw ShapeError("expectation: shape mismatch");
  return rho.transpose().cwiseProduct(op).sum();
}

double expectation_real(const DensityMatrix& rho, const Operator& op) {
  const Complex v = expectation(rho, op);
  if (std::abs(v.imag()) > 1e-10) {
    throw NumericalInvariantError("expectation of Hermitian operator has imaginary part " +
                                  std::to_string(v.imag()));
  }
  return v.real();
}

PGDiagnostics pg_diagnostics(const DensityMatrix& rho, const ProtectedPair& pair) {
  const StateVector rho_G = rho * pair.state_G;
  PGDiagnostics out;
  out.pop_P = pair.state_P.dot(rho * pair.state_P).real();
  out.pop_G = pair.state_G.dot(rho_G).real();
  out.coh_PG = std::abs(pair.state_P.dot(rho_G));
  return out;
}

Entropies entropies(const DensityMatrix& rho) {
  const Operator herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Operator> solver(herm, Eigen::EigenvaluesOnly);
  Eigen::VectorXd lambda = solver.eigenvalues();

  Entropies out;
  for (Index i = 0; i < lambda.size(); ++i) {
    if (lambda(i) < -kEntropyClipTol) {
      throw NumericalInvariantError("entropy: eigenvalue " + std::to_string(lambda(i)) + " below -1e-8");
    }
    if (lambda(i) < 0.0) {
      lambda(i) = 0.0;
      ++out.clipped_eigenvalues;
    }
  }
  lambda /= lambda.sum();
  for (Index i = 0; i < lambda.size(); ++i) {
    if (lambda(i) > 0.0) out.vn_entropy -= lambda(i) * std::log(lambda(i));
  }
  out.vn_entropy = std::max(out.vn_entropy, 0.0);
  out.purity = herm.squaredNorm();
  return out;
}

std::map<int, double> block_populations(const DensityMatrix& rho, const std::vector<ExcitationBlock>& blocks) {
  std::map<int, double> out;
  for (const auto& b : blocks) {
    double p = 0.0;
    for (Index i : b.members) p += rho(i, i).real();
    out[b.n] = p;
  }
  return out;
}

ObservableEvaluator::ObservableEvaluator(const ModelParams& params, ProtectedPair pair)
    : space_(build_space(params.n_max)),
      pair_(std::move(pair)),
      sx_A_(pauli_ops(space_, Qubit::A).x),
      sx_B_(pauli_ops(space_, Qubit::B).x),
      blocks_(excitation_blocks(space_)) {}

ObservableRecord ObservableEvaluator::operator()(double t, const DensityMatrix& rho) const {
  ObservableRecord r;
  r.t = t;
  r.sx_A = expectation_real(rho, sx_A_);
  r.sx_B = expectation_real(rho, sx_B_);
  const PGDiagnostics pg = pg_diagnostics(rho, pair_);
  r.pop_P = pg.pop_P;
  r.pop_G = pg.pop_G;
  r.coh_PG = pg.coh_PG;
  const Entropies e = entropies(rho);
  r.purity = e.purity;
  r.vn_entropy = e.vn_entropy;
  r.clipped_eigenvalues = e.clipped_eigenvalues;
  r.block_populations = block_populations(rho, blocks_);
  return r;
}

SpectralPeak dominant_frequency(std::span<const double> signal, double dt) {
  const std::size_t n = signal.size();
  if (n < 8) throw WindowTooShortError("spectral analysis needs at least 8 samples");

  const double mean = std::accumulate(signal.begin(), signal.end(), 0.0) / n;
  std::vector<double> windowed(n);
  double window_sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double w = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * k / (n - 1)));
    windowed[k] = w * (signal[k] - mean);
    window_sum += w;
  }

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spectrum;
  fft.fwd(spectrum, windowed);

  const std::size_t half = n / 2;
  std::vector<double> mag(half + 1);
  for (std::size_t k = 0; k <= half; ++k) mag[k] = std::abs(spectrum[k]);

  std::size_t peak = 1;
  for (std::size_t k = 1; k < half; ++k)
    if (mag[k] > mag[peak]) peak = k;

  SpectralPeak out;
  out.amplitude = 2.0 * mag[peak] / window_sum;
  if (out.amplitude < kSpectralNoiseFloor) return out;

  double offset = 0.0;
  if (peak >= 1 && peak + 1 <= half) {
    const double tiny = 1e-300;
    const double lm = std::log(mag[peak - 1] + tiny);
    const double l0 = std::log(mag[peak] + tiny);
    const double lp = std::log(mag[peak + 1] + tiny);
    const double curvature = lm - 2.0 * l0 + lp;
    if (curvature < 0.0) offset = std::clamp(0.5 * (lm - lp) / curvature, -0.5, 0.5);
  }
  out.found = true;
  out.frequency = 2.0 * std::numbers::pi * (peak + offset) / (n * dt);
  return out;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = std::min(x.size(), y.size());
  if (n < 2) return 0.0;
  auto constant = [n](std::span<const double> v) {
    return std::all_of(v.begin(), v.begin() + n, [&](double e) { return e == v[0]; });
  };
  if (constant(x) || constant(y)) return 0.0;
  const double mx = std::accumulate(x.begin(), x.begin() + n, 0.0) / n;
  const double my = std::accumulate(y.begin(), y.begin() + n, 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
    syy += (y[k] - my) * (y[k] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

SyncReport sync_diagnostics(std::span<const double> times, std::span<const double> sx_A,
                            std::span<const double> sx_B, double expected_frequency) {
  if (times.size() != sx_A.size() || times.size() != sx_B.size()) {
    throw ShapeError("sync_diagnostics: series lengths differ");
  }
  const std::size_t total = times.size();
  const std::size_t n = total / 4;
  if (n < 8) throw WindowTooShortError("trajectory too short for a tail window");
  const std::size_t start = total - n;
  const double dt = (times.back() - times[start]) / (n - 1);
  const double duration = n * dt;

  const double omega = std::abs(expected_frequency);
  SyncReport out;
  out.resolution = 2.0 * std::numbers::pi / duration;
  if (omega > out.resolution) {
    const double period = 2.0 * std::numbers::pi / omega;
    if (duration < 10.0 * period) {
      throw WindowTooShortError("tail window spans " + std::to_string(duration / period) +
                                " periods; need >= 10");
    }
  }

  out.peak_A = dominant_frequency(sx_A.subspan(start), dt);
  out.peak_B = dominant_frequency(sx_B.subspan(start), dt);
  out.degenerate = !out.peak_A.found && !out.peak_B.found;
  out.common_frequency = out.peak_A.found && out.peak_B.found &&
                         std::abs(out.peak_A.frequency - out.peak_B.frequency) < 2.0 * out.resolution;

  if (omega > out.resolution) {
    const auto window = static_cast<std::size_t>(std::llround(2.0 * (2.0 * std::numbers::pi / omega) / dt));
    const std::size_t stride = std::max<std::size_t>(1, window / 2);
    if (window >= 3) {
      for (std::size_t s = start; s + window <= total; s += stride) {
        out.window_correlation.push_back(pearson(sx_A.subspan(s, window), sx_B.subspan(s, window)));
      }
    }
  }
  out.synchronized = out.common_frequency && !out.window_correlation.empty() &&
                     std::all_of(out.window_correlation.begin(), out.window_correlation.end(),
                                 [](double c) { return std::abs(c) > 0.99; });
  return out;
}

SyncReport sync_diagnostics(const std::vector<ObservableRecord>& records, double expected_frequency) {
  std::vector<double> t, a, b;
  t.reserve(records.size());
  a.reserve(records.size());
  b.reserve(records.size());
  for (const auto& r : records) {
    t.push_back(r.t);
    a.push_back(r.sx_A);
    b.push_back(r.sx_B);
  }
  return sync_diagnostics(t, a, b, expected_frequency);
}

}  // namespace qsync
