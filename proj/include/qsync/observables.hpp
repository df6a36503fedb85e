#pragma once

#include <map>
#include <span>
#include <vector>

#include "qsync/model.hpp"

namespace qsync {

Complex expectation(const DensityMatrix& rho, const Operator& op);

/// Tr(rho O) for Hermitian O; throws NumericalInvariantError if the
/// imaginary part exceeds 1e-10.
double expectation_real(const DensityMatrix& rho, const Operator& op);

struct PGDiagnostics {
  double pop_P = 0.0;
  double pop_G = 0.0;
  double coh_PG = 0.0;  // |<P|rho|G>|
};

PGDiagnostics pg_diagnostics(const DensityMatrix& rho, const ProtectedPair& pair);

/// Eigenvalues in (-1e-8, 0) are clipped to zero before the logarithm and the
/// spectrum renormalized; the number clipped is reported, never hidden.
struct Entropies {
  double vn_entropy = 0.0;
  double purity = 1.0;
  int clipped_eigenvalues = 0;
};

inline constexpr double kEntropyClipTol = 1e-8;

Entropies entropies(const DensityMatrix& rho);

struct ObservableRecord {
  double t = 0.0;
  double sx_A = 0.0;
  double sx_B = 0.0;
  double pop_P = 0.0;
  double pop_G = 0.0;
  double coh_PG = 0.0;
  double purity = 1.0;
  double vn_entropy = 0.0;
  std::map<int, double> block_populations;
  int clipped_eigenvalues = 0;
};

/// Precomputes the operators needed for ObservableRecord on one model.
class ObservableEvaluator {
 public:
  ObservableEvaluator(const ModelParams& params, ProtectedPair pair);

  ObservableRecord operator()(double t, const DensityMatrix& rho) const;
  const ProtectedPair& pair() const { return pair_; }
  const Space& space() const { return space_; }

 private:
  Space space_;
  ProtectedPair pair_;
  Operator sx_A_;
  Operator sx_B_;
  std::vector<ExcitationBlock> blocks_;
};

std::map<int, double> block_populations(const DensityMatrix& rho, const std::vector<ExcitationBlock>& blocks);

struct SpectralPeak {
  bool found = false;     // false when the detrended tail is below the noise floor
  double frequency = 0.0; // angular, rad per unit time
  double amplitude = 0.0;
};

/// Amplitude below which a detrended tail counts as non-oscillating.
inline constexpr double kSpectralNoiseFloor = 1e-6;

/// Dominant angular frequency of a uniformly sampled signal: mean removed,
/// Hann window, DFT, parabolic interpolation of the log-magnitude peak.
SpectralPeak dominant_frequency(std::span<const double> signal, double dt);

/// Pearson correlation; 0 if either input is constant.
double pearson(std::span<const double> x, std::span<const double> y);

struct SyncReport {
  SpectralPeak peak_A;
  SpectralPeak peak_B;
  double resolution = 0.0;        // 2 pi / (window duration)
  bool common_frequency = false;  // both oscillate and |f_A - f_B| < 2 resolution
  bool degenerate = false;        // neither signal oscillates in the tail
  std::vector<double> window_correlation;
  bool synchronized = false;      // common_frequency and every |corr| > 0.99
};

/// Analyses the last 25% of the samples. expected_frequency sets the window
/// length check (>= 10 periods) and the correlation window (2 periods); pass
/// 0 when no oscillation is expected.
SyncReport sync_diagnostics(std::span<const double> times, std::span<const double> sx_A,
                            std::span<const double> sx_B, double expected_frequency);

SyncReport sync_diagnostics(const std::vector<ObservableRecord>& records, double expected_frequency);

}  // namespace qsync
