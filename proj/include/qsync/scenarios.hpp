#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qsync/config.hpp"
#include "qsync/observables.hpp"

namespace qsync {

struct ScenarioResult {
  ScenarioConfig config;
  ModelParams params;  // kappa_AB resolved
  ProtectedPair pair;
  Trajectory trajectory;
  std::vector<ObservableRecord> records;
  /// populations[k][i]: population of config.output.populations[i] at record k.
  std::vector<std::vector<double>> populations;
  int clipped_eigenvalues = 0;
};

/// Deterministic: identical configs give bit-identical results. Throws
/// ConfigError for invalid configs, NumericalInvariantError on a failed
/// trace/Hermiticity/positivity check.
ScenarioResult run_scenario(const ScenarioConfig& config);

/// Pair used for P/G diagnostics; requires a tunable kappa_AB geometry even
/// when kappa_AB is given explicitly (E_P is undefined otherwise).
ProtectedPair scenario_pair(const ModelParams& params);

struct SweepGrid {
  std::vector<double> kappa_B_over_kA;
  std::vector<double> log10_gamma_r;
  /// Row-major: kappa index outer, gamma index inner. Empty = singular-band gap.
  std::vector<std::optional<double>> coh_PG;

  const std::optional<double>& at(std::size_t i_kappa, std::size_t j_gamma) const {
    return coh_PG[i_kappa * log10_gamma_r.size() + j_gamma];
  }
  std::size_t gap_count() const;
};

/// The single-run config a sweep evaluates at grid point (i, j): kappa_B and
/// gamma_diss_r substituted, t_end = t_factor / gamma_r on axes.n_steps steps.
ScenarioConfig sweep_point_config(const SweepConfig& sweep, std::size_t i_kappa, std::size_t j_gamma);

bool in_singular_band(const SweepAxes& axes, double kappa_B_over_kA);

/// Evaluates every grid point with `jobs` worker threads; the result does not
/// depend on jobs.
SweepGrid run_sweep(const SweepConfig& sweep, int jobs = 1);

enum class OutputFormat { Csv, Json };

inline constexpr const char* kToolName = "qsync";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kTrajectoryHeader = "t,sx_A,sx_B,pop_P,pop_G,coh_PG,purity,vn_entropy";
inline constexpr const char* kSweepHeader = "kappa_B_over_kA,log10_gamma_r,coh_PG";

/// "%.12g".
std::string format_value(double v);

std::string trajectory_csv(const std::vector<ObservableRecord>& records);
std::string trajectory_json(const ScenarioResult& result);
std::string populations_csv(const ScenarioResult& result);
std::string blocks_csv(const ScenarioResult& result);
std::string sweep_csv(const SweepGrid& grid);
std::string sweep_json(const SweepGrid& grid, const SweepConfig& config);

/// Label of a per-ket population column, e.g. pop_2-- for |2,-,->.
std::string population_label(const BasisIndex& b);

/// Writes <dir>/<name>.{csv,json} plus the optional population/block CSVs.
/// Returns the files written. Throws IoError with the path on failure.
std::vector<std::filesystem::path> emit(const ScenarioResult& result, OutputFormat format,
                                        const std::filesystem::path& dir);
std::vector<std::filesystem::path> emit(const SweepGrid& grid, const SweepConfig& config, OutputFormat format,
                                        const std::filesystem::path& dir);

void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace qsync
