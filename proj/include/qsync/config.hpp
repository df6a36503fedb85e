#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qsync/liouvillian.hpp"
#include "qsync/propagate.hpp"

namespace qsync {

/// Ket reference inside a config: a product basis ket, |P> or |G>.
struct PairKet {
  enum class Which { P, G } which = Which::P;
  friend bool operator==(const PairKet&, const PairKet&) = default;
};
using KetRef = std::variant<BasisIndex, PairKet>;

struct KetTerm {
  Complex amplitude{1.0, 0.0};
  KetRef ket;
  friend bool operator==(const KetTerm&, const KetTerm&) = default;
};

struct FockState {
  BasisIndex ket;
  friend bool operator==(const FockState&, const FockState&) = default;
};

struct CoherentState {
  Complex alpha{1.0, 0.0};
  Level s_A = Level::Minus;
  Level s_B = Level::Minus;
  double leakage_tol = kDefaultLeakageTol;
  friend bool operator==(const CoherentState&, const CoherentState&) = default;
};

/// weight_P |P> + weight_G |G> (amplitudes).
struct PGSuperposition {
  Complex weight_P{1.0, 0.0};
  Complex weight_G{0.0, 0.0};
  friend bool operator==(const PGSuperposition&, const PGSuperposition&) = default;
};

/// Arbitrary amplitude list over named kets.
struct CustomState {
  std::vector<KetTerm> terms;
  friend bool operator==(const CustomState&, const CustomState&) = default;
};

/// Incoherent mixture sum_k w_k |k><k|.
struct MixedState {
  struct Component {
    double weight = 0.0;
    KetRef ket;
    friend bool operator==(const Component&, const Component&) = default;
  };
  std::vector<Component> components;
  friend bool operator==(const MixedState&, const MixedState&) = default;
};

using InitialState = std::variant<FockState, CoherentState, PGSuperposition, CustomState, MixedState>;

struct OutputSelection {
  std::vector<BasisIndex> populations;  // extra per-ket population series
  bool block_populations = false;
  bool retain_states = false;
  friend bool operator==(const OutputSelection&, const OutputSelection&) = default;
};

struct ScenarioConfig {
  std::string name = "scenario";
  std::string description;
  ModelParams model;
  bool tune_kappa_AB = true;
  DynamicsMode mode = DynamicsMode::Full;
  InitialState initial_state = FockState{};
  TimeGrid time{200.0, 8000};
  OutputSelection output;

  /// Throws ConfigError with a "section.key: message" description.
  void validate() const;
  /// Model parameters with kappa_AB resolved (tuned when requested).
  ModelParams resolved_params() const;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

struct SweepAxes {
  double kappa_B_min = 0.2;
  double kappa_B_max = 5.0;
  int kappa_B_points = 41;
  double log10_gamma_r_min = -2.0;
  double log10_gamma_r_max = 1.0;
  int log10_gamma_r_points = 31;
  double singular_band = 0.02;  // |kappa_B/kappa_A - 1| below this is a gap
  double t_factor = 200.0;      // evaluation time = t_factor / gamma_r
  int n_steps = 50;

  std::vector<double> kappa_B_grid() const;
  std::vector<double> log10_gamma_r_grid() const;
  friend bool operator==(const SweepAxes&, const SweepAxes&) = default;
};

struct SweepConfig {
  ScenarioConfig base;  // template: model, initial state, output name
  SweepAxes axes;

  void validate() const;
  friend bool operator==(const SweepConfig&, const SweepConfig&) = default;
};

using ExperimentConfig = std::variant<ScenarioConfig, SweepConfig>;

/// Parse the sectioned key=value format (see docs/config-format.md).
ExperimentConfig parse_config(std::string_view text);
ScenarioConfig parse_scenario(std::string_view text);
SweepConfig parse_sweep(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

std::string serialize(const ScenarioConfig& config);
std::string serialize(const SweepConfig& config);
std::string serialize(const ExperimentConfig& config);

/// Term / ket grammar helpers (exposed for tests).
KetRef parse_ket(std::string_view text);
std::string format_ket(const KetRef& ket);
Complex parse_amplitude(std::string_view text);

/// Density matrix of an initial-state description on the model's space.
/// Pure states must be normalized within 1e-10 (ConfigError otherwise).
StateVector ket_vector(const KetRef& ket, const ModelParams& params);
DensityMatrix initial_density(const InitialState& state, const ModelParams& params);

/// Directory holding the shipped preset files; QSYNC_PRESET_DIR overrides.
std::filesystem::path preset_dir();
std::vector<std::string> list_presets();
/// An existing file path is returned as is; otherwise <preset_dir>/<name>.ini.
std::filesystem::path resolve_config(const std::string& name_or_path);

}  // namespace qsync
