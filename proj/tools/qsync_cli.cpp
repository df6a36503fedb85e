// qsync: run synchronization scenarios, parameter sweeps and config checks.
//
// Exit codes: 0 success, 1 other failure, 2 config error, 3 numerical
// invariant violation.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qsync/errors.hpp"
#include "qsync/scenarios.hpp"

namespace {

using namespace qsync;

constexpr int kExitOther = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

OutputFormat parse_format(const std::string& s) {
  return s == "json" ? OutputFormat::Json : OutputFormat::Csv;
}

std::string first_line_description(const std::filesystem::path& path) {
  try {
    const auto cfg = load_config(path);
    return std::visit(
        [](const auto& c) {
          if constexpr (std::is_same_v<std::decay_t<decltype(c)>, ScenarioConfig>) return c.description;
          else return c.base.description;
        },
        cfg);
  } catch (const Error&) {
    return "(invalid config)";
  }
}

void report_scenario(const ScenarioResult& r) {
  const auto& last = r.records.back();
  std::printf("%s: kappa_AB=%.12g  E_P-E_G=%.12g  final pop_P=%.6f pop_G=%.6f coh_PG=%.6f purity=%.6f\n",
              r.config.name.c_str(), r.params.kappa_AB, r.pair.transition_frequency(), last.pop_P, last.pop_G,
              last.coh_PG, last.purity);
  if (r.clipped_eigenvalues > 0) {
    std::fprintf(stderr, "note: %d tiny negative eigenvalues (> -1e-8) clipped for entropies\n",
                 r.clipped_eigenvalues);
  }
  try {
    const SyncReport sync = sync_diagnostics(r.records, r.pair.transition_frequency());
    if (sync.degenerate) {
      std::printf("  tail: no oscillation above the noise floor (degenerate P/G)\n");
    } else {
      std::printf("  tail: freq_A=%.6f freq_B=%.6f (bin %.4f) common=%s synchronized=%s\n",
                  sync.peak_A.frequency, sync.peak_B.frequency, sync.resolution,
                  sync.common_frequency ? "yes" : "no", sync.synchronized ? "yes" : "no");
    }
  } catch (const WindowTooShortError&) {
    // runs too short for a spectral tail just skip the report
  }
}

int run_sweep_cmd(const SweepConfig& cfg, int jobs, OutputFormat format, const std::filesystem::path& out) {
  const SweepGrid grid = run_sweep(cfg, jobs);
  for (const auto& p : emit(grid, cfg, format, out)) std::printf("wrote %s\n", p.string().c_str());
  std::printf("%s: %zu points, %zu gaps\n", cfg.base.name.c_str(), grid.coh_PG.size(), grid.gap_count());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two qubits + lossy resonator: protected-state synchronization simulator"};
  app.require_subcommand(1);

  std::string target;
  std::string out_dir = ".";
  std::string format = "csv";
  int jobs = 1;

  auto* run = app.add_subcommand("run", "Run a preset or config file");
  run->add_option("config", target, "Preset name or config path")->required();
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  run->add_option("--jobs", jobs, "Worker threads (sweep configs only)")->check(CLI::PositiveNumber);

  auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep config");
  sweep->add_option("config", target, "Preset name or config path")->required();
  sweep->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  sweep->add_option("--out", out_dir, "Output directory");
  sweep->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  auto* validate = app.add_subcommand("validate", "Parse and validate a config");
  validate->add_option("config", target, "Preset name or config path")->required();

  auto* presets = app.add_subcommand("presets", "List shipped presets");

  CLI11_PARSE(app, argc, argv);

  try {
    if (presets->parsed()) {
      for (const auto& name : list_presets()) {
        std::printf("%-12s %s\n", name.c_str(), first_line_description(preset_dir() / (name + ".ini")).c_str());
      }
      return 0;
    }

    const ExperimentConfig cfg = load_config(resolve_config(target));

    if (validate->parsed()) {
      std::visit([](const auto& c) { c.validate(); }, cfg);
      std::printf("ok: %s\n", std::holds_alternative<SweepConfig>(cfg) ? "sweep config" : "scenario config");
      return 0;
    }

    if (sweep->parsed()) {
      if (!std::holds_alternative<SweepConfig>(cfg)) throw ConfigError("[sweep]: section missing");
      return run_sweep_cmd(std::get<SweepConfig>(cfg), jobs, parse_format(format), out_dir);
    }

    if (const auto* s = std::get_if<SweepConfig>(&cfg)) {
      return run_sweep_cmd(*s, jobs, parse_format(format), out_dir);
    }
    const ScenarioResult result = run_scenario(std::get<ScenarioConfig>(cfg));
    for (const auto& p : emit(result, parse_format(format), out_dir)) std::printf("wrote %s\n", p.string().c_str());
    report_scenario(result);
    return 0;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const NumericalInvariantError& e) {
    std::fprintf(stderr, "numerical invariant violated: %s\n", e.what());
    return kExitNumerical;
  } catch (const StiffnessError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitOther;
  }
}
