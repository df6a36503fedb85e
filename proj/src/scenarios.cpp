#include "qsync/scenarios.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "qsync/errors.hpp"

namespace qsync {

ProtectedPair scenario_pair(const ModelParams& params) {
  try {
    return protected_pair(params);
  } catch (const SingularCouplingError& e) {
    throw ConfigError(std::string("model.kappa_B: P/G diagnostics undefined: ") + e.what());
  }
}

ScenarioResult run_scenario(const ScenarioConfig& config) {
  config.validate();

  ScenarioResult result;
  result.config = config;
  result.params = config.resolved_params();
  result.pair = scenario_pair(result.params);

  const MasterEquation eq = master_equation(result.params, config.mode);
  const Liouvillian l = build_liouvillian(eq);
  const DensityMatrix rho0 = initial_density(config.initial_state, result.params);
  const ObservableEvaluator evaluate(result.params, result.pair);

  std::vector<Index> pop_index;
  for (const auto& b : config.output.populations) pop_index.push_back(eq.space.flat(b));

  PropagateOptions options;
  options.retain_states = config.output.retain_states;
  result.records.reserve(config.time.points());
  result.trajectory = propagate_expm(l, rho0, config.time, options, [&](double t, const DensityMatrix& rho) {
    result.records.push_back(evaluate(t, rho));
    result.clipped_eigenvalues += result.records.back().clipped_eigenvalues;
    if (!pop_index.empty()) {
      std::vector<double> row;
      row.reserve(pop_index.size());
      for (Index i : pop_index) row.push_back(rho(i, i).real());
      result.populations.push_back(std::move(row));
    }
  });
  return result;
}

std::size_t SweepGrid::gap_count() const {
  std::size_t n = 0;
  for (const auto& v : coh_PG) n += !v.has_value();
  return n;
}

bool in_singular_band(const SweepAxes& axes, double ratio) {
  return std::abs(ratio - 1.0) < axes.singular_band;
}

ScenarioConfig sweep_point_config(const SweepConfig& sweep, std::size_t i_kappa, std::size_t j_gamma) {
  const double ratio = sweep.axes.kappa_B_grid().at(i_kappa);
  const double gamma_r = std::pow(10.0, sweep.axes.log10_gamma_r_grid().at(j_gamma));
  ScenarioConfig point = sweep.base;
  point.model.kappa_B = ratio * point.model.kappa_A;
  point.model.gamma_diss_r = gamma_r * point.model.kappa_A;
  point.tune_kappa_AB = true;
  point.time = TimeGrid{sweep.axes.t_factor / gamma_r, sweep.axes.n_steps};
  point.output = OutputSelection{};
  return point;
}

namespace {

double evaluate_point(const ScenarioConfig& point) {
  const ModelParams params = point.resolved_params();
  const ProtectedPair pair = protected_pair(params);
  const Liouvillian l = build_liouvillian(master_equation(params, point.mode));
  const DensityMatrix rho0 = initial_density(point.initial_state, params);
  const Trajectory traj = propagate_expm(l, rho0, point.time);
  return pg_diagnostics(traj.final_state, pair).coh_PG;
}

}  // namespace

SweepGrid run_sweep(const SweepConfig& sweep, int jobs) {
  sweep.validate();
  SweepGrid grid;
  grid.kappa_B_over_kA = sweep.axes.kappa_B_grid();
  grid.log10_gamma_r = sweep.axes.log10_gamma_r_grid();
  const std::size_t n_gamma = grid.log10_gamma_r.size();
  const std::size_t total = grid.kappa_B_over_kA.size() * n_gamma;
  grid.coh_PG.assign(total, std::nullopt);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::atomic<bool> stop{false};

  auto worker = [&] {
    while (!stop.load()) {
      const std::size_t k = next.fetch_add(1);
      if (k >= total) return;
      const std::size_t i = k / n_gamma;
      const std::size_t j = k % n_gamma;
      if (in_singular_band(sweep.axes, grid.kappa_B_over_kA[i])) continue;
      try {
        grid.coh_PG[k] = evaluate_point(sweep_point_config(sweep, i, j));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        stop = true;
      }
    }
  };

  const int workers = std::max(1, jobs);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return grid;
}

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string trajectory_csv(const std::vector<ObservableRecord>& records) {
  std::string out = std::string(kTrajectoryHeader) + "\n";
  for (const auto& r : records) {
    for (double v : {r.t, r.sx_A, r.sx_B, r.pop_P, r.pop_G, r.coh_PG, r.purity}) {
      out += format_value(v);
      out += ',';
    }
    out += format_value(r.vn_entropy);
    out += '\n';
  }
  return out;
}

std::string population_label(const BasisIndex& b) {
  const auto c = [](Level s) { return s == Level::Plus ? '+' : '-'; };
  return "pop_" + std::to_string(b.n_phot) + c(b.s_A) + c(b.s_B);
}

std::string populations_csv(const ScenarioResult& result) {
  std::string out = "t";
  for (const auto& b : result.config.output.populations) out += "," + population_label(b);
  out += '\n';
  for (std::size_t k = 0; k < result.populations.size(); ++k) {
    out += format_value(result.records[k].t);
    for (double v : result.populations[k]) out += "," + format_value(v);
    out += '\n';
  }
  return out;
}

std::string blocks_csv(const ScenarioResult& result) {
  std::string out = "t";
  if (!result.records.empty()) {
    for (const auto& [n, p] : result.records.front().block_populations) out += ",N" + std::to_string(n);
  }
  out += '\n';
  for (const auto& r : result.records) {
    out += format_value(r.t);
    for (const auto& [n, p] : r.block_populations) out += "," + format_value(p);
    out += '\n';
  }
  return out;
}

std::string sweep_csv(const SweepGrid& grid) {
  std::string out = std::string(kSweepHeader) + "\n";
  for (std::size_t i = 0; i < grid.kappa_B_over_kA.size(); ++i) {
    for (std::size_t j = 0; j < grid.log10_gamma_r.size(); ++j) {
      const auto& v = grid.at(i, j);
      out += format_value(grid.kappa_B_over_kA[i]) + "," + format_value(grid.log10_gamma_r[j]) + "," +
             (v ? format_value(*v) : std::string("nan")) + "\n";
    }
  }
  return out;
}

namespace {

using nlohmann::ordered_json;

ordered_json metadata(const std::string& config_text) {
  ordered_json meta;
  meta["tool"] = kToolName;
  meta["version"] = kToolVersion;
  meta["config"] = config_text;
  return meta;
}

// Numbers go through the same %.12g formatting as the CSV so the two agree.
ordered_json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return ordered_json::parse(format_value(v));
}

}  // namespace

std::string trajectory_json(const ScenarioResult& result) {
  ordered_json doc;
  doc["metadata"] = metadata(serialize(result.config));
  doc["metadata"]["kappa_AB"] = number(result.params.kappa_AB);
  doc["metadata"]["transition_frequency"] = number(result.pair.transition_frequency());
  doc["metadata"]["clipped_eigenvalues"] = result.clipped_eigenvalues;
  doc["columns"] = {"t", "sx_A", "sx_B", "pop_P", "pop_G", "coh_PG", "purity", "vn_entropy"};
  ordered_json rows = ordered_json::array();
  for (const auto& r : result.records) {
    rows.push_back({number(r.t), number(r.sx_A), number(r.sx_B), number(r.pop_P), number(r.pop_G),
                    number(r.coh_PG), number(r.purity), number(r.vn_entropy)});
  }
  doc["rows"] = std::move(rows);
  return doc.dump(1) + "\n";
}

std::string sweep_json(const SweepGrid& grid, const SweepConfig& config) {
  ordered_json doc;
  doc["metadata"] = metadata(serialize(config));
  doc["metadata"]["observable"] = "coh_PG at t = t_factor / gamma_r";
  doc["metadata"]["gamma_r_range_note"] =
      "log10(gamma_r/kappa_A) range is a free choice of this tool (lower bound " +
      format_value(config.axes.log10_gamma_r_min) + ")";
  doc["metadata"]["gaps"] = grid.gap_count();
  doc["columns"] = {"kappa_B_over_kA", "log10_gamma_r", "coh_PG"};
  ordered_json rows = ordered_json::array();
  for (std::size_t i = 0; i < grid.kappa_B_over_kA.size(); ++i) {
    for (std::size_t j = 0; j < grid.log10_gamma_r.size(); ++j) {
      const auto& v = grid.at(i, j);
      rows.push_back({number(grid.kappa_B_over_kA[i]), number(grid.log10_gamma_r[j]),
                      v ? number(*v) : ordered_json(nullptr)});
    }
  }
  doc["rows"] = std::move(rows);
  return doc.dump(1) + "\n";
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError(path.string() + ": write failed");
}

std::vector<std::filesystem::path> emit(const ScenarioResult& result, OutputFormat format,
                                        const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> written;
  const std::string& name = result.config.name;
  if (format == OutputFormat::Csv) {
    written.push_back(dir / (name + ".csv"));
    write_file(written.back(), trajectory_csv(result.records));
  } else {
    written.push_back(dir / (name + ".json"));
    write_file(written.back(), trajectory_json(result));
  }
  if (!result.config.output.populations.empty()) {
    written.push_back(dir / (name + "_populations.csv"));
    write_file(written.back(), populations_csv(result));
  }
  if (result.config.output.block_populations) {
    written.push_back(dir / (name + "_blocks.csv"));
    write_file(written.back(), blocks_csv(result));
  }
  return written;
}

std::vector<std::filesystem::path> emit(const SweepGrid& grid, const SweepConfig& config, OutputFormat format,
                                        const std::filesystem::path& dir) {
  const std::string& name = config.base.name;
  const auto path = dir / (name + (format == OutputFormat::Csv ? ".csv" : ".json"));
  write_file(path, format == OutputFormat::Csv ? sweep_csv(grid) : sweep_json(grid, config));
  return {path};
}

}  // namespace qsync
