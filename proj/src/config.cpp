#include "qsync/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "qsync/errors.hpp"

#ifndef QSYNC_PRESET_DIR
#define QSYNC_PRESET_DIR "presets"
#endif

namespace qsync {
namespace {

namespace pt = boost::property_tree;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    std::string part = trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (!part.empty()) out.push_back(std::move(part));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_number(std::string_view text, const std::string& where) {
  const std::string s = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ConfigError(where + ": expected a number, got '" + s + "'");
  }
  return v;
}

int parse_int(std::string_view text, const std::string& where) {
  const std::string s = trim(text);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ConfigError(where + ": expected an integer, got '" + s + "'");
  }
  return v;
}

bool parse_bool(std::string_view text, const std::string& where) {
  const std::string s = trim(text);
  if (s == "true" || s == "yes" || s == "1") return true;
  if (s == "false" || s == "no" || s == "0") return false;
  throw ConfigError(where + ": expected true/false, got '" + s + "'");
}

Level parse_level(std::string_view text, const std::string& where) {
  const std::string s = trim(text);
  if (s == "+") return Level::Plus;
  if (s == "-") return Level::Minus;
  throw ConfigError(where + ": expected '+' or '-', got '" + s + "'");
}

char level_char(Level s) { return s == Level::Plus ? '+' : '-'; }

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_amplitude(Complex a) {
  if (a.imag() == 0.0) return num(a.real());
  return "(" + num(a.real()) + "," + num(a.imag()) + ")";
}

// Reads one section and rejects keys it does not know about.
class Section {
 public:
  Section(const pt::ptree& root, std::string name, bool required) : name_(std::move(name)) {
    if (auto child = root.get_child_optional(name_)) {
      node_ = &*child;
    } else if (required) {
      throw ConfigError("[" + name_ + "]: section missing");
    }
  }

  bool present() const { return node_ != nullptr; }

  std::optional<std::string> get(const std::string& key) {
    seen_.insert(key);
    if (!node_) return std::nullopt;
    if (auto v = node_->get_optional<std::string>(key)) return trim(*v);
    return std::nullopt;
  }

  std::string require(const std::string& key) {
    auto v = get(key);
    if (!v) throw ConfigError(where(key) + ": missing");
    return *v;
  }

  double number(const std::string& key, double fallback) {
    auto v = get(key);
    return v ? parse_number(*v, where(key)) : fallback;
  }

  int integer(const std::string& key, int fallback) {
    auto v = get(key);
    return v ? parse_int(*v, where(key)) : fallback;
  }

  bool boolean(const std::string& key, bool fallback) {
    auto v = get(key);
    return v ? parse_bool(*v, where(key)) : fallback;
  }

  std::string where(const std::string& key) const { return name_ + "." + key; }

  void reject_unknown() const {
    if (!node_) return;
    for (const auto& [key, value] : *node_) {
      if (!seen_.count(key)) throw ConfigError(where(key) + ": unknown key");
    }
  }

 private:
  std::string name_;
  const pt::ptree* node_ = nullptr;
  std::set<std::string> seen_;
};

pt::ptree read_tree(std::string_view text) {
  std::istringstream in{std::string(text)};
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("line " + std::to_string(e.line()) + ": " + e.message());
  }
  // read_ini drops sections without keys, but an empty [sweep] (all defaults)
  // still means "this is a sweep"; put them back.
  std::istringstream lines{std::string(text)};
  for (std::string line; std::getline(lines, line);) {
    line = trim(line);
    if (line.size() < 2 || line.front() != '[') continue;
    const std::string name = trim(line.substr(1, line.find(']') - 1));
    if (!tree.get_child_optional(name)) tree.add_child(name, pt::ptree{});
  }
  static const std::set<std::string> known{"scenario", "model", "initial_state", "time", "output", "sweep"};
  for (const auto& [key, value] : tree) {
    if (!known.count(key)) throw ConfigError("[" + key + "]: unknown section (or key outside a section)");
  }
  return tree;
}

std::vector<KetTerm> parse_terms(std::string_view text, const std::string& where) {
  std::vector<KetTerm> terms;
  for (const auto& part : split(text, ';')) {
    // "<amplitude> <ket>"; the ket starts at the last '|' or is a bare P/G.
    std::size_t ket_pos = part.rfind('|');
    if (ket_pos == std::string::npos) {
      ket_pos = part.find_last_of(" \t");
      if (ket_pos == std::string::npos) throw ConfigError(where + ": term '" + part + "' needs '<amplitude> <ket>'");
      ++ket_pos;
    }
    const std::string amp = trim(std::string_view(part).substr(0, ket_pos));
    const std::string ket = trim(std::string_view(part).substr(ket_pos));
    if (amp.empty()) throw ConfigError(where + ": term '" + part + "' has no amplitude");
    try {
      terms.push_back({parse_amplitude(amp), parse_ket(ket)});
    } catch (const ConfigError& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  if (terms.empty()) throw ConfigError(where + ": no terms");
  return terms;
}

std::string format_terms(const std::vector<KetTerm>& terms) {
  std::string out;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i) out += "; ";
    out += format_amplitude(terms[i].amplitude) + " " + format_ket(terms[i].ket);
  }
  return out;
}

ScenarioConfig read_scenario(const pt::ptree& tree) {
  ScenarioConfig cfg;

  Section scenario(tree, "scenario", false);
  if (auto v = scenario.get("name")) cfg.name = *v;
  if (auto v = scenario.get("description")) cfg.description = *v;
  scenario.reject_unknown();

  Section model(tree, "model", true);
  ModelParams& p = cfg.model;
  p.omega_A = model.number("omega_A", p.omega_A);
  p.omega_B = model.number("omega_B", p.omega_B);
  p.omega_r = model.number("omega_r", p.omega_r);
  p.kappa_A = model.number("kappa_A", p.kappa_A);
  p.kappa_B = model.number("kappa_B", p.kappa_B);
  if (auto v = model.get("kappa_AB"); v && *v != "auto") {
    cfg.tune_kappa_AB = false;
    p.kappa_AB = parse_number(*v, model.where("kappa_AB"));
  }
  p.gamma_diss_r = model.number("gamma_diss_r", p.gamma_diss_r);
  p.gamma_diss_A = model.number("gamma_diss_A", p.gamma_diss_A);
  p.gamma_diss_B = model.number("gamma_diss_B", p.gamma_diss_B);
  p.gamma_deph_A = model.number("gamma_deph_A", p.gamma_deph_A);
  p.gamma_deph_B = model.number("gamma_deph_B", p.gamma_deph_B);
  p.n_max = model.integer("n_max", p.n_max);
  if (auto v = model.get("mode")) {
    if (*v == "full") cfg.mode = DynamicsMode::Full;
    else if (*v == "pure_dephasing") cfg.mode = DynamicsMode::PureDephasing;
    else throw ConfigError(model.where("mode") + ": expected full or pure_dephasing, got '" + *v + "'");
  }
  model.reject_unknown();

  Section init(tree, "initial_state", true);
  const std::string kind = init.require("kind");
  if (kind == "fock") {
    FockState s;
    s.ket.n_phot = init.integer("n", 0);
    s.ket.s_A = parse_level(init.get("s_A").value_or("-"), init.where("s_A"));
    s.ket.s_B = parse_level(init.get("s_B").value_or("-"), init.where("s_B"));
    cfg.initial_state = s;
  } else if (kind == "coherent") {
    CoherentState s;
    s.alpha = parse_amplitude(init.require("alpha"));
    s.s_A = parse_level(init.get("s_A").value_or("-"), init.where("s_A"));
    s.s_B = parse_level(init.get("s_B").value_or("-"), init.where("s_B"));
    s.leakage_tol = init.number("leakage_tol", s.leakage_tol);
    cfg.initial_state = s;
  } else if (kind == "pg_superposition") {
    PGSuperposition s;
    s.weight_P = parse_amplitude(init.require("weight_P"));
    s.weight_G = parse_amplitude(init.require("weight_G"));
    cfg.initial_state = s;
  } else if (kind == "custom") {
    cfg.initial_state = CustomState{parse_terms(init.require("amplitudes"), init.where("amplitudes"))};
  } else if (kind == "mixed") {
    MixedState s;
    for (const auto& t : parse_terms(init.require("components"), init.where("components"))) {
      if (t.amplitude.imag() != 0.0) throw ConfigError(init.where("components") + ": weights must be real");
      s.components.push_back({t.amplitude.real(), t.ket});
    }
    cfg.initial_state = s;
  } else {
    throw ConfigError(init.where("kind") + ": unknown kind '" + kind +
                      "' (fock, coherent, pg_superposition, custom, mixed)");
  }
  init.reject_unknown();

  Section time(tree, "time", false);
  cfg.time.t_end = time.number("t_end", cfg.time.t_end);
  cfg.time.n_steps = time.integer("n_steps", cfg.time.n_steps);
  time.reject_unknown();

  Section output(tree, "output", false);
  if (auto v = output.get("populations")) {
    for (const auto& k : split(*v, ';')) {
      const KetRef ket = parse_ket(k);
      if (!std::holds_alternative<BasisIndex>(ket)) {
        throw ConfigError(output.where("populations") + ": only product kets |n,s,s> are allowed");
      }
      cfg.output.populations.push_back(std::get<BasisIndex>(ket));
    }
  }
  cfg.output.block_populations = output.boolean("block_populations", false);
  cfg.output.retain_states = output.boolean("retain_states", false);
  output.reject_unknown();

  return cfg;
}

SweepAxes read_axes(const pt::ptree& tree) {
  Section s(tree, "sweep", true);
  SweepAxes a;
  a.kappa_B_min = s.number("kappa_B_min", a.kappa_B_min);
  a.kappa_B_max = s.number("kappa_B_max", a.kappa_B_max);
  a.kappa_B_points = s.integer("kappa_B_points", a.kappa_B_points);
  a.log10_gamma_r_min = s.number("log10_gamma_r_min", a.log10_gamma_r_min);
  a.log10_gamma_r_max = s.number("log10_gamma_r_max", a.log10_gamma_r_max);
  a.log10_gamma_r_points = s.integer("log10_gamma_r_points", a.log10_gamma_r_points);
  a.singular_band = s.number("singular_band", a.singular_band);
  a.t_factor = s.number("t_factor", a.t_factor);
  a.n_steps = s.integer("n_steps", a.n_steps);
  s.reject_unknown();
  return a;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out(static_cast<std::size_t>(std::max(n, 0)));
  for (int k = 0; k < n; ++k) out[k] = n == 1 ? lo : lo + (hi - lo) * k / (n - 1);
  return out;
}

}  // namespace

KetRef parse_ket(std::string_view text) {
  const std::string s = trim(text);
  if (s == "P") return PairKet{PairKet::Which::P};
  if (s == "G") return PairKet{PairKet::Which::G};
  if (s.size() < 7 || s.front() != '|' || s.back() != '>') {
    throw ConfigError("bad ket '" + s + "' (expected P, G or |n,s,s>)");
  }
  const auto parts = split(std::string_view(s).substr(1, s.size() - 2), ',');
  if (parts.size() != 3) throw ConfigError("bad ket '" + s + "' (expected |n,s,s>)");
  BasisIndex b;
  b.n_phot = parse_int(parts[0], "ket '" + s + "'");
  b.s_A = parse_level(parts[1], "ket '" + s + "'");
  b.s_B = parse_level(parts[2], "ket '" + s + "'");
  if (b.n_phot < 0) throw ConfigError("ket '" + s + "': negative photon number");
  return b;
}

std::string format_ket(const KetRef& ket) {
  if (const auto* pg = std::get_if<PairKet>(&ket)) return pg->which == PairKet::Which::P ? "P" : "G";
  const auto& b = std::get<BasisIndex>(ket);
  return "|" + std::to_string(b.n_phot) + "," + level_char(b.s_A) + "," + level_char(b.s_B) + ">";
}

Complex parse_amplitude(std::string_view text) {
  std::string s = trim(text);
  double sign = 1.0;
  if (!s.empty() && s.front() == '-' && s.rfind("-sqrt(", 0) == 0) {
    sign = -1.0;
    s.erase(0, 1);
  }
  if (s.rfind("sqrt(", 0) == 0 && s.back() == ')') {
    const double x = parse_number(std::string_view(s).substr(5, s.size() - 6), "amplitude '" + s + "'");
    if (x < 0.0) throw ConfigError("amplitude '" + s + "': sqrt of a negative number");
    return sign * std::sqrt(x);
  }
  if (!s.empty() && s.front() == '(' && s.back() == ')') {
    const auto parts = split(std::string_view(s).substr(1, s.size() - 2), ',');
    if (parts.size() != 2) throw ConfigError("amplitude '" + s + "': expected (re,im)");
    return {parse_number(parts[0], "amplitude '" + s + "'"), parse_number(parts[1], "amplitude '" + s + "'")};
  }
  return parse_number(s, "amplitude");
}

ModelParams ScenarioConfig::resolved_params() const {
  if (!tune_kappa_AB) return model;
  return with_tuned_coupling(model);
}

void ScenarioConfig::validate() const {
  try {
    model.validate();
  } catch (const InvalidParamsError& e) {
    throw ConfigError(std::string("model.") + e.what());
  }
  if (tune_kappa_AB) {
    try {
      (void)tuned_kappa_AB(model);
    } catch (const SingularCouplingError& e) {
      throw ConfigError(std::string("model.kappa_AB: auto-tuning failed: ") + e.what());
    }
  }
  if (!(time.t_end > 0.0) || !std::isfinite(time.t_end)) throw ConfigError("time.t_end: must be > 0");
  if (time.n_steps < 1) throw ConfigError("time.n_steps: must be >= 1");

  const auto check_ket = [this](const KetRef& k, const std::string& where) {
    if (const auto* b = std::get_if<BasisIndex>(&k); b && b->n_phot > model.n_max) {
      throw ConfigError(where + ": ket " + format_ket(k) + " exceeds n_max=" + std::to_string(model.n_max));
    }
  };

  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FockState>) {
          check_ket(s.ket, "initial_state.n");
        } else if constexpr (std::is_same_v<T, CoherentState>) {
          if (!(s.leakage_tol > 0.0)) throw ConfigError("initial_state.leakage_tol: must be > 0");
        } else if constexpr (std::is_same_v<T, PGSuperposition>) {
          const double n = std::norm(s.weight_P) + std::norm(s.weight_G);
          if (std::abs(n - 1.0) > 1e-10) {
            throw ConfigError("initial_state.weight_P: |weight_P|^2 + |weight_G|^2 = " + num(n) + ", expected 1");
          }
        } else if constexpr (std::is_same_v<T, CustomState>) {
          for (const auto& t : s.terms) check_ket(t.ket, "initial_state.amplitudes");
        } else if constexpr (std::is_same_v<T, MixedState>) {
          double total = 0.0;
          for (const auto& c : s.components) {
            check_ket(c.ket, "initial_state.components");
            if (c.weight < 0.0) throw ConfigError("initial_state.components: negative weight");
            total += c.weight;
          }
          if (std::abs(total - 1.0) > 1e-10) {
            throw ConfigError("initial_state.components: weights sum to " + num(total) + ", expected 1");
          }
        }
      },
      initial_state);

  for (const auto& b : output.populations) check_ket(b, "output.populations");

  try {
    (void)initial_density(initial_state, model);
  } catch (const TruncationLeakageError& e) {
    throw ConfigError(std::string("initial_state.alpha: ") + e.what());
  }
}

std::vector<double> SweepAxes::kappa_B_grid() const { return linspace(kappa_B_min, kappa_B_max, kappa_B_points); }
std::vector<double> SweepAxes::log10_gamma_r_grid() const {
  return linspace(log10_gamma_r_min, log10_gamma_r_max, log10_gamma_r_points);
}

void SweepConfig::validate() const {
  // The base scenario's own time grid and kappa_B are replaced per point.
  ScenarioConfig probe = base;
  probe.model.kappa_B = 2.0 * probe.model.kappa_A;
  probe.model.gamma_diss_r = 1.0;
  probe.validate();
  if (axes.kappa_B_points < 1) throw ConfigError("sweep.kappa_B_points: must be >= 1");
  if (axes.log10_gamma_r_points < 1) throw ConfigError("sweep.log10_gamma_r_points: must be >= 1");
  if (!(axes.kappa_B_min >= 0.0)) throw ConfigError("sweep.kappa_B_min: must be >= 0");
  if (axes.kappa_B_max < axes.kappa_B_min) throw ConfigError("sweep.kappa_B_max: must be >= kappa_B_min");
  if (axes.log10_gamma_r_max < axes.log10_gamma_r_min) {
    throw ConfigError("sweep.log10_gamma_r_max: must be >= log10_gamma_r_min");
  }
  if (!(axes.singular_band >= 0.0)) throw ConfigError("sweep.singular_band: must be >= 0");
  if (!(axes.t_factor > 0.0)) throw ConfigError("sweep.t_factor: must be > 0");
  if (axes.n_steps < 1) throw ConfigError("sweep.n_steps: must be >= 1");
  if (!base.tune_kappa_AB) throw ConfigError("model.kappa_AB: sweeps require kappa_AB = auto");
}

ExperimentConfig parse_config(std::string_view text) {
  const pt::ptree tree = read_tree(text);
  ScenarioConfig scenario = read_scenario(tree);
  if (tree.get_child_optional("sweep")) return SweepConfig{std::move(scenario), read_axes(tree)};
  return scenario;
}

ScenarioConfig parse_scenario(std::string_view text) {
  auto cfg = parse_config(text);
  if (auto* s = std::get_if<ScenarioConfig>(&cfg)) return *s;
  throw ConfigError("[sweep]: expected a single-run config, got a sweep");
}

SweepConfig parse_sweep(std::string_view text) {
  auto cfg = parse_config(text);
  if (auto* s = std::get_if<SweepConfig>(&cfg)) return *s;
  throw ConfigError("[sweep]: section missing");
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open config");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    auto cfg = parse_config(buf.str());
    std::visit(
        [&](auto& c) {
          if constexpr (std::is_same_v<std::decay_t<decltype(c)>, ScenarioConfig>) {
            if (c.name == "scenario") c.name = path.stem().string();
          } else {
            if (c.base.name == "scenario") c.base.name = path.stem().string();
          }
        },
        cfg);
    return cfg;
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string serialize(const ScenarioConfig& c) {
  std::ostringstream os;
  os << "[scenario]\n";
  os << "name = " << c.name << "\n";
  if (!c.description.empty()) os << "description = " << c.description << "\n";

  const ModelParams& p = c.model;
  os << "\n[model]\n";
  os << "omega_A = " << num(p.omega_A) << "\n";
  os << "omega_B = " << num(p.omega_B) << "\n";
  os << "omega_r = " << num(p.omega_r) << "\n";
  os << "kappa_A = " << num(p.kappa_A) << "\n";
  os << "kappa_B = " << num(p.kappa_B) << "\n";
  os << "kappa_AB = " << (c.tune_kappa_AB ? std::string("auto") : num(p.kappa_AB)) << "\n";
  os << "gamma_diss_r = " << num(p.gamma_diss_r) << "\n";
  os << "gamma_diss_A = " << num(p.gamma_diss_A) << "\n";
  os << "gamma_diss_B = " << num(p.gamma_diss_B) << "\n";
  os << "gamma_deph_A = " << num(p.gamma_deph_A) << "\n";
  os << "gamma_deph_B = " << num(p.gamma_deph_B) << "\n";
  os << "n_max = " << p.n_max << "\n";
  os << "mode = " << (c.mode == DynamicsMode::Full ? "full" : "pure_dephasing") << "\n";

  os << "\n[initial_state]\n";
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FockState>) {
          os << "kind = fock\nn = " << s.ket.n_phot << "\ns_A = " << level_char(s.ket.s_A)
             << "\ns_B = " << level_char(s.ket.s_B) << "\n";
        } else if constexpr (std::is_same_v<T, CoherentState>) {
          os << "kind = coherent\nalpha = " << format_amplitude(s.alpha) << "\ns_A = " << level_char(s.s_A)
             << "\ns_B = " << level_char(s.s_B) << "\nleakage_tol = " << num(s.leakage_tol) << "\n";
        } else if constexpr (std::is_same_v<T, PGSuperposition>) {
          os << "kind = pg_superposition\nweight_P = " << format_amplitude(s.weight_P)
             << "\nweight_G = " << format_amplitude(s.weight_G) << "\n";
        } else if constexpr (std::is_same_v<T, CustomState>) {
          os << "kind = custom\namplitudes = " << format_terms(s.terms) << "\n";
        } else {
          std::vector<KetTerm> terms;
          for (const auto& comp : s.components) terms.push_back({comp.weight, comp.ket});
          os << "kind = mixed\ncomponents = " << format_terms(terms) << "\n";
        }
      },
      c.initial_state);

  os << "\n[time]\n";
  os << "t_end = " << num(c.time.t_end) << "\n";
  os << "n_steps = " << c.time.n_steps << "\n";

  os << "\n[output]\n";
  if (!c.output.populations.empty()) {
    os << "populations = ";
    for (std::size_t i = 0; i < c.output.populations.size(); ++i) {
      os << (i ? "; " : "") << format_ket(c.output.populations[i]);
    }
    os << "\n";
  }
  os << "block_populations = " << (c.output.block_populations ? "true" : "false") << "\n";
  os << "retain_states = " << (c.output.retain_states ? "true" : "false") << "\n";
  return os.str();
}

std::string serialize(const SweepConfig& c) {
  std::ostringstream os;
  os << serialize(c.base);
  const SweepAxes& a = c.axes;
  os << "\n[sweep]\n";
  os << "kappa_B_min = " << num(a.kappa_B_min) << "\n";
  os << "kappa_B_max = " << num(a.kappa_B_max) << "\n";
  os << "kappa_B_points = " << a.kappa_B_points << "\n";
  os << "log10_gamma_r_min = " << num(a.log10_gamma_r_min) << "\n";
  os << "log10_gamma_r_max = " << num(a.log10_gamma_r_max) << "\n";
  os << "log10_gamma_r_points = " << a.log10_gamma_r_points << "\n";
  os << "singular_band = " << num(a.singular_band) << "\n";
  os << "t_factor = " << num(a.t_factor) << "\n";
  os << "n_steps = " << a.n_steps << "\n";
  return os.str();
}

std::string serialize(const ExperimentConfig& config) {
  return std::visit([](const auto& c) { return serialize(c); }, config);
}

StateVector ket_vector(const KetRef& ket, const ModelParams& params) {
  const Space space = build_space(params.n_max);
  if (const auto* pg = std::get_if<PairKet>(&ket)) {
    return pg->which == PairKet::Which::P ? protected_state(params)
                                          : space.ket({0, Level::Minus, Level::Minus});
  }
  return space.ket(std::get<BasisIndex>(ket));
}

DensityMatrix initial_density(const InitialState& state, const ModelParams& params) {
  const Space space = build_space(params.n_max);
  const auto pure = [](const StateVector& psi, const std::string& where) {
    const double norm2 = psi.squaredNorm();
    if (std::abs(norm2 - 1.0) > 1e-10) {
      throw ConfigError(where + ": state has squared norm " + num(norm2) + ", expected 1");
    }
    return projector(psi);
  };
  return std::visit(
      [&](const auto& s) -> DensityMatrix {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FockState>) {
          return projector(space.ket(s.ket));
        } else if constexpr (std::is_same_v<T, CoherentState>) {
          return projector(coherent_state(space, s.alpha, s.s_A, s.s_B, s.leakage_tol));
        } else if constexpr (std::is_same_v<T, PGSuperposition>) {
          const StateVector psi = s.weight_P * ket_vector(PairKet{PairKet::Which::P}, params) +
                                  s.weight_G * ket_vector(PairKet{PairKet::Which::G}, params);
          return pure(psi, "initial_state.weight_P");
        } else if constexpr (std::is_same_v<T, CustomState>) {
          StateVector psi = StateVector::Zero(space.dim());
          for (const auto& t : s.terms) psi += t.amplitude * ket_vector(t.ket, params);
          return pure(psi, "initial_state.amplitudes");
        } else {
          DensityMatrix rho = DensityMatrix::Zero(space.dim(), space.dim());
          for (const auto& c : s.components) rho += c.weight * projector(ket_vector(c.ket, params));
          return rho;
        }
      },
      state);
}

std::filesystem::path preset_dir() {
  if (const char* env = std::getenv("QSYNC_PRESET_DIR"); env && *env) return env;
  return QSYNC_PRESET_DIR;
}

std::vector<std::string> list_presets() {
  std::vector<std::string> names;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(preset_dir(), ec)) {
    if (entry.path().extension() == ".ini") names.push_back(entry.path().stem().string());
  }
  std::sort(names.begin(), names.end());
  return names;
}

std::filesystem::path resolve_config(const std::string& name_or_path) {
  const std::filesystem::path direct(name_or_path);
  if (std::filesystem::is_regular_file(direct)) return direct;
  const auto preset = preset_dir() / (name_or_path + ".ini");
  if (std::filesystem::is_regular_file(preset)) return preset;
  throw ConfigError("'" + name_or_path + "' is neither a config file nor a preset (see `presets`)");
}

}  // namespace qsync
