#include "rimless/config.hpp"

#include <fstream>
#include <iterator>
#include <set>
#include <sstream>
#include <string>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "rimless/errors.hpp"

namespace rimless {

namespace pt = boost::property_tree;

namespace {

using Keys = std::set<std::string>;

const Keys kPhysicalKeys{"mass", "length", "gravity", "gamma_deg", "alpha_deg", "k", "b", "D0", "S0"};
const Keys kNondimKeys{"gamma_deg", "alpha_deg", "k_hat", "b_hat", "D0_hat", "S0_hat"};
const Keys kIntegratorKeys{"dt", "event_tol", "t_max", "max_events", "min_flow_time",
                           "sample_stride"};
const Keys kInitialKeys{"trials", "theta1_deg", "theta2_deg", "dtheta1", "dtheta2", "phase_pct"};
const Keys kSweepKeys{"k_min", "k_max", "nk", "b_min", "b_max", "nb", "trials", "tol_deg"};

void check_keys(const pt::ptree& section, const std::string& name, const Keys& allowed) {
  for (const auto& [key, value] : section) {
    if (!allowed.contains(key)) throw ConfigError("unknown key '" + key + "' in [" + name + "]");
  }
}

template <class T>
void read(const pt::ptree& section, const std::string& key, T& target) {
  const auto raw = section.get_optional<std::string>(key);
  if (!raw) return;
  const auto v = section.get_optional<T>(key);
  if (!v) throw ConfigError("invalid value '" + *raw + "' for key '" + key + "'");
  target = *v;
}

template <class T>
void read(const pt::ptree& section, const std::string& key, std::optional<T>& target) {
  T v{};
  if (!section.get_optional<std::string>(key)) return;
  read(section, key, v);
  target = v;
}

void read_angle(const pt::ptree& section, const std::string& key, double& radians) {
  double degrees = to_deg(radians);
  read(section, key, degrees);
  radians = deg(degrees);
}

}  // namespace

void ScenarioConfig::refresh() {
  if (physical) nondim = nondimensionalize(*physical);
}

void ScenarioConfig::validate() const {
  try {
    if (physical) physical->validate();
    nondim.validate();
    integrator.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (initial.trials < 1) throw ConfigError("[initial] trials must be at least 1");
  if (initial.trials > 1 && initial.trials < 4) {
    throw ConfigError("[initial] trials must be 1 or at least 4");
  }
  if (sweep.trials < 4) throw ConfigError("[sweep] trials must be at least 4");
  if (sweep.nk < 1 || sweep.nb < 1) throw ConfigError("[sweep] nk and nb must be at least 1");
  if (!(sweep.k_min > 0.0 && sweep.k_max >= sweep.k_min && sweep.b_min > 0.0 &&
        sweep.b_max >= sweep.b_min)) {
    throw ConfigError("[sweep] ranges must be positive and ordered");
  }
  if ((sweep.nk == 1 && sweep.k_min != sweep.k_max) || (sweep.nb == 1 && sweep.b_min != sweep.b_max)) {
    throw ConfigError("[sweep] a single-point axis needs equal min and max");
  }
  if (!(sweep.tol_deg > 0.0)) throw ConfigError("[sweep] tol_deg must be positive");
  if (initial.phase_pct && !(*initial.phase_pct >= 0.0 && *initial.phase_pct < 100.0)) {
    throw ConfigError("[initial] phase_pct must lie in [0, 100)");
  }
}

ScenarioConfig parse_config(std::istream& in) {
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  pt::ptree tree;
  try {
    std::istringstream body(text);
    pt::read_ini(body, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  // read_ini drops sections without keys; an empty section still selects defaults.
  std::istringstream lines(text);
  for (std::string line; std::getline(lines, line);) {
    const auto open = line.find_first_not_of(" \t");
    const auto close = line.find_last_not_of(" \t\r");
    if (open == std::string::npos || line[open] != '[' || line[close] != ']') continue;
    const std::string name = line.substr(open + 1, close - open - 1);
    if (!tree.get_child_optional(pt::ptree::path_type(name, '\0'))) {
      tree.push_back({name, pt::ptree{}});
    }
  }

  const Keys sections{"physical", "nondimensional", "integrator", "initial", "sweep"};
  for (const auto& [name, section] : tree) {
    if (section.empty() && !section.data().empty()) {
      throw ConfigError("key '" + name + "' must belong to a section");
    }
    if (!sections.contains(name)) throw ConfigError("unknown section [" + name + "]");
  }

  const auto physical = tree.get_child_optional("physical");
  const auto nondim = tree.get_child_optional("nondimensional");
  if (static_cast<bool>(physical) == static_cast<bool>(nondim)) {
    throw ConfigError("exactly one of [physical] or [nondimensional] is required");
  }

  ScenarioConfig cfg;
  if (physical) {
    check_keys(*physical, "physical", kPhysicalKeys);
    PhysicalParams p;
    read(*physical, "mass", p.m);
    read(*physical, "length", p.ell);
    read(*physical, "gravity", p.g);
    read_angle(*physical, "gamma_deg", p.gamma);
    read_angle(*physical, "alpha_deg", p.alpha);
    read(*physical, "k", p.k);
    read(*physical, "b", p.b);
    p.D0 = 0.5 * p.ell;
    p.S0 = 0.5 * p.ell;
    read(*physical, "D0", p.D0);
    read(*physical, "S0", p.S0);
    cfg.physical = p;
  } else {
    check_keys(*nondim, "nondimensional", kNondimKeys);
    NondimParams& np = cfg.nondim;
    read_angle(*nondim, "gamma_deg", np.gamma);
    read_angle(*nondim, "alpha_deg", np.alpha);
    read(*nondim, "k_hat", np.k_hat);
    read(*nondim, "b_hat", np.b_hat);
    read(*nondim, "D0_hat", np.D0_hat);
    read(*nondim, "S0_hat", np.S0_hat);
  }

  if (const auto s = tree.get_child_optional("integrator")) {
    check_keys(*s, "integrator", kIntegratorKeys);
    IntegratorConfig& ic = cfg.integrator;
    read(*s, "dt", ic.dt);
    read(*s, "event_tol", ic.event_tol);
    read(*s, "t_max", ic.t_max);
    read(*s, "max_events", ic.max_events);
    read(*s, "min_flow_time", ic.min_flow_time);
    read(*s, "sample_stride", ic.sample_stride);
  }
  if (const auto s = tree.get_child_optional("initial")) {
    check_keys(*s, "initial", kInitialKeys);
    InitialSettings& is = cfg.initial;
    read(*s, "trials", is.trials);
    std::optional<double> t1, t2;
    read(*s, "theta1_deg", t1);
    read(*s, "theta2_deg", t2);
    if (t1) is.theta1 = deg(*t1);
    if (t2) is.theta2 = deg(*t2);
    read(*s, "dtheta1", is.dtheta1);
    read(*s, "dtheta2", is.dtheta2);
    read(*s, "phase_pct", is.phase_pct);
  }
  if (const auto s = tree.get_child_optional("sweep")) {
    check_keys(*s, "sweep", kSweepKeys);
    SweepSettings& ss = cfg.sweep;
    read(*s, "k_min", ss.k_min);
    read(*s, "k_max", ss.k_max);
    read(*s, "nk", ss.nk);
    read(*s, "b_min", ss.b_min);
    read(*s, "b_max", ss.b_max);
    read(*s, "nb", ss.nb);
    read(*s, "trials", ss.trials);
    read(*s, "tol_deg", ss.tol_deg);
  }

  try {
    cfg.refresh();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  return parse_config(in);
}

HybridState initial_state(const ScenarioConfig& cfg) {
  const NondimParams& p = cfg.nondim;
  HybridState s;
  try {
    s = cfg.initial.phase_pct ? phase_lag_state(p, *cfg.initial.phase_pct, cfg.integrator.dt)
                              : seed_state(p, 0.0);
  } catch (const std::domain_error& e) {
    throw ConfigError(e.what());
  }
  if (cfg.initial.theta1) s.theta1 = *cfg.initial.theta1;
  if (cfg.initial.theta2 && !cfg.initial.phase_pct) s.theta2 = *cfg.initial.theta2;
  if (cfg.initial.dtheta1) s.dtheta1 = *cfg.initial.dtheta1;
  if (cfg.initial.dtheta2) s.dtheta2 = *cfg.initial.dtheta2;
  return with_geometric_length(s, p);
}

InitialConditionSet initial_conditions(const ScenarioConfig& cfg) {
  if (cfg.initial.trials == 1) return {initial_state(cfg)};
  try {
    return default_initial_conditions(cfg.nondim, cfg.initial.trials);
  } catch (const std::domain_error& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace rimless
