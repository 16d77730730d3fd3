#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "rimless/integrator.hpp"
#include "rimless/model.hpp"
#include "rimless/sweep.hpp"

namespace rimless {

/// Sweep extent and trial count.
struct SweepSettings {
  double k_min = 1e-4;
  double k_max = 1e-2;
  int nk = 20;
  double b_min = 1e-1;
  double b_max = 1e1;
  int nb = 20;
  int trials = 8;
  double tol_deg = 1.0;
};

/// Explicit initial state. Unset angles default to a just-stepped wheel 1
/// and an upright wheel 2; unset rates to the single-wheel limit-cycle rate.
struct InitialSettings {
  int trials = 1;  ///< > 1 selects the default seed set
  std::optional<double> theta1;
  std::optional<double> theta2;
  std::optional<double> dtheta1;
  std::optional<double> dtheta2;
  std::optional<double> phase_pct;  ///< overrides theta2/rates via phase_lag_state
};

/// A scenario read from an INI-style file with sections [physical] or
/// [nondimensional] (exactly one), and optional [integrator], [initial],
/// [sweep]. Angles are given in degrees.
struct ScenarioConfig {
  std::optional<PhysicalParams> physical;
  NondimParams nondim;
  IntegratorConfig integrator;
  InitialSettings initial;
  SweepSettings sweep;

  /// Re-derives `nondim` from `physical` when the latter is the source.
  void refresh();
  void validate() const;
};

/// Throws ConfigError on unreadable input, unknown keys, bad values or a
/// missing/duplicated parameter section.
ScenarioConfig parse_config(std::istream& in);
ScenarioConfig load_config(const std::filesystem::path& path);

HybridState initial_state(const ScenarioConfig& cfg);
InitialConditionSet initial_conditions(const ScenarioConfig& cfg);

}  // namespace rimless
