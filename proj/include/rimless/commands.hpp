#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "rimless/config.hpp"

namespace rimless::cli {

enum ExitCode : int { ok = 0, failure = 1, config = 2, numeric = 3, rank_deficient = 4 };

/// Command-line overrides shared by the commands. Unset fields keep the
/// config-file (or built-in) value.
struct Overrides {
  std::optional<double> t_max;
  std::optional<double> dt;
  std::optional<int> sample_stride;
  std::optional<int> trials;
  std::optional<double> k_min, k_max, b_min, b_max;
  std::optional<int> nk, nb;
  std::optional<double> mass, length, gravity;
};

struct SimulateOptions {
  std::optional<std::filesystem::path> config;
  std::filesystem::path out;
  Overrides overrides;
  bool strict = false;
};

struct SweepOptions {
  std::optional<std::filesystem::path> config;
  std::filesystem::path out;
  Overrides overrides;
  int workers = 0;
};

struct FitOptions {
  std::filesystem::path in;
  std::optional<std::filesystem::path> out;
};

struct ReportOptions {
  std::filesystem::path in;
  std::optional<std::filesystem::path> config;
  std::optional<std::filesystem::path> out;
  Overrides overrides;
};

/// Config file (or defaults) with overrides applied and validated.
ScenarioConfig resolve_config(const std::optional<std::filesystem::path>& path,
                              const Overrides& overrides);

/// Each command reports progress on `log` and errors on `err`, and returns
/// the process exit code.
int run_simulate(const SimulateOptions& opts, std::ostream& log, std::ostream& err);
int run_sweep(const SweepOptions& opts, std::ostream& log, std::ostream& err);
int run_fit(const FitOptions& opts, std::ostream& log, std::ostream& err);
int run_report(const ReportOptions& opts, std::ostream& log, std::ostream& err);

}  // namespace rimless::cli
