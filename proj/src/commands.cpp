#include "rimless/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "rimless/errors.hpp"
#include "rimless/io.hpp"
#include "rimless/poincare.hpp"
#include "rimless/sweep.hpp"

namespace rimless::cli {

namespace fs = std::filesystem;

namespace {

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

std::optional<Dimensions> report_dimensions(const ScenarioConfig& cfg, const Overrides& o) {
  if (!cfg.physical && !o.mass && !o.length && !o.gravity) return std::nullopt;
  Dimensions d;
  if (cfg.physical) d = {cfg.physical->m, cfg.physical->ell, cfg.physical->g};
  if (o.mass) d.mass = *o.mass;
  if (o.length) d.length = *o.length;
  if (o.gravity) d.gravity = *o.gravity;
  if (!(d.mass > 0.0 && d.length > 0.0 && d.gravity > 0.0)) {
    throw ConfigError("--mass, --length and --gravity must be positive");
  }
  return d;
}

std::string trial_suffix(std::size_t i, std::size_t n) {
  if (n == 1) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "_%03zu", i);
  return buf;
}

template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return config;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return numeric;
  } catch (const DegenerateGeometry& e) {
    err << "numeric error: " << e.what() << '\n';
    return numeric;
  } catch (const RankDeficient& e) {
    err << "rank deficient: " << e.what() << '\n';
    return rank_deficient;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return failure;
  }
}

}  // namespace

ScenarioConfig resolve_config(const std::optional<fs::path>& path, const Overrides& o) {
  ScenarioConfig cfg = path ? load_config(*path) : ScenarioConfig{};
  if (o.t_max) cfg.integrator.t_max = *o.t_max;
  if (o.dt) cfg.integrator.dt = *o.dt;
  if (o.sample_stride) cfg.integrator.sample_stride = *o.sample_stride;
  if (o.trials) {
    cfg.initial.trials = *o.trials;
    cfg.sweep.trials = std::max(*o.trials, 4);
  }
  if (o.k_min) cfg.sweep.k_min = *o.k_min;
  if (o.k_max) cfg.sweep.k_max = *o.k_max;
  if (o.nk) cfg.sweep.nk = *o.nk;
  if (o.b_min) cfg.sweep.b_min = *o.b_min;
  if (o.b_max) cfg.sweep.b_max = *o.b_max;
  if (o.nb) cfg.sweep.nb = *o.nb;
  if (cfg.physical) {
    if (o.mass) cfg.physical->m = *o.mass;
    if (o.length) cfg.physical->ell = *o.length;
    if (o.gravity) cfg.physical->g = *o.gravity;
    try {
      cfg.refresh();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  cfg.validate();
  return cfg;
}

int run_simulate(const SimulateOptions& opts, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    const ScenarioConfig cfg = resolve_config(opts.config, opts.overrides);
    const InitialConditionSet ics = initial_conditions(cfg);

    std::vector<Trajectory> runs;
    for (const auto& x0 : ics) runs.push_back(simulate(x0, cfg.nondim, cfg.integrator));

    fs::create_directories(opts.out);
    int failed = 0;
    for (std::size_t i = 0; i < runs.size(); ++i) {
      const std::string suffix = trial_suffix(i, runs.size());
      const Trajectory& traj = runs[i];
      auto traj_out = open_output(opts.out / ("trajectory" + suffix + ".csv"));
      write_trajectory_csv(traj_out, traj);
      auto events_out = open_output(opts.out / ("events" + suffix + ".csv"));
      write_events_csv(events_out, traj);
      auto phase_out = open_output(opts.out / ("phase" + suffix + ".csv"));
      write_phase_csv(phase_out, phase_metrics(traj, cfg.nondim));
      if (traj.failed()) ++failed;
      log << "trial " << i << ": " << traj.impact_count(Wheel::first) << " wheel-1 steps, "
          << traj.impact_count(Wheel::second) << " wheel-2 steps, ended by "
          << to_string(traj.termination()) << '\n';
    }
    if (opts.strict && failed > 0) {
      err << failed << " trial(s) ended in a failure event\n";
      return static_cast<int>(numeric);
    }
    return static_cast<int>(ok);
  });
}

int run_sweep(const SweepOptions& opts, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    const ScenarioConfig cfg = resolve_config(opts.config, opts.overrides);
    const std::optional<Dimensions> dims = report_dimensions(cfg, opts.overrides);
    const SweepSettings& s = cfg.sweep;
    const SweepGrid grid =
        SweepGrid::log_spaced(cfg.nondim, s.k_min, s.k_max, s.nk, s.b_min, s.b_max, s.nb);
    const InitialConditionSet ics = default_initial_conditions(cfg.nondim, s.trials);

    const auto cells = rimless::run_sweep(grid, ics, cfg.integrator, opts.workers, s.tol_deg);

    fs::create_directories(opts.out);
    auto csv = open_output(opts.out / "sweep.csv");
    write_sweep_csv(csv, cells);
    const auto n_valid = std::count_if(cells.begin(), cells.end(), [](const auto& c) { return c.valid; });
    log << cells.size() << " cells, " << n_valid << " valid\n";
    try {
      const SweepCell& best = select_best(cells);
      auto report = open_output(opts.out / "best.json");
      report << best_cell_report(best, cfg.nondim, dims).dump(2) << '\n';
      log << "best: k_hat=" << format_double(best.k_hat) << " b_hat=" << format_double(best.b_hat)
          << " dominant_abs=" << format_double(*best.dominant_abs) << '\n';
    } catch (const NoValidCell&) {
      log << "no valid cell; best.json not written\n";
    }
    return static_cast<int>(ok);
  });
}

int run_fit(const FitOptions& opts, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    if (!fs::is_directory(opts.in)) throw ConfigError("'" + opts.in.string() + "' is not a directory");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(opts.in)) {
      const std::string name = entry.path().filename().string();
      if (name.starts_with("trajectory") && entry.path().extension() == ".csv") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw ConfigError("no trajectory*.csv files in '" + opts.in.string() + "'");

    std::vector<SectionTrial> trials;
    for (const auto& path : files) {
      const std::string name = path.filename().string();
      const fs::path events = path.parent_path() / ("events" + name.substr(std::string("trajectory").size()));
      std::ifstream traj_in(path), events_in(events);
      if (!traj_in || !events_in) throw ConfigError("cannot read '" + path.string() + "' and its events file");
      const Trajectory traj = read_trajectory(traj_in, events_in);
      if (traj.failed()) {
        log << "skipping failed trial " << name << '\n';
        continue;
      }
      trials.push_back(section_samples(traj, static_cast<int>(trials.size())));
    }
    ReturnMapFit fit;
    try {
      fit = fit_linear_map(trials);
    } catch (const std::invalid_argument& e) {
      throw RankDeficient(e.what());
    }
    const std::string doc = fit_to_json(fit).dump(2);
    if (opts.out) {
      auto out = open_output(*opts.out);
      out << doc << '\n';
    } else {
      log << doc << '\n';
    }
    log << "dominant_abs " << format_double(fit.dominant_abs) << '\n';
    return static_cast<int>(ok);
  });
}

int run_report(const ReportOptions& opts, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    const ScenarioConfig cfg = resolve_config(opts.config, opts.overrides);
    std::ifstream in(opts.in);
    if (!in) throw ConfigError("cannot read '" + opts.in.string() + "'");
    const auto cells = read_sweep_csv(in);
    const SweepCell& best = select_best(cells);
    const std::string doc =
        best_cell_report(best, cfg.nondim, report_dimensions(cfg, opts.overrides)).dump(2);
    if (opts.out) {
      auto out = open_output(*opts.out);
      out << doc << '\n';
    } else {
      log << doc << '\n';
    }
    return static_cast<int>(ok);
  });
}

}  // namespace rimless::cli
