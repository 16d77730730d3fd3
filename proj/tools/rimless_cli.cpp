// Command-line driver for the coupled rimless wheel simulator.
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rimless/commands.hpp"

namespace {

using rimless::cli::Overrides;

void add_integrator_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--t-max", o.t_max, "Simulation horizon [tau]");
  cmd->add_option("--dt", o.dt, "Integration step [tau]");
}

void add_dimension_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--mass", o.mass, "Wheel mass [kg] for physical (k, b)");
  cmd->add_option("--length", o.length, "Leg length [m] for physical (k, b)");
  cmd->add_option("--gravity", o.gravity, "Gravity [m/s^2] for physical (k, b)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coupled double rimless wheel: simulation, return-map fitting and coupler sweeps"};
  app.require_subcommand(1);

  rimless::cli::SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Simulate one scenario and write CSV outputs");
  simulate->add_option("--config", sim.config, "Scenario file")->check(CLI::ExistingFile);
  simulate->add_option("--out", sim.out, "Output directory")->required();
  simulate->add_option("--trials", sim.overrides.trials, "Number of default seeds (1 = [initial])");
  simulate->add_option("--stride", sim.overrides.sample_stride, "Keep every n-th step (0 = events only)");
  simulate->add_flag("--strict", sim.strict, "Exit non-zero if any trial stalls or rolls back");
  add_integrator_flags(simulate, sim.overrides);
  add_dimension_flags(simulate, sim.overrides);

  rimless::cli::SweepOptions sw;
  auto* sweep = app.add_subcommand("sweep", "Sweep coupler stiffness and damping");
  sweep->add_option("--config", sw.config, "Scenario file")->check(CLI::ExistingFile);
  sweep->add_option("--out", sw.out, "Output directory")->required();
  sweep->add_option("--workers", sw.workers, "Parallel workers (0 = all cores)");
  sweep->add_option("--trials", sw.overrides.trials, "Seeds per cell");
  sweep->add_option("--k-min", sw.overrides.k_min);
  sweep->add_option("--k-max", sw.overrides.k_max);
  sweep->add_option("--nk", sw.overrides.nk);
  sweep->add_option("--b-min", sw.overrides.b_min);
  sweep->add_option("--b-max", sw.overrides.b_max);
  sweep->add_option("--nb", sw.overrides.nb);
  add_integrator_flags(sweep, sw.overrides);
  add_dimension_flags(sweep, sw.overrides);

  rimless::cli::FitOptions fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit the return map to simulated trajectories");
  fit_cmd->add_option("--in", fit.in, "Directory of trajectory*.csv / events*.csv")->required();
  fit_cmd->add_option("--out", fit.out, "Fit document (JSON); stdout if omitted");

  rimless::cli::ReportOptions rep;
  auto* report = app.add_subcommand("report", "Best-cell report from a sweep CSV");
  report->add_option("--in", rep.in, "Sweep CSV")->required()->check(CLI::ExistingFile);
  report->add_option("--config", rep.config, "Scenario file")->check(CLI::ExistingFile);
  report->add_option("--out", rep.out, "Report (JSON); stdout if omitted");
  add_dimension_flags(report, rep.overrides);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return rimless::cli::config;
  }

  if (*simulate) return rimless::cli::run_simulate(sim, std::cout, std::cerr);
  if (*sweep) return rimless::cli::run_sweep(sw, std::cout, std::cerr);
  if (*fit_cmd) return rimless::cli::run_fit(fit, std::cout, std::cerr);
  return rimless::cli::run_report(rep, std::cout, std::cerr);
}
