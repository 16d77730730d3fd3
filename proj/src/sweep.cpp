#include "rimless/sweep.hpp"

#include <cmath>
#include <exception>

#include <omp.h>

#include "rimless/errors.hpp"

namespace rimless {

std::vector<double> log_space(double lo, double hi, int n) {
  if (n < 1 || !(lo > 0.0) || !(hi >= lo)) {
    throw std::invalid_argument("log_space needs n >= 1 and 0 < lo <= hi");
  }
  std::vector<double> out(static_cast<std::size_t>(n));
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log10(lo), b = std::log10(hi);
  for (int i = 0; i < n; ++i) out[i] = std::pow(10.0, a + (b - a) * i / (n - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

SweepGrid SweepGrid::log_spaced(const NondimParams& scenario, double k_min, double k_max, int nk,
                                double b_min, double b_max, int nb) {
  SweepGrid g;
  g.k_hat_values = log_space(k_min, k_max, nk);
  g.b_hat_values = log_space(b_min, b_max, nb);
  g.scenario = scenario;
  return g;
}

void SweepGrid::validate() const {
  if (k_hat_values.empty() || b_hat_values.empty()) throw std::invalid_argument("empty sweep grid");
  for (const auto* values : {&k_hat_values, &b_hat_values}) {
    for (std::size_t i = 0; i < values->size(); ++i) {
      if (!((*values)[i] > 0.0)) throw std::invalid_argument("grid values must be positive");
      if (i > 0 && !((*values)[i] > (*values)[i - 1])) {
        throw std::invalid_argument("grid values must be strictly ascending");
      }
    }
  }
  scenario.validate();
}

HybridState seed_state(const NondimParams& p, double theta2) {
  const double rate = limit_cycle_rate(p.gamma, p.alpha);
  HybridState s;
  s.theta1 = -p.alpha;
  s.dtheta1 = rate;
  s.theta2 = theta2;
  s.dtheta2 = rate;
  return with_geometric_length(s, p);
}

InitialConditionSet default_initial_conditions(const NondimParams& p, int n_trials) {
  if (n_trials < 4) throw std::invalid_argument("need at least 4 trials");
  InitialConditionSet ics;
  const double span = 0.9 * p.alpha;
  for (int i = 0; i < n_trials; ++i) {
    ics.push_back(seed_state(p, -span + 2.0 * span * i / (n_trials - 1)));
  }
  return ics;
}

HybridState phase_lag_state(const NondimParams& p, double phase_pct, double dt) {
  if (!(phase_pct >= 0.0 && phase_pct < 100.0)) {
    throw std::invalid_argument("phase must lie in [0, 100)");
  }
  NondimParams free = p;
  free.k_hat = 0.0;
  free.b_hat = 0.0;
  const double rate = limit_cycle_rate(p.gamma, p.alpha);
  const HybridState launch{-p.alpha, rate, -p.alpha, rate, 0.0, 0, 0};

  // Period of one uncoupled step.
  HybridState s = launch;
  double period = 0.0;
  for (;;) {
    const HybridState next = integrate_step(s, dt, free);
    if (next.theta1 >= p.alpha) {
      period += locate_event(s, next, dt, free, 1e-13).offset;
      break;
    }
    s = next;
    period += dt;
    if (period > 1e4) throw std::domain_error("uncoupled wheel never completes a step");
  }

  // Wheel 2 is (1 - phase) of the way through its own step.
  const double lag = (1.0 - phase_pct / 100.0) * period;
  s = launch;
  double t = 0.0;
  while (t < lag) {
    const double h = std::min(dt, lag - t);
    s = integrate_step(s, h, free);
    t += h;
  }
  return with_geometric_length({-p.alpha, rate, s.theta2, s.dtheta2, 0.0, 0, 0}, p);
}

SweepCell run_cell(double k_hat, double b_hat, const NondimParams& scenario,
                   std::span<const HybridState> ics, const IntegratorConfig& cfg, double tol_deg) {
  NondimParams p = scenario;
  p.k_hat = k_hat;
  p.b_hat = b_hat;
  IntegratorConfig run_cfg = cfg;
  run_cfg.sample_stride = 0;

  SweepCell cell;
  cell.k_hat = k_hat;
  cell.b_hat = b_hat;
  std::vector<SectionTrial> trials;
  for (std::size_t i = 0; i < ics.size(); ++i) {
    try {
      const Trajectory traj = simulate(ics[i], p, run_cfg);
      if (traj.failed()) {
        ++cell.n_failed;
        continue;
      }
      SectionTrial samples = section_samples(traj, static_cast<int>(i));
      if (convergence_check(samples, tol_deg)) ++cell.n_converged;
      trials.push_back(std::move(samples));
    } catch (const NumericError&) {
      ++cell.n_failed;
    } catch (const DegenerateGeometry&) {
      ++cell.n_failed;
    }
  }
  cell.valid = !ics.empty() && cell.n_converged == static_cast<int>(ics.size());
  if (!cell.valid) return cell;

  try {
    ReturnMapFit fit = fit_linear_map(trials);
    cell.dominant_abs = fit.dominant_abs;
    cell.dominant = fit.dominant();
    cell.fit = std::move(fit);
  } catch (const RankDeficient& e) {
    cell.fit_error = e.what();
  } catch (const std::invalid_argument& e) {
    cell.fit_error = e.what();
  }
  return cell;
}

namespace {

void check_inputs(const SweepGrid& grid, std::span<const HybridState> ics) {
  grid.validate();
  if (ics.empty()) throw std::invalid_argument("empty initial-condition set");
}

}  // namespace

std::vector<SweepCell> run_sweep_serial(const SweepGrid& grid, std::span<const HybridState> ics,
                                        const IntegratorConfig& cfg, double tol_deg) {
  check_inputs(grid, ics);
  std::vector<SweepCell> cells;
  cells.reserve(grid.size());
  for (double k : grid.k_hat_values) {
    for (double b : grid.b_hat_values) {
      cells.push_back(run_cell(k, b, grid.scenario, ics, cfg, tol_deg));
    }
  }
  return cells;
}

std::vector<SweepCell> run_sweep(const SweepGrid& grid, std::span<const HybridState> ics,
                                 const IntegratorConfig& cfg, int workers, double tol_deg) {
  check_inputs(grid, ics);
  const auto nb = static_cast<long long>(grid.b_hat_values.size());
  const auto n = static_cast<long long>(grid.size());
  std::vector<SweepCell> cells(static_cast<std::size_t>(n));
  std::exception_ptr error;
  const int threads = workers > 0 ? workers : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (long long i = 0; i < n; ++i) {
    try {
      cells[i] = run_cell(grid.k_hat_values[i / nb], grid.b_hat_values[i % nb], grid.scenario, ics,
                          cfg, tol_deg);
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return cells;
}

const SweepCell& select_best(std::span<const SweepCell> cells) {
  const SweepCell* best = nullptr;
  for (const auto& c : cells) {
    if (!c.valid || !c.dominant_abs) continue;
    if (best == nullptr || *c.dominant_abs < *best->dominant_abs ||
        (*c.dominant_abs == *best->dominant_abs &&
         (c.b_hat < best->b_hat || (c.b_hat == best->b_hat && c.k_hat < best->k_hat)))) {
      best = &c;
    }
  }
  if (best == nullptr) throw NoValidCell("no valid cell with a fitted return map");
  return *best;
}

}  // namespace rimless
