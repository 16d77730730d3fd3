#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "rimless/integrator.hpp"
#include "rimless/poincare.hpp"
#include "rimless/sweep.hpp"

namespace rimless {

/// Shortest decimal text that round-trips (17 significant digits).
std::string format_double(double v);

// Trajectory CSV: tau,theta1,dtheta1,theta2,dtheta2,D_hat,n1,n2
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
// Events CSV: tau,wheel,kind,theta_pre,dtheta_pre,dtheta_post
void write_events_csv(std::ostream& out, const Trajectory& traj);
// Phase CSV: step,tau,phase_pct,phi_deg,theta2_section_deg
void write_phase_csv(std::ostream& out, std::span<const PhaseMetric> metrics);

/// Rebuilds a trajectory from its two CSV files. Event states carry only
/// the fields stored in the events file. Throws std::runtime_error on a
/// schema mismatch.
Trajectory read_trajectory(std::istream& trajectory_csv, std::istream& events_csv);

// Sweep CSV: k_hat,b_hat,valid,n_converged,n_failed,dominant_abs,lambda_re,lambda_im
void write_sweep_csv(std::ostream& out, std::span<const SweepCell> cells);
std::vector<SweepCell> read_sweep_csv(std::istream& in);

nlohmann::json fit_to_json(const ReturnMapFit& fit);

/// Scale factors for reporting a nondimensional coupler in physical units.
struct Dimensions {
  double mass = 10.0;
  double length = 0.9652;
  double gravity = 9.81;
};

nlohmann::json best_cell_report(const SweepCell& best, const NondimParams& scenario,
                                std::optional<Dimensions> dims);

}  // namespace rimless
