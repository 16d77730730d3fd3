#pragma once

#include <complex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rimless/integrator.hpp"
#include "rimless/model.hpp"
#include "rimless/poincare.hpp"

namespace rimless {

using InitialConditionSet = std::vector<HybridState>;

/// Log-spaced (k_hat, b_hat) grid sharing one slope/geometry scenario.
struct SweepGrid {
  std::vector<double> k_hat_values;
  std::vector<double> b_hat_values;
  NondimParams scenario;  ///< k_hat and b_hat are replaced per cell

  static SweepGrid log_spaced(const NondimParams& scenario, double k_min, double k_max, int nk,
                              double b_min, double b_max, int nb);
  void validate() const;
  std::size_t size() const { return k_hat_values.size() * b_hat_values.size(); }
};

struct SweepCell {
  double k_hat = 0.0;
  double b_hat = 0.0;
  bool valid = false;
  int n_converged = 0;
  int n_failed = 0;
  std::optional<double> dominant_abs;
  std::optional<std::complex<double>> dominant;
  std::optional<ReturnMapFit> fit;
  std::string fit_error;  ///< set when a valid cell's data could not be fitted
};

class NoValidCell : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// n points from lo to hi inclusive, uniformly spaced in log10.
std::vector<double> log_space(double lo, double hi, int n);

/// Seeds with wheel 1 just stepped (theta1 = -alpha), theta2 spread
/// uniformly over [-0.9 alpha, 0.9 alpha], both rates at the single-wheel
/// limit-cycle rate and D_hat on the geometry.
InitialConditionSet default_initial_conditions(const NondimParams& p, int n_trials);

/// Seed with theta1 = -alpha, the given theta2 and both rates at the
/// single-wheel limit-cycle rate.
HybridState seed_state(const NondimParams& p, double theta2);

/// Seed where both wheels ride the uncoupled limit cycle and wheel 2 strikes
/// `phase_pct` percent of the way through wheel 1's first step.
HybridState phase_lag_state(const NondimParams& p, double phase_pct, double dt = 1e-3);

/// Simulates every seed for one coupler setting. Valid iff every trial ends
/// with |theta2| < tol_deg at the section; valid cells get a return-map fit.
/// Sample storage in `cfg` is ignored (only event rows are kept).
SweepCell run_cell(double k_hat, double b_hat, const NondimParams& scenario,
                   std::span<const HybridState> ics, const IntegratorConfig& cfg,
                   double tol_deg = 1.0);

/// OpenMP sweep. Cells come back ordered by (k_hat, b_hat) whatever the
/// worker count; workers <= 0 uses the OpenMP default.
std::vector<SweepCell> run_sweep(const SweepGrid& grid, std::span<const HybridState> ics,
                                 const IntegratorConfig& cfg, int workers = 0,
                                 double tol_deg = 1.0);

/// Single-threaded reference for run_sweep.
std::vector<SweepCell> run_sweep_serial(const SweepGrid& grid, std::span<const HybridState> ics,
                                        const IntegratorConfig& cfg, double tol_deg = 1.0);

/// Valid fitted cell with the smallest dominant eigenvalue modulus; ties go
/// to smaller b_hat, then smaller k_hat.
const SweepCell& select_best(std::span<const SweepCell> cells);

}  // namespace rimless
