#pragma once

#include <array>
#include <complex>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rimless/integrator.hpp"
#include "rimless/model.hpp"

namespace rimless {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;
using Spectrum = std::array<std::complex<double>, 4>;

/// Reduced state (theta1', theta2, theta2', D_hat) at a wheel-1 heel strike.
struct PoincareSample {
  Vec4 x = Vec4::Zero();
  int trial_id = 0;
  int index = 0;
};

using SectionTrial = std::vector<PoincareSample>;

/// Least-squares linearization of the return map about its fixed point,
/// x[m+1] - xbar = A (x[m] - xbar).
struct ReturnMapFit {
  Mat4 A = Mat4::Zero();
  Vec4 fixed_point = Vec4::Zero();
  Spectrum eigenvalues{};  ///< sorted by decreasing modulus
  double dominant_abs = 0.0;
  int n_samples = 0;
  int n_pairs = 0;
  int n_trials = 0;
  double residual_rms = 0.0;

  /// Dominant eigenvalue; for a complex pair, the member with Im >= 0.
  std::complex<double> dominant() const;
};

/// One sample per wheel-1 impact, taken after every jump at that instant.
/// Samples after a failure event are never produced because the run stops.
SectionTrial section_samples(const Trajectory& traj, int trial_id = 0);

/// Fits the return map from several trials of one parameter set. If
/// `trial_params` is non-empty every entry must be equal. Throws
/// RankDeficient if the sample covariance is singular to `rank_tol`
/// (relative, on the correlation matrix) and std::invalid_argument if there
/// are fewer than `min_pairs` transitions.
ReturnMapFit fit_linear_map(std::span<const SectionTrial> trials,
                            std::span<const NondimParams> trial_params = {},
                            double rank_tol = 1e-12, int min_pairs = 20);

/// All four eigenvalues, sorted by decreasing modulus then decreasing
/// imaginary part.
Spectrum eigenvalues_4x4(const Mat4& A);

/// xbar + A^m (x0 - xbar).
Vec4 predict(const ReturnMapFit& fit, const Vec4& x0, int m);

/// True iff the final section sample has |theta2| < tol_deg.
bool convergence_check(std::span<const PoincareSample> samples, double tol_deg = 1.0);

/// Index of the first sample from which |theta2| stays below tol_deg to the
/// end of the trial.
std::optional<int> band_entry(std::span<const PoincareSample> samples, double tol_deg = 1.0);

struct PhaseMetric {
  int step = 0;
  double tau = 0.0;                   ///< start of the wheel-1 step
  std::optional<double> phase_pct;    ///< wheel-2 strike within [start, end)
  double phi_deg = 0.0;               ///< theta1 - theta2 at the step start, pre-impact
  double theta2_deg = 0.0;            ///< section theta2 at the step start
};

/// Per wheel-1 step: the wheel-2 impact time as a percentage of the step,
/// and the angle difference at the section.
std::vector<PhaseMetric> phase_metrics(const Trajectory& traj, const NondimParams& p);

}  // namespace rimless
