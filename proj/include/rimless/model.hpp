#pragma once

#include <numbers>

namespace rimless {

constexpr double deg(double degrees) { return degrees * std::numbers::pi / 180.0; }
constexpr double to_deg(double radians) { return radians * 180.0 / std::numbers::pi; }

/// Dimensional parameters of two identical rimless wheels joined by a
/// parallel spring and damper.
struct PhysicalParams {
  double m = 10.0;       ///< wheel mass [kg]
  double ell = 0.9652;   ///< leg length [m]
  double g = 9.81;       ///< gravity [m/s^2]
  double gamma = deg(2.0);   ///< slope angle [rad]
  double alpha = deg(15.0);  ///< half inter-spoke angle [rad]
  double k = 5.25;       ///< spring stiffness [N/m]
  double b = 100.0;      ///< damping [N s/m]
  double D0 = 0.4826;    ///< spring rest length [m]
  double S0 = 0.4826;    ///< initial stance-foot separation [m]

  void validate() const;
};

/// Parameters of the nondimensional system. Time is scaled by sqrt(ell/g),
/// lengths by ell, stiffness by m g, damping by m sqrt(g/ell).
struct NondimParams {
  double gamma = deg(1.75);
  double alpha = deg(15.0);
  double k_hat = 0.0;
  double b_hat = 0.0;
  double D0_hat = 0.5;
  double S0_hat = 0.5;

  void validate() const;
  bool operator==(const NondimParams&) const = default;
};

/// Continuous state plus the discrete step counters of both wheels.
struct HybridState {
  double theta1 = 0.0;
  double dtheta1 = 0.0;
  double theta2 = 0.0;
  double dtheta2 = 0.0;
  double D_hat = 0.0;
  int n1 = 0;
  int n2 = 0;

  bool operator==(const HybridState&) const = default;
};

enum class Wheel { first = 1, second = 2 };

struct CouplerGeometry {
  double D = 0.0;
  double beta = 0.0;
  double Dx = 0.0;
  double Dy = 0.0;
  double Ddot = 0.0;
};

/// Time derivative of the continuous part of HybridState.
struct StateRate {
  double dtheta1 = 0.0;
  double ddtheta1 = 0.0;
  double dtheta2 = 0.0;
  double ddtheta2 = 0.0;
  double dD_hat = 0.0;
};

/// Coupler spring and damper expressed in physical units.
struct CouplerDesign {
  double k = 0.0;
  double b = 0.0;
};

/// Distance between successive footholds, 2 sin(alpha) in leg lengths.
double step_length(double alpha);

/// Slope-parallel stance-foot separation S0 + (n1 - n2) * sigma.
double stance_distance(int n1, int n2, const NondimParams& p);

/// Throws DegenerateGeometry when the coupler length falls below 1e-12.
CouplerGeometry coupler_geometry(const HybridState& s, const NondimParams& p);

double coupler_force(const CouplerGeometry& geom, const NondimParams& p);

/// Right-hand side of the nondimensional equations of motion. The coupler
/// length and angle come from the geometry, not from s.D_hat.
StateRate dynamics(const HybridState& s, const NondimParams& p);

/// `dynamics` with the parameter-only trigonometry evaluated once.
class CoupledFlow {
 public:
  explicit CoupledFlow(const NondimParams& p);

  StateRate operator()(const HybridState& s) const;
  const NondimParams& params() const { return p_; }

 private:
  NondimParams p_;
  double sin_gamma_;
  double cos_gamma_;
  double step_;
};

/// Heel-strike reset of one wheel: theta -> -alpha, rate scaled by
/// cos(2 alpha), step counter incremented. Throws std::invalid_argument if
/// the wheel is short of alpha by more than tol.
HybridState impact_map(const HybridState& s, Wheel wheel, const NondimParams& p,
                       double tol = 1e-9);

NondimParams nondimensionalize(const PhysicalParams& p);
CouplerDesign dimensionalize(const NondimParams& np, double m, double ell, double g);

/// Kinetic + gravitational + spring energy in units of m g ell. Heights are
/// measured in the world frame with each stance foot advanced by one step
/// length per impact, so the potential is continuous across impacts.
double total_energy(const HybridState& s, const NondimParams& p);
double kinetic_energy(const HybridState& s);

/// Copy of s with D_hat replaced by the geometric coupler length.
HybridState with_geometric_length(HybridState s, const NondimParams& p);

/// Post-impact rate of the period-one gait of a single uncoupled wheel.
/// Throws std::domain_error if no such gait exists for the slope.
double limit_cycle_rate(double gamma, double alpha);

}  // namespace rimless
