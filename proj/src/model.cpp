#include "rimless/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "rimless/errors.hpp"

namespace rimless {

namespace {

constexpr double kMinCouplerLength = 1e-12;

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

void PhysicalParams::validate() const {
  require(m > 0.0 && ell > 0.0 && g > 0.0 && D0 > 0.0, "m, ell, g and D0 must be positive");
  require(alpha > 0.0 && alpha < std::numbers::pi / 2, "alpha must lie in (0, pi/2)");
  require(std::abs(gamma) < alpha, "|gamma| must be smaller than alpha");
  require(k >= 0.0 && b >= 0.0, "k and b must be non-negative");
}

void NondimParams::validate() const {
  require(alpha > 0.0 && alpha < std::numbers::pi / 2, "alpha must lie in (0, pi/2)");
  require(std::abs(gamma) < alpha, "|gamma| must be smaller than alpha");
  require(k_hat >= 0.0 && b_hat >= 0.0, "k_hat and b_hat must be non-negative");
  require(D0_hat > 0.0, "D0_hat must be positive");
}

double step_length(double alpha) { return 2.0 * std::sin(alpha); }

double stance_distance(int n1, int n2, const NondimParams& p) {
  return p.S0_hat + static_cast<double>(n1 - n2) * step_length(p.alpha);
}

CouplerGeometry coupler_geometry(const HybridState& s, const NondimParams& p) {
  const double s1 = std::sin(s.theta1), c1 = std::cos(s.theta1);
  const double s2 = std::sin(s.theta2), c2 = std::cos(s.theta2);
  CouplerGeometry geom;
  geom.Dx = s1 - s2 + stance_distance(s.n1, s.n2, p);
  geom.Dy = c1 - c2;
  geom.D = std::hypot(geom.Dx, geom.Dy);
  if (std::isnan(geom.D)) throw NumericError("non-finite coupler length");
  if (!(geom.D >= kMinCouplerLength)) {
    throw DegenerateGeometry("coupler length " + std::to_string(geom.D) +
                             " is below 1e-12; coupler angle undefined");
  }
  geom.beta = std::atan2(geom.Dy, geom.Dx);
  // cos(theta_i + beta) without evaluating beta's trig functions.
  const double cb = geom.Dx / geom.D, sb = geom.Dy / geom.D;
  geom.Ddot = (c1 * cb - s1 * sb) * s.dtheta1 - (c2 * cb - s2 * sb) * s.dtheta2;
  return geom;
}

double coupler_force(const CouplerGeometry& geom, const NondimParams& p) {
  return p.k_hat * (geom.D - p.D0_hat) + p.b_hat * geom.Ddot;
}

CoupledFlow::CoupledFlow(const NondimParams& p)
    : p_(p), sin_gamma_(std::sin(p.gamma)), cos_gamma_(std::cos(p.gamma)), step_(step_length(p.alpha)) {}

StateRate CoupledFlow::operator()(const HybridState& s) const {
  const double s1 = std::sin(s.theta1), c1 = std::cos(s.theta1);
  const double s2 = std::sin(s.theta2), c2 = std::cos(s.theta2);
  const double Dx = s1 - s2 + p_.S0_hat + static_cast<double>(s.n1 - s.n2) * step_;
  const double Dy = c1 - c2;
  const double D = std::sqrt(Dx * Dx + Dy * Dy);
  if (std::isnan(D)) throw NumericError("non-finite coupler length");
  if (!(D >= kMinCouplerLength)) {
    throw DegenerateGeometry("coupler length " + std::to_string(D) +
                             " is below 1e-12; coupler angle undefined");
  }
  const double cb = Dx / D, sb = Dy / D;
  const double lever1 = c1 * cb - s1 * sb;  // cos(theta1 + beta)
  const double lever2 = c2 * cb - s2 * sb;  // cos(theta2 + beta)
  const double Ddot = lever1 * s.dtheta1 - lever2 * s.dtheta2;
  const double force = p_.k_hat * (D - p_.D0_hat) + p_.b_hat * Ddot;

  StateRate r;
  r.dtheta1 = s.dtheta1;
  r.ddtheta1 = (s1 * cos_gamma_ + c1 * sin_gamma_) - force * lever1;
  r.dtheta2 = s.dtheta2;
  r.ddtheta2 = (s2 * cos_gamma_ + c2 * sin_gamma_) + force * lever2;
  r.dD_hat = Ddot;
  return r;
}

StateRate dynamics(const HybridState& s, const NondimParams& p) { return CoupledFlow(p)(s); }

HybridState impact_map(const HybridState& s, Wheel wheel, const NondimParams& p, double tol) {
  const double restitution = std::cos(2.0 * p.alpha);
  HybridState out = s;
  if (wheel == Wheel::first) {
    if (s.theta1 < p.alpha - tol) throw std::invalid_argument("wheel 1 has not reached alpha");
    out.theta1 = -p.alpha;
    out.dtheta1 = s.dtheta1 * restitution;
    ++out.n1;
  } else {
    if (s.theta2 < p.alpha - tol) throw std::invalid_argument("wheel 2 has not reached alpha");
    out.theta2 = -p.alpha;
    out.dtheta2 = s.dtheta2 * restitution;
    ++out.n2;
  }
  return out;
}

NondimParams nondimensionalize(const PhysicalParams& p) {
  p.validate();
  NondimParams np;
  np.gamma = p.gamma;
  np.alpha = p.alpha;
  np.k_hat = p.k / (p.m * p.g);
  np.b_hat = (p.b / p.m) * std::sqrt(p.ell / p.g);
  np.D0_hat = p.D0 / p.ell;
  np.S0_hat = p.S0 / p.ell;
  return np;
}

CouplerDesign dimensionalize(const NondimParams& np, double m, double ell, double g) {
  require(m > 0.0 && ell > 0.0 && g > 0.0, "m, ell and g must be positive");
  return {np.k_hat * m * g, np.b_hat * m * std::sqrt(g / ell)};
}

double kinetic_energy(const HybridState& s) {
  return 0.5 * (s.dtheta1 * s.dtheta1 + s.dtheta2 * s.dtheta2);
}

double total_energy(const HybridState& s, const NondimParams& p) {
  const double sigma = step_length(p.alpha);
  // Foot positions measured downhill along the slope; x1 - x2 = S.
  const double foot1 = p.S0_hat + s.n1 * sigma;
  const double foot2 = s.n2 * sigma;
  const double sg = std::sin(p.gamma);
  const double height1 = std::cos(s.theta1 + p.gamma) - foot1 * sg;
  const double height2 = std::cos(s.theta2 + p.gamma) - foot2 * sg;
  const double stretch = coupler_geometry(s, p).D - p.D0_hat;
  return kinetic_energy(s) + height1 + height2 + 0.5 * p.k_hat * stretch * stretch;
}

HybridState with_geometric_length(HybridState s, const NondimParams& p) {
  s.D_hat = coupler_geometry(s, p).D;
  return s;
}

double limit_cycle_rate(double gamma, double alpha) {
  const double c = std::cos(2.0 * alpha);
  const double drop = std::cos(gamma - alpha) - std::cos(gamma + alpha);
  if (!(drop > 0.0) || c * c >= 1.0) {
    throw std::domain_error("no rolling gait: slope does not supply energy");
  }
  const double rate = std::sqrt(c * c * 2.0 * drop / (1.0 - c * c));
  // The wheel must still vault over the apex at theta = -gamma.
  if (0.5 * rate * rate <= 1.0 - std::cos(gamma - alpha)) {
    throw std::domain_error("no rolling gait: wheel cannot vault over its stance leg");
  }
  return rate;
}

}  // namespace rimless
