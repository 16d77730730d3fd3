#pragma once

#include <cmath>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "rimless/model.hpp"

namespace rimless {

struct IntegratorConfig {
  double dt = 1e-3;         ///< fixed step [tau]
  double event_tol = 1e-10; ///< impact-surface tolerance [rad]
  double t_max = 400.0;     ///< horizon [tau]
  int max_events = 100000;  ///< cap on impact events
  double min_flow_time = 1e-3;  ///< minimum time between impacts of one wheel
  /// Store every n-th step; 0 keeps only the initial, event and final rows.
  int sample_stride = 1;

  void validate() const;
};

enum class EventKind { impact, stall, backward, horizon, zeno, event_cap };

std::string_view to_string(EventKind kind);
EventKind event_kind_from_string(std::string_view name);

struct EventRecord {
  double tau = 0.0;
  int wheel = 0;  ///< 1 or 2; 0 for events not tied to a wheel
  EventKind kind = EventKind::impact;
  HybridState pre;
  HybridState post;
};

struct Sample {
  double tau = 0.0;
  HybridState state;
};

struct Trajectory {
  std::vector<Sample> samples;
  std::vector<EventRecord> events;

  /// Kind of the terminating event, horizon if the log is empty.
  EventKind termination() const;
  /// True when the run ended in stall, backward roll or Zeno impacts.
  bool failed() const;
  int impact_count(Wheel wheel) const;
};

/// No wheel crosses the impact surface inside the step.
class NoCrossing : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An impact-surface crossing inside one step. `offset` is measured from
/// the start of the step.
struct Crossing {
  double offset = 0.0;
  HybridState state;
  Wheel wheel = Wheel::first;
};

/// One classical fourth-order Runge-Kutta step of the continuous flow.
/// Step counters are carried through unchanged.
HybridState integrate_step(const HybridState& s, double dt, const NondimParams& p);
HybridState integrate_step(const HybridState& s, double dt, const CoupledFlow& flow);

namespace detail {

inline double wheel_angle(const HybridState& s, Wheel w) {
  return w == Wheel::first ? s.theta1 : s.theta2;
}

}  // namespace detail

/// Bisects the step [0, dt] for each wheel whose angle crosses alpha between
/// `start` and `end`, and returns the earliest crossing. `advance(start, h)`
/// must return the state h after `start`. Ties go to wheel 1.
template <class Advance>
Crossing locate_crossing(const HybridState& start, const HybridState& end, double dt,
                         double alpha, double event_tol, Advance&& advance) {
  bool found = false;
  Crossing best;
  for (Wheel w : {Wheel::first, Wheel::second}) {
    if (!(detail::wheel_angle(start, w) < alpha && detail::wheel_angle(end, w) >= alpha)) continue;
    double lo = 0.0, hi = dt;
    HybridState hi_state = end;
    Crossing c{hi, hi_state, w};
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      const HybridState st = advance(start, mid);
      const double theta = detail::wheel_angle(st, w);
      if (std::abs(theta - alpha) < event_tol) {
        c = {mid, st, w};
        hi_state = st;
        break;
      }
      if (theta >= alpha) {
        hi = mid;
        hi_state = st;
        c = {hi, hi_state, w};
      } else {
        lo = mid;
      }
    }
    if (!found || c.offset < best.offset) best = c;
    found = true;
  }
  if (!found) throw NoCrossing("no wheel crosses the impact surface in this step");
  return best;
}

/// Event location for the model flow, re-stepping from `start` with a
/// partial Runge-Kutta step.
Crossing locate_event(const HybridState& start, const HybridState& end, double dt,
                      const NondimParams& p, double event_tol);
Crossing locate_event(const HybridState& start, const HybridState& end, double dt,
                      const CoupledFlow& flow, double event_tol);

/// Integrates the hybrid system until the horizon, the event cap or a
/// failure (stall, backward roll, Zeno impacts). Throws NumericError on NaN.
Trajectory simulate(const HybridState& x0, const NondimParams& p, const IntegratorConfig& cfg);

}  // namespace rimless
