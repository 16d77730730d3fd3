#include "rimless/integrator.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "rimless/errors.hpp"

namespace rimless {

namespace {

HybridState displaced(const HybridState& s, const StateRate& r, double h) {
  HybridState out = s;
  out.theta1 += h * r.dtheta1;
  out.dtheta1 += h * r.ddtheta1;
  out.theta2 += h * r.dtheta2;
  out.dtheta2 += h * r.ddtheta2;
  out.D_hat += h * r.dD_hat;
  return out;
}

bool finite(const HybridState& s) {
  return std::isfinite(s.theta1) && std::isfinite(s.dtheta1) && std::isfinite(s.theta2) &&
         std::isfinite(s.dtheta2) && std::isfinite(s.D_hat);
}

double rate(const HybridState& s, Wheel w) {
  return w == Wheel::first ? s.dtheta1 : s.dtheta2;
}

int index(Wheel w) { return w == Wheel::first ? 0 : 1; }

}  // namespace

void IntegratorConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(event_tol > 0.0)) throw std::invalid_argument("event_tol must be positive");
  if (!(t_max > 0.0)) throw std::invalid_argument("t_max must be positive");
  if (max_events < 1) throw std::invalid_argument("max_events must be at least 1");
  if (min_flow_time < 0.0) throw std::invalid_argument("min_flow_time must be non-negative");
  if (sample_stride < 0) throw std::invalid_argument("sample_stride must be non-negative");
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::impact: return "impact";
    case EventKind::stall: return "stall";
    case EventKind::backward: return "backward";
    case EventKind::horizon: return "horizon";
    case EventKind::zeno: return "zeno";
    case EventKind::event_cap: return "event_cap";
  }
  return "unknown";
}

EventKind event_kind_from_string(std::string_view name) {
  for (EventKind k : {EventKind::impact, EventKind::stall, EventKind::backward,
                      EventKind::horizon, EventKind::zeno, EventKind::event_cap}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown event kind '" + std::string(name) + "'");
}

EventKind Trajectory::termination() const {
  if (events.empty() || events.back().kind == EventKind::impact) return EventKind::horizon;
  return events.back().kind;
}

bool Trajectory::failed() const {
  const EventKind k = termination();
  return k == EventKind::stall || k == EventKind::backward || k == EventKind::zeno;
}

int Trajectory::impact_count(Wheel wheel) const {
  int n = 0;
  for (const auto& e : events) {
    if (e.kind == EventKind::impact && e.wheel == static_cast<int>(wheel)) ++n;
  }
  return n;
}

HybridState integrate_step(const HybridState& s, double dt, const CoupledFlow& flow) {
  const StateRate k1 = flow(s);
  const StateRate k2 = flow(displaced(s, k1, 0.5 * dt));
  const StateRate k3 = flow(displaced(s, k2, 0.5 * dt));
  const StateRate k4 = flow(displaced(s, k3, dt));
  const double w = dt / 6.0;
  HybridState out = s;
  out.theta1 += w * (k1.dtheta1 + 2.0 * (k2.dtheta1 + k3.dtheta1) + k4.dtheta1);
  out.dtheta1 += w * (k1.ddtheta1 + 2.0 * (k2.ddtheta1 + k3.ddtheta1) + k4.ddtheta1);
  out.theta2 += w * (k1.dtheta2 + 2.0 * (k2.dtheta2 + k3.dtheta2) + k4.dtheta2);
  out.dtheta2 += w * (k1.ddtheta2 + 2.0 * (k2.ddtheta2 + k3.ddtheta2) + k4.ddtheta2);
  out.D_hat += w * (k1.dD_hat + 2.0 * (k2.dD_hat + k3.dD_hat) + k4.dD_hat);
  return out;
}

HybridState integrate_step(const HybridState& s, double dt, const NondimParams& p) {
  return integrate_step(s, dt, CoupledFlow(p));
}

Crossing locate_event(const HybridState& start, const HybridState& end, double dt,
                      const CoupledFlow& flow, double event_tol) {
  return locate_crossing(start, end, dt, flow.params().alpha, event_tol,
                         [&flow](const HybridState& s, double h) { return integrate_step(s, h, flow); });
}

Crossing locate_event(const HybridState& start, const HybridState& end, double dt,
                      const NondimParams& p, double event_tol) {
  return locate_event(start, end, dt, CoupledFlow(p), event_tol);
}

Trajectory simulate(const HybridState& x0, const NondimParams& p, const IntegratorConfig& cfg) {
  p.validate();
  cfg.validate();
  if (std::abs(x0.theta1) > p.alpha + cfg.event_tol || std::abs(x0.theta2) > p.alpha + cfg.event_tol) {
    throw std::invalid_argument("initial angles must satisfy |theta| <= alpha");
  }

  Trajectory traj;
  std::array<double, 2> last_impact{-std::numeric_limits<double>::infinity(),
                                    -std::numeric_limits<double>::infinity()};
  int impacts = 0;
  const CoupledFlow flow(p);
  HybridState state = x0;
  double t = 0.0;

  auto end_with = [&](EventKind kind, int wheel) {
    traj.events.push_back({t, wheel, kind, state, state});
  };
  auto check_finite = [&](const HybridState& s) {
    if (!finite(s)) throw NumericError("non-finite state at tau = " + std::to_string(t));
  };

  // Applies every wheel sitting on the impact surface, wheel 1 first.
  // Returns false if the run must stop.
  auto apply_impacts = [&](double tol) {
    for (Wheel w : {Wheel::first, Wheel::second}) {
      if (detail::wheel_angle(state, w) < p.alpha - tol) continue;
      const HybridState post = impact_map(state, w, p, tol);
      traj.events.push_back({t, static_cast<int>(w), EventKind::impact, state, post});
      state = post;
      ++impacts;
      if (t - last_impact[index(w)] < cfg.min_flow_time) {
        end_with(EventKind::zeno, static_cast<int>(w));
        return false;
      }
      last_impact[index(w)] = t;
      if (impacts >= cfg.max_events) {
        end_with(EventKind::event_cap, 0);
        return false;
      }
    }
    return true;
  };

  if (!apply_impacts(cfg.event_tol)) {
    traj.samples.push_back({t, state});
    return traj;
  }
  traj.samples.push_back({t, state});

  const double t_end = cfg.t_max;
  long long steps = 0;
  while (t < t_end) {
    const double h = std::min(cfg.dt, t_end - t);
    if (h <= t_end * 1e-15) break;
    const HybridState next = integrate_step(state, h, flow);
    check_finite(next);

    const bool crosses = (state.theta1 < p.alpha && next.theta1 >= p.alpha) ||
                         (state.theta2 < p.alpha && next.theta2 >= p.alpha);
    if (crosses) {
      const Crossing c = locate_event(state, next, h, flow, cfg.event_tol);
      check_finite(c.state);
      state = c.state;
      t += c.offset;
      const bool keep_going = apply_impacts(cfg.event_tol);
      traj.samples.push_back({t, state});
      if (!keep_going) return traj;
      continue;
    }

    EventKind failure = EventKind::horizon;
    int failed_wheel = 0;
    for (Wheel w : {Wheel::first, Wheel::second}) {
      if (detail::wheel_angle(next, w) < -p.alpha && rate(next, w) < 0.0) {
        failure = EventKind::backward;
      } else if (rate(state, w) > 0.0 && rate(next, w) < 0.0) {
        failure = EventKind::stall;
      } else {
        continue;
      }
      failed_wheel = static_cast<int>(w);
      break;
    }

    state = next;
    t += h;
    ++steps;
    const bool last = failure != EventKind::horizon || t >= t_end;
    if (last || (cfg.sample_stride > 0 && steps % cfg.sample_stride == 0)) {
      traj.samples.push_back({t, state});
    }
    if (failure != EventKind::horizon) {
      end_with(failure, failed_wheel);
      return traj;
    }
  }
  if (traj.samples.back().tau != t) traj.samples.push_back({t, state});
  end_with(EventKind::horizon, 0);
  return traj;
}

}  // namespace rimless
