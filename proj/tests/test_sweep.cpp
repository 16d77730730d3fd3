#include <doctest.h>

#include <cmath>
#include <vector>

#include "rimless/sweep.hpp"

using namespace rimless;
using doctest::Approx;

namespace {

IntegratorConfig horizon(double t_max) {
  IntegratorConfig cfg;
  cfg.t_max = t_max;
  return cfg;
}

void check_same(const SweepCell& a, const SweepCell& b) {
  CHECK(a.k_hat == b.k_hat);
  CHECK(a.b_hat == b.b_hat);
  CHECK(a.valid == b.valid);
  CHECK(a.n_converged == b.n_converged);
  CHECK(a.n_failed == b.n_failed);
  CHECK(a.dominant_abs == b.dominant_abs);
  CHECK(a.dominant == b.dominant);
  CHECK(a.fit_error == b.fit_error);
}

SweepCell fake_cell(double k, double b, std::optional<double> dom, bool valid = true) {
  SweepCell c;
  c.k_hat = k;
  c.b_hat = b;
  c.valid = valid;
  c.dominant_abs = dom;
  return c;
}

}  // namespace

TEST_CASE("log_space endpoints and spacing") {
  const auto v = log_space(1e-4, 1e-2, 5);
  REQUIRE(v.size() == 5);
  CHECK(v.front() == 1e-4);
  CHECK(v.back() == 1e-2);
  CHECK(v[2] == Approx(1e-3));
  for (std::size_t i = 1; i < v.size(); ++i) CHECK(v[i] / v[i - 1] == Approx(std::sqrt(10.0)));
  CHECK(log_space(0.3, 0.3, 1) == std::vector<double>{0.3});
  CHECK_THROWS_AS(log_space(0.0, 1.0, 3), std::invalid_argument);
  CHECK_THROWS_AS(log_space(1.0, 0.1, 3), std::invalid_argument);
  CHECK_THROWS_AS(log_space(0.1, 1.0, 0), std::invalid_argument);
}

TEST_CASE("grid validation") {
  NondimParams p;
  SweepGrid g = SweepGrid::log_spaced(p, 1e-4, 1e-2, 3, 0.1, 10, 4);
  CHECK(g.size() == 12);
  CHECK_NOTHROW(g.validate());
  g.b_hat_values = {1.0, 1.0};
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  g.b_hat_values.clear();
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
}

TEST_CASE("default seeds") {
  NondimParams p;
  const double w = limit_cycle_rate(p.gamma, p.alpha);
  const auto ics = default_initial_conditions(p, 8);
  REQUIRE(ics.size() == 8);
  CHECK(ics.front().theta2 == Approx(-0.9 * p.alpha));
  CHECK(ics.back().theta2 == Approx(0.9 * p.alpha));
  for (std::size_t i = 0; i < ics.size(); ++i) {
    CHECK(ics[i].theta1 == -p.alpha);
    CHECK(ics[i].dtheta1 == w);
    CHECK(ics[i].dtheta2 == w);
    CHECK(ics[i].D_hat == Approx(coupler_geometry(ics[i], p).D).epsilon(1e-15));
    if (i > 0) CHECK(ics[i].theta2 - ics[i - 1].theta2 == Approx(1.8 * p.alpha / 7));
  }
  CHECK_THROWS_AS(default_initial_conditions(p, 3), std::invalid_argument);
}

TEST_CASE("an uncoupled wheel seeded at the limit-cycle rate stays on it") {
  NondimParams p;
  const double w = limit_cycle_rate(p.gamma, p.alpha);
  const Trajectory t = simulate(seed_state(p, -p.alpha), p, horizon(120));
  int steps = 0;
  for (const auto& e : t.events) {
    if (e.kind != EventKind::impact || e.wheel != 1) continue;
    CHECK(e.post.dtheta1 == Approx(w).epsilon(1e-6));
    ++steps;
  }
  CHECK(steps >= 50);
}

TEST_CASE("phase-lag seeds") {
  NondimParams p;
  const HybridState s = phase_lag_state(p, 0.0);
  CHECK(s.theta2 == Approx(p.alpha).epsilon(1e-3));
  const HybridState h = phase_lag_state(p, 50.0);
  CHECK(h.theta2 > -p.alpha);
  CHECK(h.theta2 < p.alpha);
  CHECK_THROWS_AS(phase_lag_state(p, 100.0), std::invalid_argument);
  CHECK_THROWS_AS(phase_lag_state(p, -1.0), std::invalid_argument);
}

TEST_CASE("uncoupled wheels never synchronize") {
  NondimParams p;
  const auto ics = default_initial_conditions(p, 4);
  const SweepCell c = run_cell(0.0, 0.0, p, ics, horizon(100));
  CHECK(!c.valid);
  CHECK(c.n_failed == 0);
  CHECK(c.n_converged == 0);
  CHECK(!c.dominant_abs);
}

TEST_CASE("lockstep seeds give a uniform sweep") {
  NondimParams p;
  const std::vector<HybridState> ics(3, seed_state(p, -p.alpha));
  const SweepGrid g = SweepGrid::log_spaced(p, 1e-4, 1e-2, 2, 0.1, 10, 2);
  const auto cells = run_sweep(g, ics, horizon(60));
  REQUIRE(cells.size() == 4);
  for (const auto& c : cells) {
    CHECK(!c.valid);
    CHECK(c.n_failed == 0);
    CHECK(c.n_converged == 0);
  }
}

TEST_CASE("a coupled cell near the optimum is valid and contracting") {
  NondimParams p;
  const auto ics = default_initial_conditions(p, 4);
  const SweepCell c = run_cell(4.2813e-4, 2.9764, p, ics, IntegratorConfig{});
  CHECK(c.valid);
  CHECK(c.n_converged == 4);
  REQUIRE(c.dominant_abs);
  CHECK(*c.dominant_abs < 1.0);
  REQUIRE(c.fit);
  CHECK(c.fit->n_trials == 4);
  CHECK(std::abs(*c.dominant) == Approx(*c.dominant_abs));
}

TEST_CASE("parallel sweep matches the serial reference cell by cell") {
  NondimParams p;
  const auto ics = default_initial_conditions(p, 4);
  const SweepGrid g = SweepGrid::log_spaced(p, 3e-4, 1e-3, 2, 1.0, 3.0, 2);
  const IntegratorConfig cfg = horizon(150);
  const auto serial = run_sweep_serial(g, ics, cfg);
  for (int workers : {1, 3}) {
    const auto par = run_sweep(g, ics, cfg, workers);
    REQUIRE(par.size() == serial.size());
    for (std::size_t i = 0; i < par.size(); ++i) check_same(par[i], serial[i]);
  }
  // Each grid cell equals the cell run on its own.
  for (const auto& c : serial) check_same(c, run_cell(c.k_hat, c.b_hat, p, ics, cfg));
}

TEST_CASE("a one-cell grid is run_cell") {
  NondimParams p;
  const auto ics = default_initial_conditions(p, 4);
  const SweepGrid g = SweepGrid::log_spaced(p, 1e-3, 1e-3, 1, 2.0, 2.0, 1);
  const auto cells = run_sweep(g, ics, horizon(80));
  REQUIRE(cells.size() == 1);
  check_same(cells[0], run_cell(1e-3, 2.0, p, ics, horizon(80)));
}

TEST_CASE("sweep input errors") {
  NondimParams p;
  const SweepGrid g = SweepGrid::log_spaced(p, 1e-3, 1e-3, 1, 2.0, 2.0, 1);
  CHECK_THROWS_AS(run_sweep(g, {}, horizon(10)), std::invalid_argument);
  CHECK_THROWS_AS(run_sweep_serial(g, {}, horizon(10)), std::invalid_argument);
}

TEST_CASE("best-cell selection") {
  std::vector<SweepCell> cells{fake_cell(1e-3, 1.0, 0.9), fake_cell(2e-3, 1.0, 0.8),
                               fake_cell(3e-3, 1.0, 0.5, false), fake_cell(4e-3, 1.0, std::nullopt)};
  CHECK(select_best(cells).k_hat == 2e-3);

  SUBCASE("ties go to smaller damping, then smaller stiffness") {
    cells.push_back(fake_cell(5e-3, 0.5, 0.8));
    cells.push_back(fake_cell(1e-4, 0.5, 0.8));
    const SweepCell& b = select_best(cells);
    CHECK(b.b_hat == 0.5);
    CHECK(b.k_hat == 1e-4);
  }
  SUBCASE("no valid cell") {
    std::vector<SweepCell> bad{fake_cell(1e-3, 1.0, 0.5, false), fake_cell(1e-3, 2.0, std::nullopt)};
    CHECK_THROWS_AS(select_best(bad), NoValidCell);
    CHECK_THROWS_AS(select_best(std::span<const SweepCell>{}), NoValidCell);
  }
}
