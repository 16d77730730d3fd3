#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rimless/config.hpp"
#include "rimless/errors.hpp"
#include "rimless/io.hpp"
#include "rimless/sweep.hpp"

using namespace rimless;
using doctest::Approx;

namespace {

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

Trajectory coupled_run(double t_max) {
  NondimParams p;
  p.k_hat = 1e-3;
  p.b_hat = 3.0;
  IntegratorConfig cfg;
  cfg.t_max = t_max;
  cfg.sample_stride = 50;
  return simulate(seed_state(p, 0.1), p, cfg);
}

ScenarioConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

}  // namespace

TEST_CASE("format_double round-trips") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("trajectory and events CSV round-trip") {
  const Trajectory t = coupled_run(40);
  std::ostringstream traj, ev;
  write_trajectory_csv(traj, t);
  write_events_csv(ev, t);
  CHECK(first_line(traj.str()) == "tau,theta1,dtheta1,theta2,dtheta2,D_hat,n1,n2");
  CHECK(first_line(ev.str()) == "tau,wheel,kind,theta_pre,dtheta_pre,dtheta_post");

  std::istringstream tin(traj.str()), ein(ev.str());
  const Trajectory r = read_trajectory(tin, ein);
  REQUIRE(r.samples.size() == t.samples.size());
  for (std::size_t i = 0; i < t.samples.size(); ++i) {
    CHECK(r.samples[i].tau == t.samples[i].tau);
    CHECK(r.samples[i].state == t.samples[i].state);
  }
  REQUIRE(r.events.size() == t.events.size());
  for (std::size_t i = 0; i < t.events.size(); ++i) {
    CHECK(r.events[i].tau == t.events[i].tau);
    CHECK(r.events[i].wheel == t.events[i].wheel);
    CHECK(r.events[i].kind == t.events[i].kind);
  }
  CHECK(r.termination() == EventKind::horizon);

  // The section and its fit survive the trip unchanged.
  const SectionTrial a = section_samples(t), b = section_samples(r);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].x == b[i].x);
}

TEST_CASE("malformed trajectory files are rejected") {
  std::istringstream bad_header("tau,theta1\n0,0\n"), ev("tau,wheel,kind,theta_pre,dtheta_pre,dtheta_post\n");
  CHECK_THROWS_AS(read_trajectory(bad_header, ev), std::runtime_error);
  std::istringstream short_row("tau,theta1,dtheta1,theta2,dtheta2,D_hat,n1,n2\n0,1,2\n");
  std::istringstream ev2("tau,wheel,kind,theta_pre,dtheta_pre,dtheta_post\n");
  CHECK_THROWS_AS(read_trajectory(short_row, ev2), std::runtime_error);
  std::istringstream ok("tau,theta1,dtheta1,theta2,dtheta2,D_hat,n1,n2\n0,0,0,0,0,0.5,0,0\n");
  std::istringstream bad_kind("tau,wheel,kind,theta_pre,dtheta_pre,dtheta_post\n1,1,teleport,0,0,0\n");
  CHECK_THROWS(read_trajectory(ok, bad_kind));
}

TEST_CASE("phase CSV") {
  NondimParams p;
  IntegratorConfig cfg;
  cfg.t_max = 20;
  const auto m = phase_metrics(simulate(phase_lag_state(p, 30.0), p, cfg), p);
  std::ostringstream out;
  write_phase_csv(out, m);
  const std::string s = out.str();
  CHECK(first_line(s) == "step,tau,phase_pct,phi_deg,theta2_section_deg");
  CHECK(static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')) == m.size() + 1);
}

TEST_CASE("sweep CSV round-trip") {
  std::vector<SweepCell> cells(3);
  cells[0].k_hat = 1e-4;
  cells[0].b_hat = 0.1;
  cells[1].k_hat = 1e-4;
  cells[1].b_hat = 1.0;
  cells[1].valid = true;
  cells[1].n_converged = 8;
  cells[1].dominant_abs = 0.97;
  cells[1].dominant = std::complex<double>(0.5, 0.8310824267);
  cells[2].k_hat = 2e-4;
  cells[2].b_hat = 0.1;
  cells[2].n_failed = 3;
  cells[2].n_converged = 2;

  std::ostringstream out;
  write_sweep_csv(out, cells);
  CHECK(first_line(out.str()) ==
        "k_hat,b_hat,valid,n_converged,n_failed,dominant_abs,lambda_re,lambda_im");
  std::istringstream in(out.str());
  const auto back = read_sweep_csv(in);
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back[i].k_hat == cells[i].k_hat);
    CHECK(back[i].b_hat == cells[i].b_hat);
    CHECK(back[i].valid == cells[i].valid);
    CHECK(back[i].n_converged == cells[i].n_converged);
    CHECK(back[i].n_failed == cells[i].n_failed);
    CHECK(back[i].dominant_abs == cells[i].dominant_abs);
    CHECK(back[i].dominant == cells[i].dominant);
  }
  std::istringstream bad("k_hat,b_hat\n1,2\n");
  CHECK_THROWS_AS(read_sweep_csv(bad), std::runtime_error);
}

TEST_CASE("fit JSON document") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<SectionTrial> trials(3);
  const Mat4 A = Vec4(0.9, 0.4, 0.2, -0.1).asDiagonal();
  for (int t = 0; t < 3; ++t) {
    Vec4 x(u(rng), u(rng), u(rng), u(rng));
    for (int m = 0; m < 10; ++m, x = A * x) trials[t].push_back({x, t, m});
  }
  const ReturnMapFit fit = fit_linear_map(trials);
  const nlohmann::json j = fit_to_json(fit);
  CHECK(j["state"] == nlohmann::json({"dtheta1", "theta2", "dtheta2", "D_hat"}));
  REQUIRE(j["A"].size() == 4);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) CHECK(j["A"][r][c].get<double>() == fit.A(r, c));
  CHECK(j["eigenvalues"].size() == 4);
  CHECK(j["eigenvalues"][0]["re"].get<double>() == Approx(0.9));
  CHECK(j["dominant_abs"].get<double>() == fit.dominant_abs);
  CHECK(j["n_pairs"] == 27);
  CHECK(j["n_trials"] == 3);
  CHECK(j.contains("fixed_point"));
  CHECK(j.contains("residual_rms"));
  // Serialized text parses back to the same numbers.
  const auto again = nlohmann::json::parse(j.dump());
  CHECK(again["A"][0][0].get<double>() == fit.A(0, 0));
}

TEST_CASE("best-cell report carries physical coupler values") {
  SweepCell c;
  c.k_hat = 4.2813e-4;
  c.b_hat = 2.9764;
  c.valid = true;
  c.dominant_abs = 0.97;
  c.dominant = std::complex<double>(0.97, 0.0);
  NondimParams p;
  const auto j = best_cell_report(c, p, Dimensions{});
  CHECK(j["k_hat"].get<double>() == c.k_hat);
  // k = k_hat m g, b = b_hat m sqrt(g / l)
  CHECK(j["physical"]["k"].get<double>() == Approx(c.k_hat * 10 * 9.81).epsilon(1e-12));
  CHECK(j["physical"]["b"].get<double>() ==
        Approx(c.b_hat * 10 * std::sqrt(9.81 / 0.9652)).epsilon(1e-12));
  CHECK(j["scenario"]["gamma_deg"].get<double>() == Approx(1.75));
  CHECK(!best_cell_report(c, p, std::nullopt).contains("physical"));
}

TEST_CASE("scenario files") {
  SUBCASE("physical scenario") {
    const ScenarioConfig c = parse(
        "[physical]\nmass = 10\nlength = 0.9652\ngravity = 9.81\ngamma_deg = 2\nalpha_deg = 15\n"
        "k = 5.25\nb = 100\n[integrator]\nt_max = 50\n[initial]\ntheta2_deg = 5\n");
    REQUIRE(c.physical);
    CHECK(c.nondim.k_hat == Approx(5.25 / (10 * 9.81)));
    CHECK(c.nondim.D0_hat == Approx(0.5));
    CHECK(c.nondim.gamma == Approx(deg(2)));
    CHECK(c.integrator.t_max == 50);
    const HybridState s = initial_state(c);
    CHECK(s.theta1 == Approx(-deg(15)));
    CHECK(s.theta2 == Approx(deg(5)));
    CHECK(s.dtheta1 == Approx(limit_cycle_rate(deg(2), deg(15))));
  }
  SUBCASE("nondimensional scenario with sweep") {
    const ScenarioConfig c = parse(
        "[nondimensional]\ngamma_deg = 1.75\nalpha_deg = 15\n[sweep]\nnk = 3\nnb = 2\ntrials = 5\n");
    CHECK(!c.physical);
    CHECK(c.sweep.nk == 3);
    CHECK(c.sweep.trials == 5);
    CHECK(c.nondim.S0_hat == 0.5);
  }
  SUBCASE("several trials select the default seeds") {
    const ScenarioConfig c = parse("[nondimensional]\n[initial]\ntrials = 6\n");
    CHECK(initial_conditions(c).size() == 6);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(parse("[physical]\nmass = 10\n[nondimensional]\n"), ConfigError);
    CHECK_THROWS_AS(parse("[integrator]\ndt = 1e-3\n"), ConfigError);
    CHECK_THROWS_AS(parse("[nondimensional]\nbogus = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse("[nondimensional]\n[extras]\nx = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse("[nondimensional]\nk_hat = abc\n"), ConfigError);
    CHECK_THROWS_AS(parse("[nondimensional]\nk_hat = -1\n"), ConfigError);
    CHECK_THROWS_AS(parse("x = 1\n[nondimensional]\n"), ConfigError);
    CHECK_THROWS_AS(parse("[nondimensional\n"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/file.ini"), ConfigError);
  }
}
