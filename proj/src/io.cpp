#include "rimless/io.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace rimless {

namespace {

constexpr const char* kTrajectoryHeader = "tau,theta1,dtheta1,theta2,dtheta2,D_hat,n1,n2";
constexpr const char* kEventsHeader = "tau,wheel,kind,theta_pre,dtheta_pre,dtheta_post";
constexpr const char* kPhaseHeader = "step,tau,phase_pct,phi_deg,theta2_section_deg";
constexpr const char* kSweepHeader =
    "k_hat,b_hat,valid,n_converged,n_failed,dominant_abs,lambda_re,lambda_im";

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

void expect_header(std::istream& in, const char* header) {
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != header) {
    throw std::runtime_error(std::string("expected CSV header '") + header + "'");
  }
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::runtime_error("bad number '" + s + "'");
  return v;
}

int to_int(const std::string& s) {
  std::size_t used = 0;
  const int v = std::stoi(s, &used);
  if (used != s.size()) throw std::runtime_error("bad integer '" + s + "'");
  return v;
}

template <class Fn>
void for_each_row(std::istream& in, std::size_t columns, Fn&& fn) {
  std::string line;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != columns) throw std::runtime_error("wrong column count in row '" + line + "'");
    fn(fields);
  }
}

std::string optional_field(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string{};
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << kTrajectoryHeader << '\n';
  for (const auto& [tau, s] : traj.samples) {
    out << format_double(tau) << ',' << format_double(s.theta1) << ',' << format_double(s.dtheta1)
        << ',' << format_double(s.theta2) << ',' << format_double(s.dtheta2) << ','
        << format_double(s.D_hat) << ',' << s.n1 << ',' << s.n2 << '\n';
  }
}

void write_events_csv(std::ostream& out, const Trajectory& traj) {
  out << kEventsHeader << '\n';
  for (const auto& e : traj.events) {
    const bool second = e.wheel == 2;
    out << format_double(e.tau) << ',' << e.wheel << ',' << to_string(e.kind) << ','
        << format_double(second ? e.pre.theta2 : e.pre.theta1) << ','
        << format_double(second ? e.pre.dtheta2 : e.pre.dtheta1) << ','
        << format_double(second ? e.post.dtheta2 : e.post.dtheta1) << '\n';
  }
}

void write_phase_csv(std::ostream& out, std::span<const PhaseMetric> metrics) {
  out << kPhaseHeader << '\n';
  for (const auto& m : metrics) {
    out << m.step << ',' << format_double(m.tau) << ',' << optional_field(m.phase_pct) << ','
        << format_double(m.phi_deg) << ',' << format_double(m.theta2_deg) << '\n';
  }
}

Trajectory read_trajectory(std::istream& trajectory_csv, std::istream& events_csv) {
  Trajectory traj;
  expect_header(trajectory_csv, kTrajectoryHeader);
  for_each_row(trajectory_csv, 8, [&](const std::vector<std::string>& f) {
    HybridState s{to_double(f[1]), to_double(f[2]), to_double(f[3]), to_double(f[4]),
                  to_double(f[5]), to_int(f[6]), to_int(f[7])};
    traj.samples.push_back({to_double(f[0]), s});
  });
  expect_header(events_csv, kEventsHeader);
  for_each_row(events_csv, 6, [&](const std::vector<std::string>& f) {
    EventRecord e;
    e.tau = to_double(f[0]);
    e.wheel = to_int(f[1]);
    e.kind = event_kind_from_string(f[2]);
    if (e.wheel == 2) {
      e.pre.theta2 = to_double(f[3]);
      e.pre.dtheta2 = to_double(f[4]);
      e.post.dtheta2 = to_double(f[5]);
    } else {
      e.pre.theta1 = to_double(f[3]);
      e.pre.dtheta1 = to_double(f[4]);
      e.post.dtheta1 = to_double(f[5]);
    }
    traj.events.push_back(e);
  });
  return traj;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepCell> cells) {
  out << kSweepHeader << '\n';
  for (const auto& c : cells) {
    std::optional<double> re, im;
    if (c.dominant) {
      re = c.dominant->real();
      im = c.dominant->imag();
    }
    out << format_double(c.k_hat) << ',' << format_double(c.b_hat) << ',' << (c.valid ? 1 : 0)
        << ',' << c.n_converged << ',' << c.n_failed << ',' << optional_field(c.dominant_abs)
        << ',' << optional_field(re) << ',' << optional_field(im) << '\n';
  }
}

std::vector<SweepCell> read_sweep_csv(std::istream& in) {
  std::vector<SweepCell> cells;
  expect_header(in, kSweepHeader);
  for_each_row(in, 8, [&](const std::vector<std::string>& f) {
    SweepCell c;
    c.k_hat = to_double(f[0]);
    c.b_hat = to_double(f[1]);
    c.valid = to_int(f[2]) != 0;
    c.n_converged = to_int(f[3]);
    c.n_failed = to_int(f[4]);
    if (!f[5].empty()) c.dominant_abs = to_double(f[5]);
    if (!f[6].empty() && !f[7].empty()) c.dominant = {to_double(f[6]), to_double(f[7])};
    cells.push_back(c);
  });
  return cells;
}

nlohmann::json fit_to_json(const ReturnMapFit& fit) {
  nlohmann::json j;
  j["state"] = {"dtheta1", "theta2", "dtheta2", "D_hat"};
  auto rows = nlohmann::json::array();
  for (int r = 0; r < 4; ++r) {
    rows.push_back({fit.A(r, 0), fit.A(r, 1), fit.A(r, 2), fit.A(r, 3)});
  }
  j["A"] = rows;
  j["fixed_point"] = {fit.fixed_point[0], fit.fixed_point[1], fit.fixed_point[2],
                      fit.fixed_point[3]};
  auto eig = nlohmann::json::array();
  for (const auto& z : fit.eigenvalues) eig.push_back({{"re", z.real()}, {"im", z.imag()}});
  j["eigenvalues"] = eig;
  j["dominant_abs"] = fit.dominant_abs;
  j["residual_rms"] = fit.residual_rms;
  j["n_samples"] = fit.n_samples;
  j["n_pairs"] = fit.n_pairs;
  j["n_trials"] = fit.n_trials;
  return j;
}

nlohmann::json best_cell_report(const SweepCell& best, const NondimParams& scenario,
                                std::optional<Dimensions> dims) {
  nlohmann::json j;
  j["k_hat"] = best.k_hat;
  j["b_hat"] = best.b_hat;
  j["n_converged"] = best.n_converged;
  j["n_failed"] = best.n_failed;
  if (best.dominant_abs) j["dominant_abs"] = *best.dominant_abs;
  if (best.dominant) j["dominant"] = {{"re", best.dominant->real()}, {"im", best.dominant->imag()}};
  j["scenario"] = {{"gamma_deg", to_deg(scenario.gamma)},
                   {"alpha_deg", to_deg(scenario.alpha)},
                   {"D0_hat", scenario.D0_hat},
                   {"S0_hat", scenario.S0_hat}};
  if (dims) {
    NondimParams np = scenario;
    np.k_hat = best.k_hat;
    np.b_hat = best.b_hat;
    const CouplerDesign design = dimensionalize(np, dims->mass, dims->length, dims->gravity);
    j["physical"] = {{"mass", dims->mass},
                     {"length", dims->length},
                     {"gravity", dims->gravity},
                     {"k", design.k},
                     {"b", design.b}};
  }
  if (best.fit) j["fit"] = fit_to_json(*best.fit);
  return j;
}

}  // namespace rimless
