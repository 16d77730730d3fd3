#include "rimless/poincare.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "rimless/errors.hpp"

namespace rimless {

namespace {

Vec4 reduced_state(const HybridState& s) { return {s.dtheta1, s.theta2, s.dtheta2, s.D_hat}; }

// Mean of each trial's last two samples, averaged over trials. Only used
// when I - A is singular and the affine offset cannot be solved for.
Vec4 tail_mean(std::span<const SectionTrial> trials) {
  Vec4 sum = Vec4::Zero();
  int n = 0;
  for (const auto& trial : trials) {
    if (trial.empty()) continue;
    const std::size_t first = trial.size() >= 2 ? trial.size() - 2 : 0;
    Vec4 t = Vec4::Zero();
    for (std::size_t i = first; i < trial.size(); ++i) t += trial[i].x;
    sum += t / static_cast<double>(trial.size() - first);
    ++n;
  }
  return n > 0 ? Vec4(sum / n) : Vec4::Zero();
}

}  // namespace

std::complex<double> ReturnMapFit::dominant() const {
  std::complex<double> best = eigenvalues[0];
  for (const auto& z : eigenvalues) {
    if (std::abs(z) >= dominant_abs * (1.0 - 1e-12) && z.imag() > best.imag()) best = z;
  }
  return best;
}

SectionTrial section_samples(const Trajectory& traj, int trial_id) {
  SectionTrial out;
  std::size_t cursor = 0;
  double last_tau = -1.0;
  for (const auto& e : traj.events) {
    if (e.kind != EventKind::impact || e.wheel != 1) continue;
    if (e.tau == last_tau) continue;  // one section crossing per instant
    last_tau = e.tau;
    while (cursor < traj.samples.size() && traj.samples[cursor].tau < e.tau) ++cursor;
    if (cursor == traj.samples.size() || traj.samples[cursor].tau != e.tau) {
      throw std::invalid_argument("no trajectory sample at wheel-1 impact tau = " +
                                  std::to_string(e.tau));
    }
    out.push_back({reduced_state(traj.samples[cursor].state), trial_id,
                   static_cast<int>(out.size())});
  }
  return out;
}

Spectrum eigenvalues_4x4(const Mat4& A) {
  if (!A.allFinite()) throw std::invalid_argument("matrix has non-finite entries");
  Eigen::EigenSolver<Mat4> solver(A, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigenvalue iteration did not converge");
  }
  Spectrum out;
  for (int i = 0; i < 4; ++i) out[i] = solver.eigenvalues()[i];
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    const double ma = std::abs(a), mb = std::abs(b);
    if (ma != mb) return ma > mb;
    return a.imag() > b.imag();
  });
  return out;
}

ReturnMapFit fit_linear_map(std::span<const SectionTrial> trials,
                            std::span<const NondimParams> trial_params, double rank_tol,
                            int min_pairs) {
  for (const auto& p : trial_params) {
    if (!(p == trial_params.front())) {
      throw std::invalid_argument("trials come from different parameter sets");
    }
  }

  ReturnMapFit fit;
  Vec4 mean_from = Vec4::Zero(), mean_to = Vec4::Zero();
  for (const auto& trial : trials) {
    if (trial.empty()) continue;
    ++fit.n_trials;
    fit.n_samples += static_cast<int>(trial.size());
    for (std::size_t m = 0; m + 1 < trial.size(); ++m) {
      mean_from += trial[m].x;
      mean_to += trial[m + 1].x;
      ++fit.n_pairs;
    }
  }
  if (fit.n_pairs < min_pairs) {
    throw std::invalid_argument("need at least " + std::to_string(min_pairs) +
                                " section transitions, got " + std::to_string(fit.n_pairs));
  }
  mean_from /= fit.n_pairs;
  mean_to /= fit.n_pairs;

  // Centred normal equations: A * Pinv = B.
  Mat4 Pinv = Mat4::Zero(), B = Mat4::Zero();
  for (const auto& trial : trials) {
    for (std::size_t m = 0; m + 1 < trial.size(); ++m) {
      const Vec4 from = trial[m].x - mean_from;
      const Vec4 to = trial[m + 1].x - mean_to;
      Pinv += from * from.transpose();
      B += to * from.transpose();
    }
  }

  const Vec4 scale = Pinv.diagonal().cwiseSqrt();
  Vec4 magnitude = Vec4::Zero();
  for (const auto& trial : trials)
    for (const auto& s : trial) magnitude = magnitude.cwiseMax(s.x.cwiseAbs());
  for (int i = 0; i < 4; ++i) {
    // Centring leaves rounding noise behind in a constant coordinate.
    if (!(scale[i] / std::sqrt(fit.n_pairs) > 1e-12 * magnitude[i])) {
      throw RankDeficient("a section coordinate never varies; the return map is not identifiable");
    }
  }
  const Vec4 inv_scale = scale.cwiseInverse();
  const Mat4 corr = inv_scale.asDiagonal() * Pinv * inv_scale.asDiagonal();
  const double min_eig = Eigen::SelfAdjointEigenSolver<Mat4>(corr, Eigen::EigenvaluesOnly)
                             .eigenvalues()
                             .minCoeff();
  if (!(min_eig > rank_tol)) {
    throw RankDeficient("section covariance is singular (smallest correlation eigenvalue " +
                        std::to_string(min_eig) + ")");
  }
  const Mat4 rhs = inv_scale.asDiagonal() * B.transpose();
  const Mat4 At = inv_scale.asDiagonal() * corr.ldlt().solve(rhs);
  fit.A = At.transpose();

  const Eigen::FullPivLU<Mat4> lu(Mat4::Identity() - fit.A);
  fit.fixed_point = lu.isInvertible() ? Vec4(lu.solve(mean_to - fit.A * mean_from)) : tail_mean(trials);

  double sq = 0.0;
  for (const auto& trial : trials) {
    for (std::size_t m = 0; m + 1 < trial.size(); ++m) {
      sq += (predict(fit, trial[m].x, 1) - trial[m + 1].x).squaredNorm();
    }
  }
  fit.residual_rms = std::sqrt(sq / fit.n_pairs);

  fit.eigenvalues = eigenvalues_4x4(fit.A);
  fit.dominant_abs = std::abs(fit.eigenvalues[0]);
  return fit;
}

Vec4 predict(const ReturnMapFit& fit, const Vec4& x0, int m) {
  if (m < 0) throw std::invalid_argument("step count must be non-negative");
  Vec4 dev = x0 - fit.fixed_point;
  for (int i = 0; i < m; ++i) dev = fit.A * dev;
  return fit.fixed_point + dev;
}

bool convergence_check(std::span<const PoincareSample> samples, double tol_deg) {
  return !samples.empty() && std::abs(to_deg(samples.back().x[1])) < tol_deg;
}

std::optional<int> band_entry(std::span<const PoincareSample> samples, double tol_deg) {
  int entry = static_cast<int>(samples.size());
  while (entry > 0 && std::abs(to_deg(samples[entry - 1].x[1])) < tol_deg) --entry;
  if (entry == static_cast<int>(samples.size())) return std::nullopt;
  return entry;
}

std::vector<PhaseMetric> phase_metrics(const Trajectory& traj, const NondimParams& p) {
  struct Start {
    double tau, phi, theta2;
  };
  std::vector<Start> starts;
  std::vector<double> wheel2;

  if (!traj.samples.empty()) {
    const auto& first = traj.samples.front();
    const bool impact_at_zero = !traj.events.empty() && traj.events.front().tau == first.tau &&
                                traj.events.front().kind == EventKind::impact;
    if (!impact_at_zero && std::abs(first.state.theta1 + p.alpha) < 1e-12) {
      // A seed with wheel 2 also at -alpha counts as a simultaneous strike.
      const bool both = std::abs(first.state.theta2 + p.alpha) < 1e-12;
      starts.push_back({first.tau, p.alpha - (both ? p.alpha : first.state.theta2),
                        first.state.theta2});
      if (both) wheel2.push_back(first.tau);
    }
  }
  const SectionTrial section = section_samples(traj);
  std::size_t next_section = 0;
  double last_tau = -1.0;
  for (const auto& e : traj.events) {
    if (e.kind != EventKind::impact) continue;
    if (e.wheel == 2) {
      wheel2.push_back(e.tau);
    } else if (e.tau != last_tau) {
      last_tau = e.tau;
      starts.push_back({e.tau, e.pre.theta1 - e.pre.theta2, section[next_section++].x[1]});
    }
  }

  std::vector<PhaseMetric> out;
  for (std::size_t k = 0; k + 1 < starts.size(); ++k) {
    PhaseMetric pm;
    pm.step = static_cast<int>(k);
    pm.tau = starts[k].tau;
    pm.phi_deg = to_deg(starts[k].phi);
    pm.theta2_deg = to_deg(starts[k].theta2);
    const double begin = starts[k].tau, end = starts[k + 1].tau;
    auto it = std::lower_bound(wheel2.begin(), wheel2.end(), begin);
    if (it != wheel2.end() && *it < end) pm.phase_pct = 100.0 * (*it - begin) / (end - begin);
    out.push_back(pm);
  }
  return out;
}

}  // namespace rimless
