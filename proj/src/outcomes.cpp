#include "costrain/outcomes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace costrain {

const char* to_string(PairwiseOutcome o) {
  switch (o) {
    case PairwiseOutcome::Coexistence: return "coexistence";
    case PairwiseOutcome::ExclusionOf1: return "exclusion_of_1";
    case PairwiseOutcome::ExclusionOf2: return "exclusion_of_2";
    case PairwiseOutcome::Bistability: return "bistability";
  }
  return "?";
}

const char* to_string(LimitKind k) {
  switch (k) {
    case LimitKind::FixedPoint: return "fixed_point";
    case LimitKind::Cycle: return "cycle";
    case LimitKind::Undetermined: return "undetermined";
  }
  return "?";
}

PairwiseOutcome classify_pair(double l12, double l21) {
  if (l12 == 0.0 || l21 == 0.0)
    throw ValidationError(
        "classify_pair: zero invasion fitness is a non-generic boundary; outcome undetermined");
  if (l12 > 0.0) return l21 > 0.0 ? PairwiseOutcome::Coexistence : PairwiseOutcome::ExclusionOf1;
  return l21 > 0.0 ? PairwiseOutcome::ExclusionOf2 : PairwiseOutcome::Bistability;
}

int surviving_strain(PairwiseOutcome o) {
  if (o == PairwiseOutcome::ExclusionOf1) return 1;
  if (o == PairwiseOutcome::ExclusionOf2) return 2;
  throw ValidationError("surviving_strain: outcome has no single survivor");
}

int predict_exclusion_winner(const TraitPerturbations& pert, const NeutralEquilibrium& eq) {
  pert.validate();
  if (!(pert.mask == eq.mask))
    throw ValidationError("predict_exclusion_winner: perturbation mask " + pert.mask.str() +
                          " does not match equilibrium mask " + eq.mask.str());
  if (pert.mask.empty() || pert.mask.active(3) || pert.mask.active(4) || pert.mask.active(5))
    throw ValidationError("predict_exclusion_winner requires a nonempty mask within {1,2}, got " +
                          pert.mask.str());

  const Eigen::VectorXd score =
      eq.theta_raw[0] * pert.b - eq.theta_raw[1] * pert.nu;
  int best = 0;
  for (int i = 1; i < pert.n; ++i)
    if (score(i) > score(best)) best = i;
  for (int i = 0; i < pert.n; ++i)
    if (i != best && score(i) == score(best))
      throw ValidationError("predict_exclusion_winner: strains " + std::to_string(best + 1) +
                            " and " + std::to_string(i + 1) +
                            " tie for the maximal score; no strict winner");
  return best;
}

double symmetric_lyapunov(const SimplexState& state, const Eigen::MatrixXd& u) {
  if (u.rows() != state.n() || u.cols() != state.n())
    throw ValidationError("symmetric_lyapunov: matrix size does not match state");
  const Eigen::MatrixXd ubar = 0.5 * (u + u.transpose());
  return state.z.dot(ubar * state.z);
}

OutcomeReport detect_persistent_set(const ReplicatorTrajectory& traj, double threshold,
                                    double window, double amplitude_tol) {
  if (traj.taus.size() < 4) throw ValidationError("trajectory too short for persistence analysis");
  const double tau_end = traj.taus.back();
  const double tau_begin = traj.taus.front();
  if (!(window > 0.0) || window > tau_end - tau_begin)
    throw ValidationError("analysis window " + std::to_string(window) +
                          " does not fit the trajectory span " +
                          std::to_string(tau_end - tau_begin));

  const double w_start = tau_end - window;
  const double w_mid = tau_end - 0.5 * window;
  std::size_t first = 0;
  while (first < traj.taus.size() && traj.taus[first] < w_start) ++first;
  if (traj.taus.size() - first < 3)
    throw ValidationError("analysis window contains too few samples");

  const int n = static_cast<int>(traj.zs.front().size());
  Eigen::VectorXd lo = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  Eigen::VectorXd hi = Eigen::VectorXd::Constant(n, -std::numeric_limits<double>::infinity());
  Eigen::VectorXd lo2 = lo, hi2 = hi;  // second half of the window
  for (std::size_t s = first; s < traj.taus.size(); ++s) {
    lo = lo.cwiseMin(traj.zs[s]);
    hi = hi.cwiseMax(traj.zs[s]);
    if (traj.taus[s] >= w_mid) {
      lo2 = lo2.cwiseMin(traj.zs[s]);
      hi2 = hi2.cwiseMax(traj.zs[s]);
    }
  }

  OutcomeReport rep;
  rep.final_frequencies = traj.zs.back();
  double amp_max = 0.0, amp2_max = 0.0;
  bool all_settled = true, all_sustained = true;
  for (int i = 0; i < n; ++i) {
    if (lo(i) <= threshold) continue;
    rep.persistent_set.push_back(i);
    const double amp = hi(i) - lo(i);
    const double amp2 = hi2(i) - lo2(i);
    amp_max = std::max(amp_max, amp);
    amp2_max = std::max(amp2_max, amp2);
    if (amp >= amplitude_tol) all_settled = false;
    // Sustained means the oscillation neither collapses across the window
    // nor sits below the amplitude tolerance.
    if (amp2 < amplitude_tol || amp2 < 0.5 * amp) all_sustained = false;
  }

  if (rep.persistent_set.empty())
    rep.limit_kind = LimitKind::Undetermined;
  else if (all_settled)
    rep.limit_kind = LimitKind::FixedPoint;
  else if (all_sustained)
    rep.limit_kind = LimitKind::Cycle;
  else
    rep.limit_kind = LimitKind::Undetermined;

  rep.diagnostics["window"] = window;
  rep.diagnostics["threshold"] = threshold;
  rep.diagnostics["amplitude_tol"] = amplitude_tol;
  rep.diagnostics["amplitude_max"] = amp_max;
  rep.diagnostics["amplitude_max_late"] = amp2_max;
  rep.diagnostics["simplex_drift_max"] = traj.max_drift;
  return rep;
}

}  // namespace costrain
