#include "costrain/replicator.hpp"

#include <cmath>
#include <string>

namespace costrain {

namespace {
constexpr double kSumTol = 1e-9;       // admissible |sum z - 1| on construction and output
constexpr double kDriftAbort = 1e-6;   // pre-renormalization drift that aborts a run
constexpr double kNegAbort = -1e-9;    // frequency excursion that aborts a run
}  // namespace

SimplexState::SimplexState(Eigen::VectorXd freq) : z(std::move(freq)) {
  if (z.size() < 1) throw ValidationError("SimplexState needs at least one strain");
  if ((z.array() < 0.0).any())
    throw ValidationError("SimplexState frequencies must be nonnegative");
  if (std::abs(z.sum() - 1.0) > kSumTol)
    throw ValidationError("SimplexState frequencies sum to " + std::to_string(z.sum()) +
                          ", expected 1 within 1e-9");
}

InvasionFitnessMatrix invasion_fitness(const TraitPerturbations& pert,
                                       const NeutralEquilibrium& eq) {
  pert.validate();
  if (!(pert.mask == eq.mask))
    throw ValidationError("invasion_fitness: perturbation mask " + pert.mask.str() +
                          " does not match equilibrium mask " + eq.mask.str());
  const int n = pert.n;
  const double th1 = eq.theta_norm[0], th2 = eq.theta_norm[1], th3 = eq.theta_norm[2],
               th4 = eq.theta_norm[3], th5 = eq.theta_norm[4];

  InvasionFitnessMatrix out;
  out.n = n;
  out.mask = pert.mask;
  out.lambda.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      out.lambda(i, j) = th1 * (pert.b(i) - pert.b(j)) + th2 * (pert.nu(j) - pert.nu(i)) +
                         th3 * (-pert.u(i, j) - pert.u(j, i) + 2.0 * pert.u(j, j)) +
                         th4 * (pert.omega(i, j) - pert.omega(j, i)) +
                         th5 * (eq.mu * (pert.alpha(j, i) - pert.alpha(i, j)) +
                                pert.alpha(j, i) - pert.alpha(j, j));
    }
  return out;
}

Eigen::VectorXd replicator_rhs(const SimplexState& state, const InvasionFitnessMatrix& lam,
                               double theta_total) {
  const Eigen::VectorXd& z = state.z;
  if (static_cast<int>(z.size()) != lam.n)
    throw ValidationError("replicator_rhs: state and matrix disagree on strain count");
  const Eigen::VectorXd g = lam.lambda * z;
  const double mean_fitness = z.dot(g);
  return theta_total * (z.array() * (g.array() - mean_fitness)).matrix();
}

namespace {

ReplicatorTrajectory integrate_replicator_impl(const SimplexState& z0,
                                               const InvasionFitnessMatrix& lam,
                                               double theta_total, double tau0,
                                               const std::vector<double>& sample_taus,
                                               const SolverConfig& cfg) {
  if (static_cast<int>(z0.z.size()) != lam.n)
    throw ValidationError("integrate_replicator: state and matrix disagree on strain count");

  ReplicatorTrajectory traj;
  traj.min_pre_clamp = z0.z.minCoeff();
  traj.taus.reserve(sample_taus.size());
  traj.zs.reserve(sample_taus.size());

  auto rhs = [&](double, const Eigen::VectorXd& z, Eigen::VectorXd& dz) {
    const Eigen::VectorXd g = lam.lambda * z;
    const double mean_fitness = z.dot(g);
    dz = theta_total * (z.array() * (g.array() - mean_fitness)).matrix();
  };
  auto post_step = [&](double tau, Eigen::VectorXd& z) {
    const double mn = z.minCoeff();
    traj.min_pre_clamp = std::min(traj.min_pre_clamp, mn);
    if (mn < kNegAbort)
      throw NumericalError("replicator frequency dipped to " + std::to_string(mn) + " at tau = " +
                           std::to_string(tau));
    const double drift = std::abs(z.sum() - 1.0);
    traj.max_drift = std::max(traj.max_drift, drift);
    if (drift > kDriftAbort)
      throw NumericalError("replicator simplex drift " + std::to_string(drift) + " at tau = " +
                           std::to_string(tau) + " exceeds 1e-6; solver misconfigured");
    z = z.cwiseMax(0.0);
    z /= z.sum();
  };
  auto on_sample = [&](double tau, const Eigen::VectorXd& z) {
    traj.taus.push_back(tau);
    traj.zs.push_back(z);
  };

  integrate_dopri5(rhs, z0.z, tau0, sample_taus, cfg, on_sample, post_step);
  return traj;
}

}  // namespace

ReplicatorTrajectory integrate_replicator(const SimplexState& z0, const InvasionFitnessMatrix& lam,
                                          double theta_total, double tau_end,
                                          const SolverConfig& cfg) {
  if (!(tau_end > 0.0)) throw ValidationError("tau_end must be > 0");
  return integrate_replicator_impl(z0, lam, theta_total, 0.0,
                                   uniform_grid(0.0, tau_end, cfg.samples), cfg);
}

ReplicatorTrajectory integrate_replicator_at(const SimplexState& z0,
                                             const InvasionFitnessMatrix& lam, double theta_total,
                                             double tau0, const std::vector<double>& sample_taus,
                                             const SolverConfig& cfg) {
  return integrate_replicator_impl(z0, lam, theta_total, tau0, sample_taus, cfg);
}

Eigen::VectorXd per_trait_slow_rhs(const SimplexState& state, const TraitPerturbations& pert,
                                   const NeutralEquilibrium& eq, int trait) {
  pert.validate();
  const Eigen::VectorXd& z = state.z;
  if (static_cast<int>(z.size()) != pert.n)
    throw ValidationError("per_trait_slow_rhs: state and perturbations disagree on strain count");
  const double theta = (trait >= 1 && trait <= 5) ? eq.theta_raw[static_cast<std::size_t>(trait - 1)]
                                                  : 0.0;
  const int n = pert.n;
  Eigen::VectorXd dz(n);
  switch (trait) {
    case 1: {
      const double mean_b = pert.b.dot(z);
      dz = theta * (z.array() * (pert.b.array() - mean_b)).matrix();
      break;
    }
    case 2: {
      const double mean_nu = pert.nu.dot(z);
      dz = theta * (z.array() * (mean_nu - pert.nu.array())).matrix();
      break;
    }
    case 3: {
      const Eigen::MatrixXd usym = pert.u + pert.u.transpose();
      const Eigen::VectorXd load = usym * z;  // sum_j (u_ij + u_ji) z_j
      const double mean_load = z.dot(load);
      dz = theta * (z.array() * (mean_load - load.array())).matrix();
      break;
    }
    case 4: {
      const Eigen::VectorXd adv = (pert.omega - pert.omega.transpose()) * z;
      dz = theta * z.cwiseProduct(adv);
      break;
    }
    default:
      throw ValidationError("per_trait_slow_rhs: trait must be in 1..4, got " +
                            std::to_string(trait));
  }
  return dz;
}

}  // namespace costrain
