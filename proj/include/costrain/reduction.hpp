#pragma once

#include <Eigen/Dense>
#include <vector>

#include "costrain/full_model.hpp"
#include "costrain/params.hpp"
#include "costrain/replicator.hpp"

namespace costrain {

/// Full state mapped to the slow/fast coordinates of the strain modes.
/// z_raw are the unnormalized slow variables; z is the simplex-renormalized
/// copy. x_dev and y_dev are the deviations of (S, I) from (S*, I*), scaled
/// by 1/epsilon when epsilon > 0.
struct SlowProjection {
  Eigen::VectorXd z_raw;
  Eigen::VectorXd z;
  Eigen::VectorXd v;
  double x_dev = 0.0;
  double y_dev = 0.0;
};

SlowProjection project_slow(const FullState& state, const StrainParameters& sp,
                            const NeutralEquilibrium& eq);

/// Diagnostic co-colonization clearance load L_i = 1/2 sum_j (u_ij I_ij +
/// u_ji I_ji).
Eigen::VectorXd co_clearance_load(const FullState& state, const Eigen::MatrixXd& u);

/// Max over tau_grid of |S(tau/eps) - S*| + sum_i |I_i(tau/eps) - I* z_i(tau)|
/// + sum_ij |I_ij(tau/eps) - (k I* T*/S*) z_i z_j|. Both trajectories must
/// contain the needed sample times (for epsilon = 0 the grids coincide).
double reduction_error(const Trajectory& full, const ReplicatorTrajectory& reduced,
                       const NeutralEquilibrium& eq, const NeutralParameters& params,
                       double epsilon, const std::vector<double>& tau_grid);

struct CompareSetup {
  NeutralParameters params;
  TraitPerturbations pert;
  double epsilon = 0.0;
  FullState initial;
  double tau_end = 50.0;
  double tau0 = -1.0;  // < 0: epsilon * burn-in
  int grid_samples = 101;
  SolverConfig solver;
};

struct CompareResult {
  NeutralEquilibrium eq;
  Trajectory full;               // sampled at t = tau/eps over the grid
  ReplicatorTrajectory reduced;  // sampled at the grid
  std::vector<double> tau_grid;
  std::vector<double> errors;
  double max_error = 0.0;
  double t_burn = 0.0;  // fast-transient burn-in used to seed z(0)
  double tau0 = 0.0;
  Eigen::VectorXd z0;  // projected frequencies at the burn-in point
};

/// Runs the full system and its replicator reduction from matching initial
/// data and evaluates the reduction error over a common slow-time grid.
/// The replicator is seeded by projecting the full state after a burn-in of
/// 10/xi so the fast modes have decayed.
CompareResult compare_full_vs_reduced(const CompareSetup& setup);

struct ScalingSetup {
  NeutralParameters params;
  TraitPerturbations pert;
  Eigen::VectorXd z0;   // initial frequencies, expanded onto the slow manifold
  double tau0 = -1.0;   // common grid start; < 0: largest epsilon * burn-in
  double tau_end = 50.0;
  int grid_samples = 101;
  SolverConfig solver;
  double noise_floor = 1e-6;  // below this the fit is flagged degenerate
};

struct ScalingReport {
  std::vector<double> epsilons;  // descending
  std::vector<double> errors;
  double fitted_slope = 0.0;
  double intercept = 0.0;
  std::vector<double> residuals;  // log-error residuals around the fit
  bool degenerate = false;
};

/// Reduction error per epsilon plus the log-log least-squares slope.
/// Requires at least 3 epsilons spanning at least a 4x range. Per-epsilon
/// integrations may run concurrently.
ScalingReport epsilon_scaling_study(const ScalingSetup& setup, std::vector<double> epsilons,
                                    int threads = 1);

}  // namespace costrain
