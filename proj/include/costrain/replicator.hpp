#pragma once

#include <Eigen/Dense>
#include <vector>

#include "costrain/ode.hpp"
#include "costrain/params.hpp"

namespace costrain {

/// Pairwise invasion fitness matrix: lambda(i, j) is the invasion fitness of
/// strain i into the endemic equilibrium set by strain j alone. The diagonal
/// is exactly zero.
struct InvasionFitnessMatrix {
  int n = 0;
  Eigen::MatrixXd lambda;
  TraitMask mask;
};

/// Strain frequencies on the probability simplex.
struct SimplexState {
  Eigen::VectorXd z;

  explicit SimplexState(Eigen::VectorXd freq);
  int n() const { return static_cast<int>(z.size()); }
};

struct ReplicatorTrajectory {
  std::vector<double> taus;
  std::vector<Eigen::VectorXd> zs;
  double max_drift = 0.0;      // largest |sum z - 1| seen before renormalization
  double min_pre_clamp = 0.0;  // most negative frequency seen before clamping
};

/// Builds the invasion fitness matrix from trait deviations and the
/// normalized timescale weights of eq. Requires pert and eq to carry the
/// same mask.
InvasionFitnessMatrix invasion_fitness(const TraitPerturbations& pert,
                                       const NeutralEquilibrium& eq);

/// Replicator vector field dz_i/dtau = theta_total * z_i ((L z)_i - z' L z).
Eigen::VectorXd replicator_rhs(const SimplexState& state, const InvasionFitnessMatrix& lam,
                               double theta_total);

/// Integrates the replicator system over [0, tau_end] on a uniform grid of
/// cfg.samples points, renormalizing the simplex after each accepted step.
ReplicatorTrajectory integrate_replicator(const SimplexState& z0, const InvasionFitnessMatrix& lam,
                                          double theta_total, double tau_end,
                                          const SolverConfig& cfg);

/// Same, starting at tau0 and sampling exactly at the given ascending times.
ReplicatorTrajectory integrate_replicator_at(const SimplexState& z0,
                                             const InvasionFitnessMatrix& lam, double theta_total,
                                             double tau0, const std::vector<double>& sample_taus,
                                             const SolverConfig& cfg);

/// Specialized single-trait slow system, evaluated directly from its own
/// closed form rather than through the invasion fitness matrix; independent
/// cross-check of the general pipeline. trait must be in {1,2,3,4}.
Eigen::VectorXd per_trait_slow_rhs(const SimplexState& state, const TraitPerturbations& pert,
                                   const NeutralEquilibrium& eq, int trait);

}  // namespace costrain
