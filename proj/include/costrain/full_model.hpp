#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "costrain/ode.hpp"
#include "costrain/params.hpp"

namespace costrain {

/// Host-population state over the 1 + N + N^2 compartments. The first index
/// of i_double is the first-acquired strain; the diagonal holds same-strain
/// co-colonization.
struct FullState {
  double s = 0.0;
  Eigen::VectorXd i_single;
  Eigen::MatrixXd i_double;

  static FullState zero(int n);
  int n() const { return static_cast<int>(i_single.size()); }
  double total_mass() const { return s + i_single.sum() + i_double.sum(); }

  Eigen::VectorXd pack() const;
  static FullState unpack(const Eigen::VectorXd& y, int n);
  void validate(double tol = 1e-9) const;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<FullState> states;
};

/// Effective transmitting fraction J_i for each strain, combining
/// singly-colonized hosts and both orderings of mixed carriage.
/// The force of infection of strain i is beta_i * J_i.
Eigen::VectorXd force_of_infection(const FullState& state, const StrainParameters& sp);

/// Time derivative of the full compartmental system.
FullState full_rhs(const FullState& state, const StrainParameters& sp,
                   const NeutralParameters& params);

/// (T, I, D): total infected, singly-infected and co-colonized fractions.
std::array<double, 3> neutral_scalar_observables(const FullState& state);

/// Integrates the full system over [0, t_end], sampling on a uniform grid of
/// cfg.samples points.
Trajectory integrate_full(const FullState& state0, const StrainParameters& sp,
                          const NeutralParameters& params, double t_end, const SolverConfig& cfg);

/// Same, but sampling exactly at the given ascending times (first >= 0).
Trajectory integrate_full_at(const FullState& state0, const StrainParameters& sp,
                             const NeutralParameters& params,
                             const std::vector<double>& sample_times, const SolverConfig& cfg);

/// State on the slow manifold for frequencies z: S = S*, I_i = I* z_i,
/// I_ij = (k I* T* / S*) z_i z_j.
FullState slow_manifold_state(const Eigen::VectorXd& z, const NeutralParameters& params,
                              const NeutralEquilibrium& eq);

}  // namespace costrain
