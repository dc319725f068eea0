#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "costrain/params.hpp"
#include "costrain/replicator.hpp"

namespace costrain {

/// Two-strain outcome from the signs of the mutual invasion fitnesses
/// (lambda_1^2, lambda_2^1):
///   (+,+) Coexistence, (+,-) ExclusionOf1, (-,+) ExclusionOf2,
///   (-,-) Bistability.
/// A positive lambda_1^2 means strain 1 invades a resident strain 2, so in
/// the ExclusionOf1 outcome strain 1 is the one that persists and excludes
/// strain 2 (and symmetrically for ExclusionOf2).
enum class PairwiseOutcome { Coexistence, ExclusionOf1, ExclusionOf2, Bistability };

const char* to_string(PairwiseOutcome o);

PairwiseOutcome classify_pair(double l12, double l21);

/// The strain (1 or 2) that persists in an exclusion outcome.
int surviving_strain(PairwiseOutcome o);

/// Predicted competitive-exclusion winner (0-based strain index) when only
/// transmission and/or single-clearance deviate: argmax Theta_1 b_i -
/// Theta_2 nu_i. Requires a nonempty mask within {1,2} and a strict unique
/// maximizer.
int predict_exclusion_winner(const TraitPerturbations& pert, const NeutralEquilibrium& eq);

/// Quadratic form z' Ubar z with Ubar the symmetric part of u; decreases
/// along trajectories when only co-colonization clearance deviates.
double symmetric_lyapunov(const SimplexState& state, const Eigen::MatrixXd& u);

enum class LimitKind { FixedPoint, Cycle, Undetermined };

const char* to_string(LimitKind k);

struct OutcomeReport {
  std::vector<int> persistent_set;  // 0-based strain indices
  LimitKind limit_kind = LimitKind::Undetermined;
  Eigen::VectorXd final_frequencies;
  std::map<std::string, double> diagnostics;
};

/// Strains whose windowed minimum frequency stays above threshold over the
/// trailing `window` of slow time, with an amplitude-based limit
/// classification. amplitude_tol separates a settled fixed point from a
/// sustained oscillation.
OutcomeReport detect_persistent_set(const ReplicatorTrajectory& traj, double threshold,
                                    double window, double amplitude_tol = 1e-3);

}  // namespace costrain
