#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>

#include "costrain/full_model.hpp"
#include "costrain/params.hpp"

namespace costrain {

/// Analysis knobs for persistence detection and the scaling study.
struct AnalysisConfig {
  double threshold = 1e-3;        // persistence frequency threshold
  double window_fraction = 0.2;   // trailing fraction of the run to analyze
  double amplitude_tol = 1e-3;    // fixed point vs sustained oscillation
  double noise_floor = 1e-6;      // scaling errors below this are degenerate
};

struct ScalingConfig {
  std::vector<double> epsilons{0.1, 0.05, 0.025, 0.0125};
  double tau0 = -1.0;  // < 0: derived from the burn-in of the largest epsilon
  double tau_end = 50.0;
  int grid_samples = 101;
};

/// A fully materialized run description. Deviation arrays given as seeded
/// random specs in the file are expanded at load time.
struct Scenario {
  std::string name;
  int schema_version = 1;
  NeutralParameters neutral;
  TraitPerturbations perturbations;
  double epsilon = 0.0;
  std::optional<Eigen::VectorXd> initial_frequencies;  // exactly one of these
  std::optional<FullState> initial_state;              // two is set
  double t_end = 0.0;    // fast-time horizon (defaults to tau_end / epsilon)
  double tau_end = 0.0;  // slow-time horizon
  SolverConfig solver;
  AnalysisConfig analysis;
  ScalingConfig scaling;
  std::uint64_t hash = 0;  // FNV-1a of the canonical scenario JSON
};

/// Loads and validates a scenario file, materializing any seeded random
/// deviation arrays. seed_override, when set, replaces the per-array seeds.
Scenario load_scenario(const std::string& path,
                       std::optional<std::uint64_t> seed_override = std::nullopt);

/// Parses scenario JSON text (same schema as the file contents).
Scenario parse_scenario(const std::string& json_text,
                        std::optional<std::uint64_t> seed_override = std::nullopt);

/// Initial full state: explicit state if given, otherwise the slow-manifold
/// expansion of the initial frequencies.
FullState scenario_initial_state(const Scenario& sc, const NeutralEquilibrium& eq);

/// Initial frequencies: explicit if given, otherwise projected from the
/// explicit initial state.
Eigen::VectorXd scenario_initial_frequencies(const Scenario& sc, const NeutralEquilibrium& eq);

}  // namespace costrain
