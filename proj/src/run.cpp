#include "costrain/run.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace costrain {

namespace {

using nlohmann::ordered_json;

std::string num17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string hash_hex(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ordered_json vec_json(const Eigen::VectorXd& v) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

ordered_json mat_json(const Eigen::MatrixXd& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

ordered_json mask_json(const TraitMask& m) {
  ordered_json a = ordered_json::array();
  for (int d : m.dims()) a.push_back(d);
  return a;
}

struct Resolved {
  Scenario sc;  // with overrides applied
  NeutralEquilibrium eq;
  StrainParameters sp;
};

Resolved resolve(const Scenario& scenario, const RunOptions& opt) {
  Resolved r{scenario, {}, {}};
  if (opt.epsilon) {
    r.sc.epsilon = *opt.epsilon;
    if (scenario.t_end <= 0.0 || !opt.t_end)
      r.sc.t_end = r.sc.epsilon > 0.0 ? r.sc.tau_end / r.sc.epsilon : r.sc.tau_end;
  }
  if (opt.tau_end) r.sc.tau_end = *opt.tau_end;
  if (opt.t_end) r.sc.t_end = *opt.t_end;
  if (opt.samples) r.sc.solver.samples = *opt.samples;
  r.sc.solver.validate();
  r.eq = neutral_equilibrium(r.sc.neutral, r.sc.perturbations.mask);
  r.sp = realize_traits(r.sc.neutral, r.sc.perturbations, r.sc.epsilon);
  return r;
}

ordered_json provenance(const Resolved& r) {
  ordered_json p;
  p["scenario"] = r.sc.name;
  p["scenario_hash"] = hash_hex(r.sc.hash);
  p["tool_version"] = kToolVersion;
  p["epsilon"] = r.sc.epsilon;
  p["mask"] = mask_json(r.sc.perturbations.mask);
  p["solver"] = {{"rtol", r.sc.solver.rtol},
                 {"atol", r.sc.solver.atol},
                 {"max_step", r.sc.solver.max_step},
                 {"samples", r.sc.solver.samples}};
  return p;
}

std::vector<std::string> provenance_comments(const Resolved& r) {
  return {"scenario: " + r.sc.name, "scenario_hash: " + hash_hex(r.sc.hash),
          "tool_version: " + std::string(kToolVersion),
          "epsilon: " + num17(r.sc.epsilon) + "  mask: " + r.sc.perturbations.mask.str()};
}

ordered_json equilibrium_json(const NeutralEquilibrium& eq) {
  ordered_json e;
  e["s_star"] = eq.s_star;
  e["t_star"] = eq.t_star;
  e["i_star"] = eq.i_star;
  e["d_star"] = eq.d_star;
  e["mu"] = eq.mu;
  e["xi"] = eq.xi;
  e["det_p"] = eq.det_p;
  e["theta_raw"] = {eq.theta_raw[0], eq.theta_raw[1], eq.theta_raw[2], eq.theta_raw[3],
                    eq.theta_raw[4]};
  e["theta_total"] = eq.theta_total;
  e["theta_norm"] = {eq.theta_norm[0], eq.theta_norm[1], eq.theta_norm[2], eq.theta_norm[3],
                     eq.theta_norm[4]};
  return e;
}

ordered_json outcome_json(const OutcomeReport& rep) {
  ordered_json o;
  ordered_json strains = ordered_json::array();
  for (int i : rep.persistent_set) strains.push_back(i + 1);  // 1-based in reports
  o["persistent_set"] = strains;
  o["limit_kind"] = to_string(rep.limit_kind);
  o["final_frequencies"] = vec_json(rep.final_frequencies);
  ordered_json diag;
  for (const auto& [key, val] : rep.diagnostics) diag[key] = val;
  o["diagnostics"] = diag;
  return o;
}

OutcomeReport analyze(const Scenario& sc, const ReplicatorTrajectory& traj) {
  const double span = traj.taus.back() - traj.taus.front();
  return detect_persistent_set(traj, sc.analysis.threshold, sc.analysis.window_fraction * span,
                               sc.analysis.amplitude_tol);
}

}  // namespace

std::string CsvTable::to_text() const {
  std::ostringstream os;
  for (const auto& c : comments) os << "# " << c << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i)
    os << columns[i] << (i + 1 < columns.size() ? "," : "");
  os << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      os << num17(row[i]) << (i + 1 < row.size() ? "," : "");
    os << "\n";
  }
  return os.str();
}

RunArtifacts run_simulate_full(const Scenario& scenario, const RunOptions& opt) {
  const Resolved r = resolve(scenario, opt);
  const FullState init = scenario_initial_state(r.sc, r.eq);
  const Trajectory traj = integrate_full(init, r.sp, r.sc.neutral, r.sc.t_end, r.sc.solver);
  const int n = init.n();

  CsvTable tab;
  tab.name = "full";
  tab.comments = provenance_comments(r);
  tab.comments.push_back(
      "columns: t, s, T, I, D, i_<strain>, d_<first>_<second> (strains 1-based)");
  tab.columns = {"t", "s", "T", "I", "D"};
  for (int i = 0; i < n; ++i) tab.columns.push_back("i_" + std::to_string(i + 1));
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < n; ++c)
      tab.columns.push_back("d_" + std::to_string(i + 1) + "_" + std::to_string(c + 1));
  for (std::size_t s = 0; s < traj.times.size(); ++s) {
    const FullState& st = traj.states[s];
    const auto [tt, ii, dd] = neutral_scalar_observables(st);
    std::vector<double> row{traj.times[s], st.s, tt, ii, dd};
    for (int i = 0; i < n; ++i) row.push_back(st.i_single(i));
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < n; ++c) row.push_back(st.i_double(i, c));
    tab.rows.push_back(std::move(row));
  }

  const auto [tt, ii, dd] = neutral_scalar_observables(traj.states.back());
  RunArtifacts art;
  art.report["provenance"] = provenance(r);
  art.report["equilibrium"] = equilibrium_json(r.eq);
  art.report["t_end"] = r.sc.t_end;
  art.report["final"] = {{"t", traj.times.back()},
                         {"s", traj.states.back().s},
                         {"T", tt},
                         {"I", ii},
                         {"D", dd},
                         {"mass", traj.states.back().total_mass()}};
  art.tables.push_back(std::move(tab));
  return art;
}

RunArtifacts run_simulate_reduced(const Scenario& scenario, const RunOptions& opt) {
  const Resolved r = resolve(scenario, opt);
  const InvasionFitnessMatrix lam = invasion_fitness(r.sc.perturbations, r.eq);
  const Eigen::VectorXd z0 = scenario_initial_frequencies(r.sc, r.eq);
  const ReplicatorTrajectory traj =
      integrate_replicator(SimplexState(z0), lam, r.eq.theta_total, r.sc.tau_end, r.sc.solver);
  const OutcomeReport rep = analyze(r.sc, traj);
  const int n = lam.n;

  CsvTable tab;
  tab.name = "reduced";
  tab.comments = provenance_comments(r);
  tab.comments.push_back("columns: tau, z_<strain> (strains 1-based)");
  tab.columns = {"tau"};
  for (int i = 0; i < n; ++i) tab.columns.push_back("z_" + std::to_string(i + 1));
  for (std::size_t s = 0; s < traj.taus.size(); ++s) {
    std::vector<double> row{traj.taus[s]};
    for (int i = 0; i < n; ++i) row.push_back(traj.zs[s](i));
    tab.rows.push_back(std::move(row));
  }

  RunArtifacts art;
  art.report["provenance"] = provenance(r);
  art.report["equilibrium"] = equilibrium_json(r.eq);
  art.report["lambda"] = mat_json(lam.lambda);
  art.report["tau_end"] = r.sc.tau_end;
  art.report["outcome"] = outcome_json(rep);
  art.report["simplex_drift_max"] = traj.max_drift;
  art.tables.push_back(std::move(tab));
  return art;
}

RunArtifacts run_compare(const Scenario& scenario, const RunOptions& opt) {
  const Resolved r = resolve(scenario, opt);
  CompareSetup cs;
  cs.params = r.sc.neutral;
  cs.pert = r.sc.perturbations;
  cs.epsilon = r.sc.epsilon;
  cs.initial = scenario_initial_state(r.sc, r.eq);
  cs.tau_end = r.sc.tau_end;
  cs.grid_samples = r.sc.solver.samples;
  cs.solver = r.sc.solver;
  const CompareResult res = compare_full_vs_reduced(cs);
  const OutcomeReport rep = analyze(r.sc, res.reduced);
  const int n = cs.initial.n();

  CsvTable tab;
  tab.name = "compare";
  tab.comments = provenance_comments(r);
  tab.comments.push_back(
      "columns: tau, t = tau/epsilon, error (|S-S*| + sum|I_i - I* z_i| + sum|I_ij - kI*T*/S* "
      "z_i z_j|), z_red_<strain> (replicator), z_full_<strain> (projected from the full system)");
  tab.columns = {"tau", "t", "error"};
  for (int i = 0; i < n; ++i) tab.columns.push_back("z_red_" + std::to_string(i + 1));
  for (int i = 0; i < n; ++i) tab.columns.push_back("z_full_" + std::to_string(i + 1));
  for (std::size_t g = 0; g < res.tau_grid.size(); ++g) {
    const double tau = res.tau_grid[g];
    const double t = cs.epsilon > 0.0 ? tau / cs.epsilon : tau;
    std::vector<double> row{tau, t, res.errors[g]};
    for (int i = 0; i < n; ++i) row.push_back(res.reduced.zs[g](i));
    const Eigen::VectorXd zf = project_slow(res.full.states[g], r.sp, r.eq).z;
    for (int i = 0; i < n; ++i) row.push_back(zf(i));
    tab.rows.push_back(std::move(row));
  }

  RunArtifacts art;
  art.report["provenance"] = provenance(r);
  art.report["equilibrium"] = equilibrium_json(r.eq);
  art.report["tau0"] = res.tau0;
  art.report["t_burn"] = res.t_burn;
  art.report["z0"] = vec_json(res.z0);
  art.report["max_error"] = res.max_error;
  art.report["outcome"] = outcome_json(rep);
  art.tables.push_back(std::move(tab));
  return art;
}

RunArtifacts run_classify(const Scenario& scenario, const RunOptions& opt) {
  const Resolved r = resolve(scenario, opt);
  const InvasionFitnessMatrix lam = invasion_fitness(r.sc.perturbations, r.eq);
  const int n = lam.n;

  ordered_json pairs = ordered_json::array();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      ordered_json p;
      p["i"] = i + 1;
      p["j"] = j + 1;
      p["lambda_ij"] = lam.lambda(i, j);
      p["lambda_ji"] = lam.lambda(j, i);
      try {
        p["outcome"] = to_string(classify_pair(lam.lambda(i, j), lam.lambda(j, i)));
      } catch (const ValidationError&) {
        p["outcome"] = "boundary";
      }
      pairs.push_back(std::move(p));
    }

  RunArtifacts art;
  art.report["provenance"] = provenance(r);
  art.report["equilibrium"] = equilibrium_json(r.eq);
  art.report["lambda"] = mat_json(lam.lambda);
  art.report["pairwise_outcomes"] = pairs;

  try {
    const int w = predict_exclusion_winner(r.sc.perturbations, r.eq);
    art.report["predicted_winner"] = w + 1;
  } catch (const ValidationError&) {
    // Not an exclusion-by-score regime (mask outside {1,2} or tied scores).
  }

  const Eigen::VectorXd z0 = scenario_initial_frequencies(r.sc, r.eq);
  const ReplicatorTrajectory traj =
      integrate_replicator(SimplexState(z0), lam, r.eq.theta_total, r.sc.tau_end, r.sc.solver);
  art.report["outcome"] = outcome_json(analyze(r.sc, traj));

  CsvTable tab;
  tab.name = "lambda";
  tab.comments = provenance_comments(r);
  tab.comments.push_back("pairwise invasion fitness lambda(i,j): row strain invades column strain");
  for (int j = 0; j < n; ++j) tab.columns.push_back("lambda_vs_" + std::to_string(j + 1));
  for (int i = 0; i < n; ++i) {
    std::vector<double> row;
    for (int j = 0; j < n; ++j) row.push_back(lam.lambda(i, j));
    tab.rows.push_back(std::move(row));
  }
  art.tables.push_back(std::move(tab));
  return art;
}

RunArtifacts run_scaling(const Scenario& scenario, const RunOptions& opt) {
  const Resolved r = resolve(scenario, opt);
  ScalingSetup ss;
  ss.params = r.sc.neutral;
  ss.pert = r.sc.perturbations;
  ss.z0 = scenario_initial_frequencies(r.sc, r.eq);
  ss.tau0 = r.sc.scaling.tau0;
  ss.tau_end = r.sc.scaling.tau_end;
  ss.grid_samples = r.sc.scaling.grid_samples;
  ss.solver = r.sc.solver;
  ss.noise_floor = r.sc.analysis.noise_floor;
  const std::vector<double> epsilons = opt.epsilons ? *opt.epsilons : r.sc.scaling.epsilons;
  const ScalingReport rep = epsilon_scaling_study(ss, epsilons, opt.threads);

  RunArtifacts art;
  art.report["provenance"] = provenance(r);
  art.report["equilibrium"] = equilibrium_json(r.eq);
  art.report["tau_end"] = ss.tau_end;
  art.report["epsilons"] = rep.epsilons;
  art.report["errors"] = rep.errors;
  art.report["fitted_slope"] = rep.fitted_slope;
  art.report["intercept"] = rep.intercept;
  art.report["residuals"] = rep.residuals;
  art.report["degenerate"] = rep.degenerate;

  CsvTable tab;
  tab.name = "scaling";
  tab.comments = provenance_comments(r);
  tab.comments.push_back("columns: epsilon, max reduction error over the tau grid, log residual");
  tab.columns = {"epsilon", "error", "residual"};
  for (std::size_t i = 0; i < rep.epsilons.size(); ++i)
    tab.rows.push_back({rep.epsilons[i], rep.errors[i], rep.residuals[i]});
  art.tables.push_back(std::move(tab));
  return art;
}

std::vector<std::string> write_artifacts(const RunArtifacts& art, const std::string& out_dir,
                                         const std::string& format, const std::string& stem) {
  if (format != "csv" && format != "json" && format != "both")
    throw ValidationError("format must be csv, json or both, got '" + format + "'");
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  std::vector<std::string> written;
  if (format == "json" || format == "both") {
    const fs::path p = fs::path(out_dir) / (stem + "_report.json");
    std::ofstream out(p);
    out << art.report.dump(2) << "\n";
    written.push_back(p.string());
  }
  if (format == "csv" || format == "both") {
    for (const auto& tab : art.tables) {
      const fs::path p = fs::path(out_dir) / (stem + "_" + tab.name + ".csv");
      std::ofstream out(p);
      out << tab.to_text();
      written.push_back(p.string());
    }
  }
  return written;
}

}  // namespace costrain
