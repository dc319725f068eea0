#include "costrain/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <string>

namespace costrain {

namespace {

std::size_t locate_time(const std::vector<double>& times, double t, const char* what) {
  const auto it = std::lower_bound(times.begin(), times.end(), t - 1e-9);
  const double tol = 1e-7 * std::max(1.0, std::abs(t));
  if (it != times.end() && std::abs(*it - t) <= tol)
    return static_cast<std::size_t>(it - times.begin());
  if (it != times.begin() && std::abs(*(it - 1) - t) <= tol)
    return static_cast<std::size_t>(it - times.begin() - 1);
  throw ValidationError(std::string(what) + " trajectory does not cover requested time " +
                        std::to_string(t));
}

double lemma_error_norm(const FullState& st, const Eigen::VectorXd& z,
                        const NeutralEquilibrium& eq, double k) {
  const double coeff = k * eq.i_star * eq.t_star / eq.s_star;
  double err = std::abs(st.s - eq.s_star);
  err += (st.i_single - eq.i_star * z).cwiseAbs().sum();
  err += (st.i_double - coeff * (z * z.transpose())).cwiseAbs().sum();
  return err;
}

}  // namespace

SlowProjection project_slow(const FullState& state, const StrainParameters& sp,
                            const NeutralEquilibrium& eq) {
  const Eigen::VectorXd j = force_of_infection(state, sp);
  SlowProjection out;
  out.v = (eq.t_star * state.i_single - eq.i_star * j) / eq.det_p;
  out.z_raw = (-eq.d_star * state.i_single + 2.0 * eq.t_star * j) / eq.det_p;

  const double scale = sp.epsilon > 0.0 ? 1.0 / sp.epsilon : 1.0;
  const auto [t_obs, i_obs, d_obs] = neutral_scalar_observables(state);
  (void)t_obs;
  (void)d_obs;
  out.x_dev = (eq.s_star - state.s) * scale;
  out.y_dev = (i_obs - eq.i_star) * scale;

  Eigen::VectorXd zc = out.z_raw.cwiseMax(0.0);
  const double total = zc.sum();
  if (!(total > 1e-12))
    throw ValidationError("project_slow: projected frequencies have no positive mass");
  out.z = zc / total;
  return out;
}

Eigen::VectorXd co_clearance_load(const FullState& state, const Eigen::MatrixXd& u) {
  if (u.rows() != state.n() || u.cols() != state.n())
    throw ValidationError("co_clearance_load: u must be n x n");
  return 0.5 * (u.cwiseProduct(state.i_double).rowwise().sum() +
                u.transpose().cwiseProduct(state.i_double.transpose()).rowwise().sum());
}

double reduction_error(const Trajectory& full, const ReplicatorTrajectory& reduced,
                       const NeutralEquilibrium& eq, const NeutralParameters& params,
                       double epsilon, const std::vector<double>& tau_grid) {
  if (tau_grid.empty()) throw ValidationError("reduction_error: empty tau grid");
  double worst = 0.0;
  for (double tau : tau_grid) {
    const double t = epsilon > 0.0 ? tau / epsilon : tau;
    const std::size_t fi = locate_time(full.times, t, "full");
    const std::size_t ri = locate_time(reduced.taus, tau, "reduced");
    worst = std::max(worst,
                     lemma_error_norm(full.states[fi], reduced.zs[ri], eq, params.k));
  }
  return worst;
}

CompareResult compare_full_vs_reduced(const CompareSetup& setup) {
  const NeutralEquilibrium eq = neutral_equilibrium(setup.params, setup.pert.mask);
  const StrainParameters sp = realize_traits(setup.params, setup.pert, setup.epsilon);
  if (setup.grid_samples < 2) throw ValidationError("grid_samples must be >= 2");
  if (!(setup.tau_end > 0.0)) throw ValidationError("tau_end must be > 0");

  CompareResult res;
  res.eq = eq;
  res.t_burn = 10.0 / eq.xi;

  const double eps = setup.epsilon;
  const double tau_burn = eps > 0.0 ? eps * res.t_burn : res.t_burn;
  res.tau0 = std::max(setup.tau0, tau_burn);
  if (!(res.tau0 < setup.tau_end))
    throw ValidationError("tau0 = " + std::to_string(res.tau0) +
                          " does not leave room before tau_end = " + std::to_string(setup.tau_end));
  res.tau_grid = uniform_grid(res.tau0, setup.tau_end, setup.grid_samples);

  // Full run: burn-in point plus the slow-time grid mapped to fast time.
  // The burn-in can coincide with the first grid point.
  std::vector<double> t_samples;
  t_samples.reserve(res.tau_grid.size() + 1);
  t_samples.push_back(res.t_burn);
  for (double tau : res.tau_grid) {
    const double t = eps > 0.0 ? tau / eps : tau;
    if (t > t_samples.back() + 1e-9 * std::max(1.0, std::abs(t))) t_samples.push_back(t);
  }
  const Trajectory full_all =
      integrate_full_at(setup.initial, sp, setup.params, t_samples, setup.solver);

  const std::size_t burn_idx = locate_time(full_all.times, res.t_burn, "full");
  res.z0 = project_slow(full_all.states[burn_idx], sp, eq).z;

  // Grid-aligned view of the full run.
  res.full.times.reserve(res.tau_grid.size());
  res.full.states.reserve(res.tau_grid.size());
  for (double tau : res.tau_grid) {
    const double t = eps > 0.0 ? tau / eps : tau;
    const std::size_t fi = locate_time(full_all.times, t, "full");
    res.full.times.push_back(full_all.times[fi]);
    res.full.states.push_back(full_all.states[fi]);
  }

  const InvasionFitnessMatrix lam = invasion_fitness(setup.pert, eq);
  res.reduced = integrate_replicator_at(SimplexState(res.z0), lam, eq.theta_total, tau_burn,
                                        res.tau_grid, setup.solver);

  res.errors.reserve(res.tau_grid.size());
  for (std::size_t g = 0; g < res.tau_grid.size(); ++g) {
    const double tau = res.tau_grid[g];
    const double t = eps > 0.0 ? tau / eps : tau;
    const std::size_t fi = locate_time(res.full.times, t, "full");
    res.errors.push_back(
        lemma_error_norm(res.full.states[fi], res.reduced.zs[g], eq, setup.params.k));
  }
  res.max_error = *std::max_element(res.errors.begin(), res.errors.end());
  return res;
}

ScalingReport epsilon_scaling_study(const ScalingSetup& setup, std::vector<double> epsilons,
                                    int threads) {
  if (epsilons.size() < 3)
    throw ValidationError("epsilon scaling study needs at least 3 epsilons");
  std::sort(epsilons.begin(), epsilons.end(), std::greater<>());
  for (double e : epsilons)
    if (!(e > 0.0)) throw ValidationError("epsilons must be > 0");
  if (epsilons.front() < 4.0 * epsilons.back())
    throw ValidationError("epsilons must span at least a 4x range");

  const NeutralEquilibrium eq = neutral_equilibrium(setup.params, setup.pert.mask);
  const double t_burn = 10.0 / eq.xi;
  const double tau0_common = std::max(setup.tau0, epsilons.front() * t_burn);
  const FullState init = slow_manifold_state(setup.z0, setup.params, eq);

  auto run_one = [&](double eps) {
    CompareSetup cs;
    cs.params = setup.params;
    cs.pert = setup.pert;
    cs.epsilon = eps;
    cs.initial = init;
    cs.tau_end = setup.tau_end;
    cs.tau0 = tau0_common;
    cs.grid_samples = setup.grid_samples;
    cs.solver = setup.solver;
    return compare_full_vs_reduced(cs).max_error;
  };

  ScalingReport rep;
  rep.epsilons = epsilons;
  rep.errors.resize(epsilons.size());
  if (threads <= 1) {
    for (std::size_t i = 0; i < epsilons.size(); ++i) rep.errors[i] = run_one(epsilons[i]);
  } else {
    std::vector<std::future<double>> futs;
    futs.reserve(epsilons.size());
    for (double e : epsilons)
      futs.push_back(std::async(std::launch::async, run_one, e));
    for (std::size_t i = 0; i < futs.size(); ++i) rep.errors[i] = futs[i].get();
  }

  const double max_err = *std::max_element(rep.errors.begin(), rep.errors.end());
  rep.degenerate = max_err < setup.noise_floor;

  // Log-log least squares for the convergence order.
  const std::size_t m = epsilons.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<double> lx(m), ly(m);
  for (std::size_t i = 0; i < m; ++i) {
    lx[i] = std::log(rep.epsilons[i]);
    ly[i] = std::log(std::max(rep.errors[i], 1e-300));
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double denom = static_cast<double>(m) * sxx - sx * sx;
  rep.fitted_slope = (static_cast<double>(m) * sxy - sx * sy) / denom;
  rep.intercept = (sy - rep.fitted_slope * sx) / static_cast<double>(m);
  rep.residuals.resize(m);
  for (std::size_t i = 0; i < m; ++i)
    rep.residuals[i] = ly[i] - (rep.intercept + rep.fitted_slope * lx[i]);
  return rep;
}

}  // namespace costrain
