#include "costrain/full_model.hpp"

#include <cmath>
#include <string>

namespace costrain {

FullState FullState::zero(int n) {
  FullState st;
  st.s = 0.0;
  st.i_single = Eigen::VectorXd::Zero(n);
  st.i_double = Eigen::MatrixXd::Zero(n, n);
  return st;
}

Eigen::VectorXd FullState::pack() const {
  const int nn = n();
  Eigen::VectorXd y(1 + nn + nn * nn);
  y(0) = s;
  y.segment(1, nn) = i_single;
  y.segment(1 + nn, nn * nn) = Eigen::Map<const Eigen::VectorXd>(i_double.data(), nn * nn);
  return y;
}

FullState FullState::unpack(const Eigen::VectorXd& y, int n) {
  FullState st;
  st.s = y(0);
  st.i_single = y.segment(1, n);
  st.i_double = Eigen::Map<const Eigen::MatrixXd>(y.data() + 1 + n, n, n);
  return st;
}

void FullState::validate(double tol) const {
  if (n() < 1) throw ValidationError("FullState has no strains");
  if (i_double.rows() != n() || i_double.cols() != n())
    throw ValidationError("FullState i_double must be n x n");
  const double lo = -tol;
  if (s < lo || (i_single.array() < lo).any() || (i_double.array() < lo).any())
    throw ValidationError("FullState has negative compartments");
  if (total_mass() > 1.0 + tol)
    throw ValidationError("FullState total mass " + std::to_string(total_mass()) + " exceeds 1");
}

Eigen::VectorXd force_of_infection(const FullState& state, const StrainParameters& sp) {
  const int n = state.n();
  Eigen::VectorXd j(n);
  for (int i = 0; i < n; ++i) {
    double acc = state.i_single(i);
    for (int l = 0; l < n; ++l)
      acc += sp.p_first(i, l) * state.i_double(i, l) + sp.p_second(l, i) * state.i_double(l, i);
    j(i) = acc;
  }
  return j;
}

FullState full_rhs(const FullState& state, const StrainParameters& sp,
                   const NeutralParameters& params) {
  const int n = state.n();
  const Eigen::VectorXd j = force_of_infection(state, sp);
  const Eigen::VectorXd w = sp.beta.cwiseProduct(j);  // per-strain force of infection
  const Eigen::VectorXd co_pressure = sp.k_pair * w;  // sum_j k_ij beta_j J_j

  FullState d = FullState::zero(n);
  d.s = params.r * (1.0 - state.s) + sp.gamma.dot(state.i_single) +
        sp.gamma_pair.cwiseProduct(state.i_double).sum() - state.s * w.sum();
  d.i_single = state.s * w -
               ((params.r + sp.gamma.array()) * state.i_single.array()).matrix() -
               state.i_single.cwiseProduct(co_pressure);
  d.i_double = sp.k_pair.cwiseProduct(state.i_single * w.transpose()) -
               ((params.r + sp.gamma_pair.array()) * state.i_double.array()).matrix();
  return d;
}

std::array<double, 3> neutral_scalar_observables(const FullState& state) {
  const double i = state.i_single.sum();
  const double dd = state.i_double.sum();
  return {i + dd, i, dd};
}

namespace {

Trajectory integrate_full_impl(const FullState& state0, const StrainParameters& sp,
                               const NeutralParameters& params,
                               const std::vector<double>& sample_times, const SolverConfig& cfg) {
  state0.validate(10.0 * cfg.atol);
  sp.validate();
  const int n = state0.n();
  if (sp.n() != n) throw ValidationError("state and StrainParameters disagree on strain count");

  Trajectory traj;
  traj.times.reserve(sample_times.size());
  traj.states.reserve(sample_times.size());

  auto rhs = [&](double, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
    const FullState st = FullState::unpack(y, n);
    dy = full_rhs(st, sp, params).pack();
  };
  const double clamp_floor = -10.0 * cfg.atol;
  auto post_step = [&](double t, Eigen::VectorXd& y) {
    const double m = y.minCoeff();
    if (m < clamp_floor)
      throw NumericalError("negative compartment excursion " + std::to_string(m) + " at t = " +
                           std::to_string(t));
  };
  auto on_sample = [&](double t, const Eigen::VectorXd& y) {
    // Solver-noise negatives are zeroed at output only.
    Eigen::VectorXd yc = y.cwiseMax(0.0);
    traj.times.push_back(t);
    traj.states.push_back(FullState::unpack(yc, n));
  };

  integrate_dopri5(rhs, state0.pack(), 0.0, sample_times, cfg, on_sample, post_step);
  return traj;
}

}  // namespace

Trajectory integrate_full(const FullState& state0, const StrainParameters& sp,
                          const NeutralParameters& params, double t_end, const SolverConfig& cfg) {
  if (!(t_end > 0.0)) throw ValidationError("t_end must be > 0");
  return integrate_full_impl(state0, sp, params, uniform_grid(0.0, t_end, cfg.samples), cfg);
}

Trajectory integrate_full_at(const FullState& state0, const StrainParameters& sp,
                             const NeutralParameters& params,
                             const std::vector<double>& sample_times, const SolverConfig& cfg) {
  return integrate_full_impl(state0, sp, params, sample_times, cfg);
}

FullState slow_manifold_state(const Eigen::VectorXd& z, const NeutralParameters& params,
                              const NeutralEquilibrium& eq) {
  const int n = static_cast<int>(z.size());
  FullState st = FullState::zero(n);
  st.s = eq.s_star;
  st.i_single = eq.i_star * z;
  st.i_double = (params.k * eq.i_star * eq.t_star / eq.s_star) * (z * z.transpose());
  return st;
}

}  // namespace costrain
