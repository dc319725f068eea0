#include "costrain/params.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace costrain {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

void require(bool cond, const std::string& msg) {
  if (!cond) throw ValidationError(msg);
}

}  // namespace

std::string TraitMask::str() const {
  std::string s = "{";
  bool first = true;
  for (int d : dims()) {
    if (!first) s += ",";
    s += std::to_string(d);
    first = false;
  }
  return s + "}";
}

void NeutralParameters::validate() const {
  require(std::isfinite(beta) && beta > 0.0, "neutral parameter beta must be > 0, got " + fmt(beta));
  require(std::isfinite(gamma) && gamma > 0.0,
          "neutral parameter gamma must be > 0, got " + fmt(gamma));
  require(std::isfinite(r) && r >= 0.0, "neutral parameter r must be >= 0, got " + fmt(r));
  require(std::isfinite(k) && k > 0.0, "neutral parameter k must be > 0, got " + fmt(k));
  require(m() > 0.0, "m = r + gamma must be > 0");
}

TraitPerturbations TraitPerturbations::zeros(int n) {
  TraitPerturbations p;
  p.n = n;
  p.b = Eigen::VectorXd::Zero(n);
  p.nu = Eigen::VectorXd::Zero(n);
  p.u = Eigen::MatrixXd::Zero(n, n);
  p.omega = Eigen::MatrixXd::Zero(n, n);
  p.alpha = Eigen::MatrixXd::Zero(n, n);
  return p;
}

void TraitPerturbations::validate() const {
  require(n >= 1, "strain count n must be >= 1, got " + std::to_string(n));
  auto check_vec = [&](const Eigen::VectorXd& v, const char* name) {
    require(v.size() == n, std::string("perturbation vector ") + name + " has length " +
                               std::to_string(v.size()) + ", expected n = " + std::to_string(n));
    require(v.allFinite(), std::string("perturbation vector ") + name + " has non-finite entries");
  };
  auto check_mat = [&](const Eigen::MatrixXd& m, const char* name) {
    require(m.rows() == n && m.cols() == n,
            std::string("perturbation matrix ") + name + " is " + std::to_string(m.rows()) + "x" +
                std::to_string(m.cols()) + ", expected " + std::to_string(n) + "x" +
                std::to_string(n));
    require(m.allFinite(), std::string("perturbation matrix ") + name + " has non-finite entries");
  };
  check_vec(b, "b");
  check_vec(nu, "nu");
  check_mat(u, "u");
  check_mat(omega, "omega");
  check_mat(alpha, "alpha");
}

void StrainParameters::validate() const {
  const int nn = n();
  require(nn >= 1, "StrainParameters is empty");
  require(gamma.size() == nn && gamma_pair.rows() == nn && gamma_pair.cols() == nn &&
              p_first.rows() == nn && p_first.cols() == nn && k_pair.rows() == nn &&
              k_pair.cols() == nn,
          "StrainParameters arrays are inconsistently sized");
  require(epsilon >= 0.0, "epsilon must be >= 0");
  for (int i = 0; i < nn; ++i) {
    require(beta(i) > 0.0, "realized beta_" + std::to_string(i + 1) + " = " + fmt(beta(i)) + " <= 0");
    require(gamma(i) > 0.0,
            "realized gamma_" + std::to_string(i + 1) + " = " + fmt(gamma(i)) + " <= 0");
  }
  for (int i = 0; i < nn; ++i)
    for (int j = 0; j < nn; ++j) {
      const std::string ij = std::to_string(i + 1) + "," + std::to_string(j + 1);
      require(gamma_pair(i, j) > 0.0,
              "realized gamma_{" + ij + "} = " + fmt(gamma_pair(i, j)) + " <= 0");
      require(k_pair(i, j) > 0.0, "realized k_{" + ij + "} = " + fmt(k_pair(i, j)) + " <= 0");
      require(p_first(i, j) >= 0.0 && p_first(i, j) <= 1.0,
              "realized p_{" + ij + "} = " + fmt(p_first(i, j)) + " outside [0,1]");
    }
}

NeutralEquilibrium neutral_equilibrium(const NeutralParameters& params, const TraitMask& mask) {
  params.validate();
  const double m = params.m();
  const double r0 = params.r0();
  if (!(r0 > 1.0))
    throw ValidationError("neutral_equilibrium: R0 = " + fmt(r0) +
                          " <= 1; the system is in the disease-free regime and has no endemic "
                          "equilibrium");

  NeutralEquilibrium eq;
  eq.mask = mask;
  eq.s_star = 1.0 / r0;
  eq.t_star = 1.0 - eq.s_star;
  eq.i_star = m * eq.t_star / (m + params.beta * params.k * eq.t_star);
  eq.d_star = eq.t_star - eq.i_star;
  eq.mu = eq.i_star / eq.d_star;
  eq.xi = m + params.beta * params.k * eq.t_star - 0.5 * params.beta * params.k * eq.i_star;
  eq.det_p = 2.0 * eq.t_star * eq.t_star - eq.i_star * eq.d_star;

  const double t2 = eq.t_star * eq.t_star;
  eq.theta_raw = {mask.chi(1) * 2.0 * params.beta * eq.s_star * t2 / eq.det_p,
                  mask.chi(2) * params.gamma * eq.i_star * (eq.i_star + eq.t_star) / eq.det_p,
                  mask.chi(3) * params.gamma * eq.t_star * eq.d_star / eq.det_p,
                  mask.chi(4) * 2.0 * m * eq.t_star * eq.d_star / eq.det_p,
                  mask.chi(5) * params.beta * eq.t_star * eq.i_star * eq.d_star / eq.det_p};
  if (mask.empty()) {
    eq.theta_total = 1.0;  // convention: no deviating trait, frequencies are frozen
    eq.theta_norm = {0.0, 0.0, 0.0, 0.0, 0.0};
  } else {
    eq.theta_total = std::accumulate(eq.theta_raw.begin(), eq.theta_raw.end(), 0.0);
    for (int d = 0; d < 5; ++d) eq.theta_norm[static_cast<std::size_t>(d)] =
        eq.theta_raw[static_cast<std::size_t>(d)] / eq.theta_total;
  }
  return eq;
}

StrainParameters realize_traits(const NeutralParameters& params, const TraitPerturbations& pert,
                                double epsilon) {
  params.validate();
  pert.validate();
  if (!(epsilon >= 0.0)) throw ValidationError("epsilon must be >= 0, got " + fmt(epsilon));

  const auto& mask = pert.mask;
  const int n = pert.n;
  StrainParameters sp;
  sp.epsilon = epsilon;
  sp.beta = (params.beta * (1.0 + epsilon * mask.chi(1) * pert.b.array())).matrix();
  sp.gamma = (params.gamma * (1.0 + epsilon * mask.chi(2) * pert.nu.array())).matrix();
  sp.gamma_pair = (params.gamma * (1.0 + epsilon * mask.chi(3) * pert.u.array())).matrix();
  sp.p_first = (0.5 + epsilon * mask.chi(4) * pert.omega.array()).matrix();
  sp.k_pair = (params.k + epsilon * mask.chi(5) * pert.alpha.array()).matrix();
  (void)n;
  sp.validate();
  return sp;
}

Eigen::VectorXd basic_reproduction_numbers(const StrainParameters& sp,
                                           const NeutralParameters& params) {
  sp.validate();
  return (sp.beta.array() / (params.r + sp.gamma.array())).matrix();
}

}  // namespace costrain
