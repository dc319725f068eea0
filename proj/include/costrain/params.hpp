#pragma once

#include <Eigen/Dense>
#include <array>
#include <initializer_list>
#include <string>
#include <vector>

#include "costrain/common.hpp"

namespace costrain {

/// Subset of the five trait dimensions allowed to deviate from their common
/// reference values:
///   1 transmission rate            (beta_i)
///   2 single-colonization clearance (gamma_i)
///   3 co-colonization clearance     (gamma_ij)
///   4 transmission precedence from mixed carriage (p_ij^i)
///   5 co-colonization vulnerability (k_ij)
class TraitMask {
 public:
  TraitMask() = default;
  TraitMask(std::initializer_list<int> dims) { set_dims(dims.begin(), dims.end()); }

  static TraitMask all() { return TraitMask{1, 2, 3, 4, 5}; }
  static TraitMask from_dims(const std::vector<int>& dims) {
    TraitMask m;
    m.set_dims(dims.begin(), dims.end());
    return m;
  }

  bool active(int d) const {
    check_dim(d);
    return on_[static_cast<std::size_t>(d - 1)];
  }
  /// Indicator chi_d: 1 when dimension d deviates, 0 otherwise.
  double chi(int d) const { return active(d) ? 1.0 : 0.0; }

  bool empty() const {
    for (bool b : on_)
      if (b) return false;
    return true;
  }
  std::vector<int> dims() const {
    std::vector<int> out;
    for (int d = 1; d <= 5; ++d)
      if (on_[static_cast<std::size_t>(d - 1)]) out.push_back(d);
    return out;
  }
  std::string str() const;

  bool operator==(const TraitMask&) const = default;

 private:
  template <class It>
  void set_dims(It first, It last) {
    for (It it = first; it != last; ++it) {
      check_dim(*it);
      on_[static_cast<std::size_t>(*it - 1)] = true;
    }
  }
  static void check_dim(int d) {
    if (d < 1 || d > 5)
      throw ValidationError("trait dimension must be in 1..5, got " + std::to_string(d));
  }
  std::array<bool, 5> on_{};
};

/// Strain-independent backbone of the model.
struct NeutralParameters {
  double beta = 0.0;   // transmission rate (1/time)
  double gamma = 0.0;  // clearance rate of single colonization (1/time)
  double r = 0.0;      // host turnover: recruitment = mortality (1/time)
  double k = 0.0;      // reference co-colonization vulnerability factor

  double m() const { return r + gamma; }       // inverse duration of carriage
  double r0() const { return beta / m(); }     // basic reproduction number
  void validate() const;
};

/// Per-strain deviations from the neutral reference, all dimensionless.
/// omega(i, j) holds the precedence deviation of the first-acquired strain i
/// in an (i then j) host; the second strain's deviation is -omega(i, j).
struct TraitPerturbations {
  int n = 0;
  Eigen::VectorXd b;      // transmission
  Eigen::VectorXd nu;     // single-colonization clearance
  Eigen::MatrixXd u;      // co-colonization clearance
  Eigen::MatrixXd omega;  // transmission precedence from mixed carriage
  Eigen::MatrixXd alpha;  // co-colonization vulnerability
  TraitMask mask;

  static TraitPerturbations zeros(int n);
  void validate() const;
};

/// Realized strain-specific rates at a given perturbation magnitude.
/// p_first(i, j) is the probability that an (i then j) co-colonized host
/// transmits its first-acquired strain i; the complement transmits j.
struct StrainParameters {
  Eigen::VectorXd beta;
  Eigen::VectorXd gamma;
  Eigen::MatrixXd gamma_pair;
  Eigen::MatrixXd p_first;
  Eigen::MatrixXd k_pair;
  double epsilon = 0.0;

  int n() const { return static_cast<int>(beta.size()); }
  double p_second(int i, int j) const { return 1.0 - p_first(i, j); }
  void validate() const;
};

/// Closed-form quantities of the neutral endemic equilibrium, plus the
/// timescale weights of the active trait dimensions.
struct NeutralEquilibrium {
  double s_star = 0.0;  // susceptible fraction
  double t_star = 0.0;  // total infected fraction
  double i_star = 0.0;  // singly-infected fraction
  double d_star = 0.0;  // co-colonized fraction
  double mu = 0.0;      // i_star / d_star
  double xi = 0.0;      // decay rate of the fast strain modes
  double det_p = 0.0;   // 2 T*^2 - I* D*, determinant of the (I,J) change of basis

  std::array<double, 5> theta_raw{};   // Theta_1..Theta_5, zero for inactive traits
  double theta_total = 1.0;            // sum over active traits; 1 when mask empty
  std::array<double, 5> theta_norm{};  // theta_raw / theta_total
  TraitMask mask;
};

/// Neutral endemic equilibrium for R0 > 1; rejects the disease-free regime.
NeutralEquilibrium neutral_equilibrium(const NeutralParameters& params, const TraitMask& mask);

/// Realizes strain-specific rates from deviations. Masked-off dimensions stay
/// at their neutral value. Rejects realized rates <= 0 and probabilities
/// outside [0,1], naming the offending entry.
StrainParameters realize_traits(const NeutralParameters& params, const TraitPerturbations& pert,
                                double epsilon);

/// Per-strain basic reproduction numbers beta_i / (r + gamma_i).
Eigen::VectorXd basic_reproduction_numbers(const StrainParameters& sp,
                                           const NeutralParameters& params);

}  // namespace costrain
