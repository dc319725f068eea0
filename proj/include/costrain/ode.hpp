#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "costrain/common.hpp"

namespace costrain {

struct SolverConfig {
  double rtol = 1e-8;
  double atol = 1e-10;
  double max_step = 0.0;  // 0 = unlimited
  std::int64_t max_steps = 500000000;
  int samples = 201;  // default uniform output grid over the integration window

  void validate() const {
    if (!(rtol > 0.0) || !(atol > 0.0))
      throw ValidationError("solver tolerances must be > 0");
    if (samples < 2) throw ValidationError("solver samples must be >= 2");
  }
};

/// Uniform grid of `samples` points over [t0, t1], endpoints included.
inline std::vector<double> uniform_grid(double t0, double t1, int samples) {
  std::vector<double> ts(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i)
    ts[static_cast<std::size_t>(i)] = t0 + (t1 - t0) * static_cast<double>(i) / (samples - 1);
  ts.back() = t1;
  return ts;
}

namespace detail {

// Dormand-Prince 5(4) tableau.
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace detail

/// Adaptive Dormand-Prince 5(4) integration of dy/dt = rhs(t, y).
///
/// Steps are clipped so that every entry of `sample_times` (ascending, first
/// entry >= t0) is hit exactly; `on_sample(t, y)` fires at each one.
/// `post_step(t, y)` runs after every accepted step and may adjust y
/// (e.g. renormalization) or throw to abort.
template <class Rhs, class OnSample, class PostStep>
void integrate_dopri5(Rhs&& rhs, Eigen::VectorXd y, double t0,
                      const std::vector<double>& sample_times, const SolverConfig& cfg,
                      OnSample&& on_sample, PostStep&& post_step) {
  using namespace detail;
  cfg.validate();
  if (sample_times.empty()) return;
  for (std::size_t i = 0; i + 1 < sample_times.size(); ++i)
    if (!(sample_times[i] < sample_times[i + 1]))
      throw ValidationError("sample times must be strictly increasing");
  if (sample_times.front() < t0 - 1e-12)
    throw ValidationError("first sample time precedes the initial time");

  const auto nd = y.size();
  Eigen::VectorXd k1(nd), k2(nd), k3(nd), k4(nd), k5(nd), k6(nd), k7(nd);
  Eigen::VectorXd ytmp(nd), y5(nd), err(nd);

  double t = t0;
  std::size_t next = 0;
  if (std::abs(sample_times[0] - t0) <= 1e-12 * std::max(1.0, std::abs(t0))) {
    on_sample(t0, y);
    ++next;
  }
  if (next >= sample_times.size()) return;
  const double t_end = sample_times.back();

  rhs(t, y, k1);

  // Initial step size from the scale of y and f (Hairer-Norsett-Wanner I.4).
  // Guards against overflow of the scaled norms at extreme tolerances.
  double h;
  {
    const double d0 = y.cwiseQuotient((cfg.atol + cfg.rtol * y.cwiseAbs().array()).matrix()).norm();
    const double d1 = k1.cwiseQuotient((cfg.atol + cfg.rtol * y.cwiseAbs().array()).matrix()).norm();
    double h0 = (!std::isfinite(d0) || !std::isfinite(d1) || d0 < 1e-5 || d1 < 1e-5)
                    ? 1e-6
                    : 0.01 * d0 / d1;
    h0 = std::min(h0, t_end - t);
    ytmp = y + h0 * k1;
    rhs(t + h0, ytmp, k2);
    const double d2 = (k2 - k1).cwiseQuotient((cfg.atol + cfg.rtol * y.cwiseAbs().array()).matrix())
                          .norm() /
                      h0;
    double h1;
    if (!std::isfinite(d2) || std::max(d1, d2) <= 1e-15)
      h1 = std::max(1e-6, h0 * 1e-3);
    else
      h1 = std::pow(0.01 / std::max(d1, d2), 0.2);
    h = std::min({100.0 * h0, h1, t_end - t});
    if (!std::isfinite(h) || h <= 0.0) h = 1e-6;
  }
  if (cfg.max_step > 0.0) h = std::min(h, cfg.max_step);

  std::int64_t steps = 0;
  while (next < sample_times.size()) {
    if (++steps > cfg.max_steps)
      throw NumericalError("integration exceeded max_steps at t = " + std::to_string(t));
    const double eps_t = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
    if (h < eps_t)
      throw NumericalError("step size underflow at t = " + std::to_string(t));

    bool hit_sample = false;
    const double h_unclipped = h;
    double h_try = h;
    if (t + h_try >= sample_times[next] - eps_t) {
      h_try = sample_times[next] - t;
      hit_sample = true;
    }

    rhs(t, y, k1);
    ytmp = y + h_try * (a21 * k1);
    rhs(t + c2 * h_try, ytmp, k2);
    ytmp = y + h_try * (a31 * k1 + a32 * k2);
    rhs(t + c3 * h_try, ytmp, k3);
    ytmp = y + h_try * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(t + c4 * h_try, ytmp, k4);
    ytmp = y + h_try * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(t + c5 * h_try, ytmp, k5);
    ytmp = y + h_try * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(t + h_try, ytmp, k6);
    y5 = y + h_try * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    rhs(t + h_try, y5, k7);
    err = h_try * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double err_norm = 0.0;
    for (Eigen::Index i = 0; i < nd; ++i) {
      const double sc = cfg.atol + cfg.rtol * std::max(std::abs(y(i)), std::abs(y5(i)));
      const double e = err(i) / sc;
      err_norm += e * e;
    }
    err_norm = std::sqrt(err_norm / static_cast<double>(nd));
    if (!std::isfinite(err_norm)) err_norm = 1e6;  // non-finite state: force a rejection

    if (err_norm <= 1.0) {
      t = hit_sample ? sample_times[next] : t + h_try;
      y = y5;
      post_step(t, y);
      if (hit_sample) {
        on_sample(t, y);
        ++next;
      }
    }
    const double fac =
        std::clamp(0.9 * std::pow(std::max(err_norm, 1e-16), -0.2), 0.2, 10.0);
    h = h_try * fac;
    // A step shortened only to land on a sample should not throttle the
    // controller; restore its pre-clip size after a successful landing.
    if (hit_sample && err_norm <= 1.0) h = std::max(h, h_unclipped);
    if (cfg.max_step > 0.0) h = std::min(h, cfg.max_step);
  }
}

}  // namespace costrain
