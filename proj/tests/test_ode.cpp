#include <doctest.h>

#include <cmath>

#include "costrain/ode.hpp"

using namespace costrain;

namespace {
auto no_post = [](double, Eigen::VectorXd&) {};
}

TEST_CASE("dopri5 reproduces exponential decay to tolerance") {
  SolverConfig cfg;
  Eigen::VectorXd y0(1);
  y0 << 1.0;
  const auto ts = uniform_grid(0.0, 10.0, 41);
  std::vector<double> seen_t;
  double worst = 0.0;
  integrate_dopri5([](double, const Eigen::VectorXd& y, Eigen::VectorXd& dy) { dy = -y; }, y0, 0.0,
                   ts, cfg,
                   [&](double t, const Eigen::VectorXd& y) {
                     seen_t.push_back(t);
                     worst = std::max(worst, std::abs(y(0) - std::exp(-t)));
                   },
                   no_post);
  CHECK(seen_t.size() == ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) CHECK(seen_t[i] == ts[i]);  // grid hit exactly
  CHECK(worst < 1e-7);
}

TEST_CASE("dopri5 keeps oscillator energy at tight tolerance") {
  SolverConfig cfg;
  cfg.rtol = 1e-10;
  cfg.atol = 1e-12;
  Eigen::VectorXd y0(2);
  y0 << 1.0, 0.0;
  double worst = 0.0;
  integrate_dopri5(
      [](double, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
        dy.resize(2);
        dy << y(1), -y(0);
      },
      y0, 0.0, uniform_grid(0.0, 50.0, 101), cfg,
      [&](double, const Eigen::VectorXd& y) {
        worst = std::max(worst, std::abs(y.squaredNorm() - 1.0));
      },
      no_post);
  CHECK(worst < 1e-7);
}

TEST_CASE("dopri5 reports step failures") {
  SolverConfig cfg;
  cfg.max_steps = 5;
  Eigen::VectorXd y0(1);
  y0 << 1.0;
  CHECK_THROWS_AS(
      integrate_dopri5([](double, const Eigen::VectorXd& y, Eigen::VectorXd& dy) { dy = -y; }, y0,
                       0.0, uniform_grid(0.0, 100.0, 1001), cfg,
                       [](double, const Eigen::VectorXd&) {}, no_post),
      NumericalError);
}

TEST_CASE("dopri5 fails fast instead of spinning at absurd tolerances") {
  // Scaled error norms overflow here; the controller must still terminate.
  SolverConfig cfg;
  cfg.rtol = 1e-300;
  cfg.atol = 1e-300;
  Eigen::VectorXd y0(1);
  y0 << 1.0;
  CHECK_THROWS_AS(
      integrate_dopri5([](double, const Eigen::VectorXd& y, Eigen::VectorXd& dy) { dy = -y; }, y0,
                       0.0, uniform_grid(0.0, 10.0, 5), cfg,
                       [](double, const Eigen::VectorXd&) {}, no_post),
      NumericalError);
}

TEST_CASE("dopri5 rejects a disordered grid") {
  SolverConfig cfg;
  Eigen::VectorXd y0(1);
  y0 << 1.0;
  CHECK_THROWS_AS(
      integrate_dopri5([](double, const Eigen::VectorXd& y, Eigen::VectorXd& dy) { dy = -y; }, y0,
                       0.0, std::vector<double>{1.0, 0.5}, cfg,
                       [](double, const Eigen::VectorXd&) {}, no_post),
      ValidationError);
}
