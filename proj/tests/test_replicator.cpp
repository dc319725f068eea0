#include <doctest.h>

#include <cmath>
#include <vector>

#include "costrain/replicator.hpp"
#include "test_util.hpp"

using namespace costrain;

namespace {

InvasionFitnessMatrix fitness_for(const TraitPerturbations& pert, const NeutralParameters& p) {
  return invasion_fitness(pert, neutral_equilibrium(p, pert.mask));
}

const std::vector<TraitMask> kSomeMasks{TraitMask{},     TraitMask{1},    TraitMask{2},
                                        TraitMask{3},    TraitMask{4},    TraitMask{5},
                                        TraitMask{1, 2}, TraitMask{3, 5}, TraitMask::all()};

}  // namespace

TEST_CASE("invasion fitness diagonal is exactly zero for every mask") {
  Rng rng(101);
  const NeutralParameters p = testutil::reference_params();
  for (const auto& mask : kSomeMasks) {
    auto pert = testutil::random_pert(rng, 6, mask);
    const auto lam = fitness_for(pert, p);
    for (int i = 0; i < 6; ++i) CHECK(lam.lambda(i, i) == 0.0);
  }
}

TEST_CASE("invasion fitness is exactly antisymmetric for masks within {1,2,4}") {
  Rng rng(102);
  const NeutralParameters p = testutil::reference_params();
  for (const auto& mask :
       {TraitMask{1}, TraitMask{2}, TraitMask{4}, TraitMask{1, 2}, TraitMask{1, 2, 4}}) {
    auto pert = testutil::random_pert(rng, 7, mask);
    const auto lam = fitness_for(pert, p);
    CHECK((lam.lambda + lam.lambda.transpose()).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("hand-evaluated transmission-only fitness") {
  auto pert = TraitPerturbations::zeros(2);
  pert.mask = TraitMask{1};
  pert.b << 0.25, -0.2;
  const auto lam = fitness_for(pert, testutil::reference_params());
  // Single active trait, so its normalized weight is 1.
  CHECK(lam.lambda(0, 1) == doctest::Approx(0.45).epsilon(1e-14));
  CHECK(lam.lambda(1, 0) == doctest::Approx(-0.45).epsilon(1e-14));
}

TEST_CASE("vulnerability-only fitness matches the mu-weighted asymmetry") {
  Rng rng(103);
  const NeutralParameters p = testutil::reference_params();
  auto pert = testutil::random_pert(rng, 5, TraitMask{5});
  const auto eq = neutral_equilibrium(p, pert.mask);
  const auto lam = invasion_fitness(pert, eq);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      const double expect = eq.mu * (pert.alpha(j, i) - pert.alpha(i, j)) + pert.alpha(j, i) -
                            pert.alpha(j, j);
      CHECK(lam.lambda(i, j) == doctest::Approx(expect).epsilon(1e-14));
    }
}

TEST_CASE("mask mismatch between perturbations and equilibrium is rejected") {
  Rng rng(104);
  auto pert = testutil::random_pert(rng, 3, TraitMask{1});
  const auto eq = neutral_equilibrium(testutil::reference_params(), TraitMask{2});
  CHECK_THROWS_AS(invasion_fitness(pert, eq), ValidationError);
}

TEST_CASE("adding a constant to b leaves the fitness matrix unchanged") {
  Rng rng(105);
  auto pert = testutil::random_pert(rng, 6, TraitMask{1, 2});
  auto shifted = pert;
  shifted.b.array() += 0.7;
  const auto p = testutil::reference_params();
  const auto lam = fitness_for(pert, p);
  const auto lam2 = fitness_for(shifted, p);
  CHECK((lam.lambda - lam2.lambda).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("replicator vector field structure") {
  Rng rng(106);
  const NeutralParameters p = testutil::reference_params();

  SUBCASE("vertices are equilibria") {
    auto pert = testutil::random_pert(rng, 5, TraitMask::all());
    const auto lam = fitness_for(pert, p);
    for (int v = 0; v < 5; ++v) {
      Eigen::VectorXd z = Eigen::VectorXd::Zero(5);
      z(v) = 1.0;
      const auto dz = replicator_rhs(SimplexState(z), lam, 1.7);
      CHECK(dz.cwiseAbs().maxCoeff() == 0.0);
    }
  }

  SUBCASE("antisymmetric matrix: mean fitness term vanishes") {
    auto pert = testutil::random_pert(rng, 6, TraitMask{1, 4});
    const auto eq = neutral_equilibrium(p, pert.mask);
    const auto lam = invasion_fitness(pert, eq);
    for (int trial = 0; trial < 20; ++trial) {
      const Eigen::VectorXd z = testutil::random_simplex(rng, 6);
      CHECK(std::abs(z.dot(lam.lambda * z)) < 1e-14);
      const auto dz = replicator_rhs(SimplexState(z), lam, eq.theta_total);
      const auto direct =
          (eq.theta_total * z.array() * (lam.lambda * z).array()).matrix().eval();
      CHECK((dz - direct).cwiseAbs().maxCoeff() < 1e-13);
    }
  }

  SUBCASE("derivative components sum to zero") {
    for (int trial = 0; trial < 50; ++trial) {
      const int n = 2 + static_cast<int>(rng.next_u64() % 6);
      auto pert = testutil::random_pert(rng, n, TraitMask::all());
      const auto lam = fitness_for(pert, p);
      const Eigen::VectorXd z = testutil::random_simplex(rng, n);
      CHECK(std::abs(replicator_rhs(SimplexState(z), lam, 2.3).sum()) < 1e-14);
    }
  }

  SUBCASE("empty mask freezes the frequencies") {
    auto pert = testutil::random_pert(rng, 4, TraitMask{});
    const auto lam = fitness_for(pert, p);
    const Eigen::VectorXd z = testutil::random_simplex(rng, 4);
    CHECK(replicator_rhs(SimplexState(z), lam, 1.0).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("per-trait slow systems equal the general pipeline") {
  Rng rng(107);
  for (int d = 1; d <= 4; ++d) {
    double worst = 0.0;
    for (int trial = 0; trial < 250; ++trial) {
      const NeutralParameters p = testutil::random_params(rng);
      const int n = 2 + static_cast<int>(rng.next_u64() % 7);
      auto pert = testutil::random_pert(rng, n, TraitMask{d});
      const auto eq = neutral_equilibrium(p, pert.mask);
      const auto lam = invasion_fitness(pert, eq);
      const Eigen::VectorXd z = testutil::random_simplex(rng, n);
      const auto via_lambda = replicator_rhs(SimplexState(z), lam, eq.theta_total);
      const auto direct = per_trait_slow_rhs(SimplexState(z), pert, eq, d);
      worst = std::max(worst, (via_lambda - direct).cwiseAbs().maxCoeff());
    }
    CAPTURE(d);
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("per-trait rhs rejects out-of-range traits") {
  Rng rng(108);
  auto pert = testutil::random_pert(rng, 3, TraitMask{5});
  const auto eq = neutral_equilibrium(testutil::reference_params(), pert.mask);
  const Eigen::VectorXd z = testutil::random_simplex(rng, 3);
  CHECK_THROWS_AS(per_trait_slow_rhs(SimplexState(z), pert, eq, 0), ValidationError);
  CHECK_THROWS_AS(per_trait_slow_rhs(SimplexState(z), pert, eq, 5), ValidationError);
}

TEST_CASE("uniform frequencies with zero omega sit still under trait 4") {
  auto pert = TraitPerturbations::zeros(5);
  pert.mask = TraitMask{4};
  const auto eq = neutral_equilibrium(testutil::reference_params(), pert.mask);
  const Eigen::VectorXd z = Eigen::VectorXd::Constant(5, 0.2);
  CHECK(per_trait_slow_rhs(SimplexState(z), pert, eq, 4).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("replicator integration") {
  Rng rng(109);
  const NeutralParameters p = testutil::reference_params();

  SUBCASE("vertex start stays put") {
    auto pert = testutil::random_pert(rng, 4, TraitMask::all());
    const auto eq = neutral_equilibrium(p, pert.mask);
    const auto lam = invasion_fitness(pert, eq);
    Eigen::VectorXd z0 = Eigen::VectorXd::Zero(4);
    z0(2) = 1.0;
    SolverConfig cfg;
    cfg.samples = 11;
    const auto traj = integrate_replicator(SimplexState(z0), lam, eq.theta_total, 50.0, cfg);
    for (const auto& z : traj.zs) CHECK((z - z0).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("transmission-only exclusion reaches the top-b vertex") {
    auto pert = TraitPerturbations::zeros(5);
    pert.mask = TraitMask{1};
    pert.b << 0.1, 0.35, -0.2, 0.0, 0.3;
    const auto eq = neutral_equilibrium(p, pert.mask);
    const auto lam = invasion_fitness(pert, eq);
    SolverConfig cfg;
    cfg.samples = 21;
    const Eigen::VectorXd z0 = Eigen::VectorXd::Constant(5, 0.2);
    const auto traj = integrate_replicator(SimplexState(z0), lam, eq.theta_total, 300.0, cfg);
    CHECK(traj.zs.back()(1) > 0.999);
  }

  SUBCASE("simplex drift stays within 1e-9 over tau = 1000") {
    auto pert = testutil::random_pert(rng, 8, TraitMask::all(), 0.8);
    const auto eq = neutral_equilibrium(p, pert.mask);
    const auto lam = invasion_fitness(pert, eq);
    SolverConfig cfg;
    cfg.samples = 51;
    const Eigen::VectorXd z0 = testutil::random_simplex(rng, 8);
    const auto traj = integrate_replicator(SimplexState(z0), lam, eq.theta_total, 1000.0, cfg);
    CHECK(traj.max_drift <= 1e-9);
    CHECK(traj.min_pre_clamp >= -1e-12);
    for (const auto& z : traj.zs) {
      CHECK(std::abs(z.sum() - 1.0) <= 1e-9);
      CHECK(z.minCoeff() >= 0.0);
    }
  }
}
