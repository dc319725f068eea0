#include <doctest.h>

#include <cmath>
#include <numeric>

#include "costrain/full_model.hpp"
#include "test_util.hpp"

using namespace costrain;

namespace {

FullState random_state(Rng& rng, int n, double mass = 1.0) {
  // Random positive compartments scaled to the requested total mass.
  FullState st = FullState::zero(n);
  st.s = rng.uniform(0.1, 1.0);
  for (int i = 0; i < n; ++i) st.i_single(i) = rng.uniform(0.0, 0.3);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) st.i_double(i, j) = rng.uniform(0.0, 0.1);
  const double scale = mass / st.total_mass();
  st.s *= scale;
  st.i_single *= scale;
  st.i_double *= scale;
  return st;
}

}  // namespace

TEST_CASE("force of infection") {
  const NeutralParameters p = testutil::reference_params();

  SUBCASE("no coinfection: J = I") {
    auto pert = TraitPerturbations::zeros(3);
    pert.mask = TraitMask{4};
    const auto sp = realize_traits(p, pert, 0.05);
    FullState st = FullState::zero(3);
    st.s = 0.5;
    st.i_single << 0.1, 0.2, 0.05;
    const auto j = force_of_infection(st, sp);
    CHECK((j - st.i_single).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("hand-evaluated two-strain case") {
    auto pert = TraitPerturbations::zeros(2);
    pert.mask = TraitMask{4};
    pert.omega(0, 1) = 1.0;  // p_12^1 = 0.6 at epsilon 0.1
    pert.omega(1, 0) = 0.0;  // p_21^2 = 0.5, so p_21^1 = 0.5
    const auto sp = realize_traits(p, pert, 0.1);
    REQUIRE(sp.p_first(0, 1) == doctest::Approx(0.6));
    REQUIRE(sp.p_second(1, 0) == doctest::Approx(0.5));
    FullState st = FullState::zero(2);
    st.i_single << 0.3, 0.1;
    st.i_double(0, 1) = 0.1;
    st.i_double(1, 0) = 0.2;
    const auto j = force_of_infection(st, sp);
    CHECK(j(0) == doctest::Approx(0.46).epsilon(1e-14));
  }

  SUBCASE("sum J_i = T for any omega, by the probability complement") {
    Rng rng(33);
    for (int trial = 0; trial < 50; ++trial) {
      const int n = 2 + static_cast<int>(rng.next_u64() % 4);
      auto pert = testutil::random_pert(rng, n, TraitMask::all(), 0.8);
      const auto sp = realize_traits(p, pert, 0.05);
      const FullState st = random_state(rng, n);
      const auto j = force_of_infection(st, sp);
      const auto [t_obs, i_obs, d_obs] = neutral_scalar_observables(st);
      CHECK(j.sum() == doctest::Approx(t_obs).epsilon(1e-13));
    }
  }
}

TEST_CASE("neutral scalar observables") {
  FullState st = FullState::zero(2);
  CHECK(neutral_scalar_observables(st)[0] == 0.0);
  st.i_single << 0.1, 0.1;
  st.i_double.setConstant(0.05);
  const auto [t_obs, i_obs, d_obs] = neutral_scalar_observables(st);
  CHECK(t_obs == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(i_obs == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(d_obs == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("full rhs respects the mass law") {
  Rng rng(44);
  const NeutralParameters p = testutil::reference_params();
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 3);
    auto pert = testutil::random_pert(rng, n, TraitMask::all(), 0.8);
    const auto sp = realize_traits(p, pert, 0.05);
    const FullState st = random_state(rng, n, rng.uniform(0.5, 1.0));
    const FullState d = full_rhs(st, sp, p);
    const double expected = p.r * (1.0 - st.total_mass());
    CHECK(d.total_mass() == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("full rhs vanishes at the disease-free state") {
  const NeutralParameters p = testutil::reference_params();
  auto pert = TraitPerturbations::zeros(3);
  pert.mask = TraitMask{};
  const auto sp = realize_traits(p, pert, 0.0);
  FullState st = FullState::zero(3);
  st.s = 1.0;
  const FullState d = full_rhs(st, sp, p);
  CHECK(std::abs(d.s) == 0.0);
  CHECK(d.i_single.cwiseAbs().maxCoeff() == 0.0);
  CHECK(d.i_double.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("neutral slow-manifold states are stationary") {
  Rng rng(55);
  const NeutralParameters p = testutil::reference_params();
  const auto eq = neutral_equilibrium(p, TraitMask{});
  auto pert = testutil::random_pert(rng, 4, TraitMask{});
  const auto sp = realize_traits(p, pert, 0.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd z = testutil::random_simplex(rng, 4);
    const FullState st = slow_manifold_state(z, p, eq);
    const FullState d = full_rhs(st, sp, p);
    CHECK(std::abs(d.s) < 1e-12);
    CHECK(d.i_single.cwiseAbs().maxCoeff() < 1e-12);
    CHECK(d.i_double.cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("neutral dynamics converge to the closed-form equilibrium") {
  Rng rng(66);
  const NeutralParameters p = testutil::reference_params();  // R0 = 2
  const auto eq = neutral_equilibrium(p, TraitMask{});
  auto pert = testutil::random_pert(rng, 3, TraitMask{});
  const auto sp = realize_traits(p, pert, 0.0);
  const FullState st0 = random_state(rng, 3, 1.0);
  SolverConfig cfg;
  cfg.samples = 21;
  const Trajectory traj = integrate_full(st0, sp, p, 200.0, cfg);
  const auto [t_obs, i_obs, d_obs] = neutral_scalar_observables(traj.states.back());
  (void)d_obs;
  CHECK(std::abs(traj.states.back().s - eq.s_star) < 1e-6);
  CHECK(std::abs(t_obs - eq.t_star) < 1e-6);
  CHECK(std::abs(i_obs - eq.i_star) < 1e-6);
}

TEST_CASE("total mass follows 1 - (1 - mass0) exp(-rt)") {
  Rng rng(77);
  const NeutralParameters p = testutil::reference_params();
  auto pert = testutil::random_pert(rng, 3, TraitMask::all(), 0.5);
  const auto sp = realize_traits(p, pert, 0.05);
  const FullState st0 = random_state(rng, 3, 0.9);
  SolverConfig cfg;
  cfg.samples = 51;
  const Trajectory traj = integrate_full(st0, sp, p, 5.0, cfg);
  for (std::size_t s = 0; s < traj.times.size(); ++s) {
    const double expected = 1.0 - 0.1 * std::exp(-p.r * traj.times[s]);
    CHECK(std::abs(traj.states[s].total_mass() - expected) < 10.0 * cfg.rtol);
  }
}

TEST_CASE("zero infection stays zero and S fills up") {
  const NeutralParameters p = testutil::reference_params();
  auto pert = TraitPerturbations::zeros(2);
  const auto sp = realize_traits(p, pert, 0.0);
  FullState st0 = FullState::zero(2);
  st0.s = 0.4;
  SolverConfig cfg;
  cfg.samples = 11;
  const Trajectory traj = integrate_full(st0, sp, p, 20.0, cfg);
  for (const auto& st : traj.states) {
    CHECK(st.i_single.cwiseAbs().maxCoeff() == 0.0);
    CHECK(st.i_double.cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK(traj.states.back().s == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("relabeling strains permutes the trajectory") {
  Rng rng(88);
  const NeutralParameters p = testutil::reference_params();
  const int n = 4;
  auto pert = testutil::random_pert(rng, n, TraitMask::all(), 0.6);
  const auto eq = neutral_equilibrium(p, pert.mask);
  const Eigen::VectorXd z0 = testutil::random_simplex(rng, n);

  std::vector<int> perm{2, 0, 3, 1};
  auto pm = TraitPerturbations::zeros(n);
  pm.mask = pert.mask;
  Eigen::VectorXd z0p(n);
  for (int i = 0; i < n; ++i) {
    pm.b(i) = pert.b(perm[i]);
    pm.nu(i) = pert.nu(perm[i]);
    z0p(i) = z0(perm[i]);
    for (int j = 0; j < n; ++j) {
      pm.u(i, j) = pert.u(perm[i], perm[j]);
      pm.omega(i, j) = pert.omega(perm[i], perm[j]);
      pm.alpha(i, j) = pert.alpha(perm[i], perm[j]);
    }
  }

  SolverConfig cfg;
  cfg.rtol = 1e-10;
  cfg.atol = 1e-12;
  cfg.samples = 6;
  const double eps = 0.04;
  const auto t1 = integrate_full(slow_manifold_state(z0, p, eq), realize_traits(p, pert, eps), p,
                                 30.0, cfg);
  const auto t2 = integrate_full(slow_manifold_state(z0p, p, eq), realize_traits(p, pm, eps), p,
                                 30.0, cfg);
  for (std::size_t s = 0; s < t1.times.size(); ++s) {
    CHECK(std::abs(t1.states[s].s - t2.states[s].s) < 1e-8);
    for (int i = 0; i < n; ++i)
      CHECK(std::abs(t1.states[s].i_single(perm[i]) - t2.states[s].i_single(i)) < 1e-8);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        CHECK(std::abs(t1.states[s].i_double(perm[i], perm[j]) - t2.states[s].i_double(i, j)) <
              1e-8);
  }
}

TEST_CASE("below-threshold transmission drives infection out") {
  const NeutralParameters p{0.8, 1.0, 0.0, 1.0};  // R0 = 0.8
  const auto sp = realize_traits(p, TraitPerturbations::zeros(2), 0.0);
  FullState st = FullState::zero(2);
  st.s = 0.4;
  st.i_single.setConstant(0.2);
  st.i_double.setConstant(0.05);
  SolverConfig cfg;
  cfg.samples = 11;
  const Trajectory traj = integrate_full(st, sp, p, 60.0, cfg);
  const auto [t_obs, i_obs, d_obs] = neutral_scalar_observables(traj.states.back());
  (void)i_obs;
  (void)d_obs;
  CHECK(t_obs < 1e-3);
}
