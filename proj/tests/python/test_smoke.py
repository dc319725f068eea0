import json
import os

import numpy as np
import pytest

import costrain


SCENARIOS = os.environ.get("COSTRAIN_SCENARIO_DIR", os.path.join(os.path.dirname(__file__), "..", "..", "scenarios"))


def reference_params():
    return costrain.NeutralParameters(beta=4.0, gamma=1.0, r=1.0, k=1.5)


def test_neutral_equilibrium_values():
    eq = costrain.neutral_equilibrium(reference_params(), [1, 2])
    assert eq.s_star == pytest.approx(0.5, abs=1e-12)
    assert eq.t_star == pytest.approx(0.5, abs=1e-12)
    assert eq.i_star == pytest.approx(0.2, abs=1e-12)
    assert eq.d_star == pytest.approx(0.3, abs=1e-12)
    assert eq.mu == pytest.approx(2.0 / 3.0, abs=1e-12)
    assert sum(eq.theta_norm) == pytest.approx(1.0, abs=1e-12)


def test_disease_free_rejected():
    bad = costrain.NeutralParameters(beta=0.5, gamma=1.0, r=0.0, k=1.0)
    with pytest.raises(ValueError):
        costrain.neutral_equilibrium(bad, [])


def test_realized_traits_and_r0():
    pert = costrain.TraitPerturbations.zeros(2)
    pert.mask = [1]
    b = np.zeros(2)
    b[0] = 0.25
    pert.b = b
    sp = costrain.realize_traits(reference_params(), pert, 0.1)
    assert sp.beta[0] == pytest.approx(4.1)
    assert sp.beta[1] == pytest.approx(4.0)
    r0 = costrain.basic_reproduction_numbers(sp, reference_params())
    assert r0[0] > r0[1]


def test_full_simulation_conserves_mass():
    params = reference_params()
    eq = costrain.neutral_equilibrium(params, [1])
    pert = costrain.TraitPerturbations.zeros(3)
    pert.mask = [1]
    pert.b = np.array([0.2, 0.0, -0.2])
    sp = costrain.realize_traits(params, pert, 0.05)
    state0 = costrain.slow_manifold_state(np.ones(3) / 3.0, params, eq)
    traj = costrain.integrate_full(state0, sp, params, 50.0)
    assert traj.states[-1].total_mass() == pytest.approx(1.0, abs=1e-7)
    proj = costrain.project_slow(traj.states[-1], sp, eq)
    assert proj.z.sum() == pytest.approx(1.0, abs=1e-12)
    assert proj.z[0] > 1.0 / 3.0  # the high-b strain gains ground


def test_replicator_matches_prediction():
    params = reference_params()
    eq = costrain.neutral_equilibrium(params, [1, 2])
    pert = costrain.TraitPerturbations.zeros(3)
    pert.mask = [1, 2]
    pert.b = np.array([0.3, 0.0, -0.1])
    pert.nu = np.array([0.5, -0.5, 0.0])
    lam = costrain.invasion_fitness(pert, eq)
    assert np.all(np.diag(lam.lambda_) == 0.0)
    winner = costrain.predict_exclusion_winner(pert, eq)
    traj = costrain.integrate_replicator(np.ones(3) / 3.0, lam, eq.theta_total, 400.0)
    assert traj.zs[-1][winner] > 0.99
    rep = costrain.detect_persistent_set(traj, 1e-3, 80.0)
    assert rep.persistent_set == [winner]
    assert rep.limit_kind == costrain.LimitKind.FixedPoint


def test_classify_pair_rows():
    assert costrain.classify_pair(0.3, 0.2) == costrain.PairwiseOutcome.Coexistence
    assert costrain.classify_pair(0.3, -0.2) == costrain.PairwiseOutcome.ExclusionOf1
    assert costrain.classify_pair(-0.3, 0.2) == costrain.PairwiseOutcome.ExclusionOf2
    assert costrain.classify_pair(-0.3, -0.2) == costrain.PairwiseOutcome.Bistability
    assert costrain.surviving_strain(costrain.PairwiseOutcome.ExclusionOf1) == 1
    with pytest.raises(ValueError):
        costrain.classify_pair(0.0, 1.0)


def test_scenario_report_roundtrip():
    path = os.path.join(SCENARIOS, "fig_exclusion_b.json")
    sc = costrain.load_scenario(path)
    assert sc.name == "fig-exclusion-b"
    report = costrain.run_report("classify", path)
    assert report["predicted_winner"] == 6
    assert report["outcome"]["persistent_set"] == [6]
    assert json.loads(costrain.run_report_json("classify", path)) == report
