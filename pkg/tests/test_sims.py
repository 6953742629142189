import math
import pickle

import numpy as np
import pytest

from resbal.sims import (BetaModel, SimulationDesign, draw, draw_many_cluster,
                         draw_misspecified, draw_moderately_sparse_two_stage,
                         draw_sparse_two_stage, draw_two_cluster, make_beta)


# ----------------------------------------------------------------- patterns

def test_very_sparse_pattern():
    beta = make_beta(BetaModel("very_sparse", 2.0), 20)
    np.testing.assert_allclose(beta[:10], 2.0 / np.sqrt(10))
    assert np.all(beta[10:] == 0.0)


def test_dense_single_coordinate():
    np.testing.assert_allclose(make_beta(BetaModel("dense", 1.7), 1), [1.7])


def test_harmonic_norm_and_ratio():
    beta = make_beta(BetaModel("harmonic", 1.0), 100)
    assert abs(np.linalg.norm(beta) - 1.0) <= 1e-12
    assert beta[0] / beta[1] == pytest.approx(11.0 / 10.0, rel=1e-12)


def test_all_patterns_hit_target_norm():
    for kind in ("dense", "harmonic", "moderately_sparse", "very_sparse",
                 "inv_square", "inv_sqrt", "inv_j"):
        for shift in (False, True):
            beta = make_beta(BetaModel(kind, 3.0), 150, index_shift=shift)
            assert abs(np.linalg.norm(beta) - 3.0) <= 1e-12, (kind, shift)


def test_index_shift_places_entries_at_multiples_of_23():
    beta = make_beta(BetaModel("very_sparse", 1.0), 229, index_shift=True)
    # pattern value at shifted position 23*(j-1) mod p is nonzero iff that
    # position falls among the first ten
    expect_nonzero = [(23 * j) % 229 < 10 for j in range(229)]
    assert np.array_equal(beta != 0.0, np.array(expect_nonzero))


def test_moderately_sparse_needs_100_columns():
    with pytest.raises(ValueError, match="p >= 100"):
        make_beta(BetaModel("moderately_sparse", 1.0), 50)


# ------------------------------------------------------------- two clusters

def test_two_cluster_treatment_rate():
    design = SimulationDesign(kind="two_cluster", n=10_000, p=4, seed=1,
                              beta=BetaModel("dense", 2.0))
    sim = draw_two_cluster(design)
    assert abs(sim.data.W.mean() - 0.5) < 0.02
    assert sim.tau_true == 1.0


def test_two_cluster_conditional_cluster_rates():
    design = SimulationDesign(kind="two_cluster", n=20_000, p=3, seed=2,
                              beta=BetaModel("dense", 2.0))
    sim = draw_two_cluster(design)
    w = sim.data.W
    shifted = sim.oracle_info["cluster"]
    p_base_given_control = 1.0 - shifted[w == 0].mean()
    p_base_given_treated = 1.0 - shifted[w == 1].mean()
    assert abs(p_base_given_control - 0.8) < 0.02
    assert abs(p_base_given_treated - 0.2) < 0.02


def test_two_cluster_dense_separation_value():
    # with n = 1600 the dense separation is 0.1 in every coordinate
    design = SimulationDesign(kind="two_cluster", n=1600, p=5, seed=3,
                              beta=BetaModel("dense", 2.0))
    sim = draw_two_cluster(design)
    shifted = sim.oracle_info["cluster"].astype(bool)
    # recover the separation from the group means of X - Z is not possible,
    # so regenerate the noise-free shift: E[X | shifted] - E[X | base] = delta
    gap = sim.data.X[shifted].mean(axis=0) - sim.data.X[~shifted].mean(axis=0)
    np.testing.assert_allclose(gap, 4.0 / np.sqrt(1600), atol=0.15)
    assert 4.0 / np.sqrt(1600) == 0.1


def test_two_cluster_sparse_separation_support():
    design = SimulationDesign(kind="two_cluster", n=2500, p=25, seed=4,
                              beta=BetaModel("very_sparse", 2.0), delta_kind="sparse")
    sim = draw_two_cluster(design)
    shifted = sim.oracle_info["cluster"].astype(bool)
    gap = sim.data.X[shifted].mean(axis=0) - sim.data.X[~shifted].mean(axis=0)
    # separation lives on coordinates 1, 11, 21 (1-based)
    hot = np.abs(gap) > 0.4
    assert set(np.flatnonzero(hot)) == {0, 10, 20}


# ------------------------------------------------------------ many clusters

def test_many_cluster_marginal_rate_and_blocks():
    design = SimulationDesign(kind="many_cluster", n=20_000, p=12, seed=5,
                              beta=BetaModel("very_sparse", 3.0), eta=0.1)
    sim = draw_many_cluster(design)
    w = sim.data.W
    assert abs(w.mean() - 0.5) < 0.02
    labels = sim.oracle_info["cluster"]
    first_block = labels < 10
    assert abs(w[first_block].mean() - 0.1) < 0.02
    assert abs(w[~first_block].mean() - 0.9) < 0.02
    assert abs(np.linalg.norm(sim.oracle_info["beta"]) - 3.0) <= 1e-12


def test_many_cluster_label_symmetry():
    # swapping eta <-> 1-eta relabels the blocks: treated fractions agree
    stats = []
    for eta in (0.25, 0.75):
        vals = []
        for rep in range(60):
            design = SimulationDesign(kind="many_cluster", n=400, p=3, seed=11,
                                      beta=BetaModel("dense", 3.0), eta=eta)
            sim = draw_many_cluster(design, rep)
            vals.append(sim.data.W.mean())
        stats.append(np.mean(vals))
    assert abs(stats[0] - stats[1]) < 0.02


# ---------------------------------------------------------------- two-stage

def test_sparse_two_stage_autocorrelation():
    design = SimulationDesign(kind="sparse_two_stage", n=10_000, p=40, seed=6,
                              rho=0.6, beta=BetaModel("inv_square", 1.0))
    sim = draw_sparse_two_stage(design)
    X = sim.data.X
    lag1 = np.mean([np.corrcoef(X[:, j], X[:, j + 1])[0, 1] for j in range(10)])
    lag2 = np.mean([np.corrcoef(X[:, j], X[:, j + 2])[0, 1] for j in range(10)])
    assert abs(lag1 - 0.6) < 0.02
    assert abs(lag2 - 0.36) < 0.02
    assert abs(X.std(axis=0).mean() - 1.0) < 0.02
    assert sim.tau_true == 0.5


def test_sparse_two_stage_independent_columns_at_rho_zero():
    design = SimulationDesign(kind="sparse_two_stage", n=8000, p=10, seed=7, rho=0.0)
    sim = draw_sparse_two_stage(design)
    X = sim.data.X
    assert abs(np.corrcoef(X[:, 0], X[:, 1])[0, 1]) < 0.03
    assert abs(X[:, 3].var() - 1.0) < 0.05


def test_sparse_two_stage_assignment_leans_against_theta():
    design = SimulationDesign(kind="sparse_two_stage", n=20_000, p=10, seed=8,
                              beta_w_kind="very_sparse", beta_w_norm=4.0)
    sim = draw_sparse_two_stage(design)
    w = sim.data.W
    assign = sim.oracle_info["assignment_prob"]
    # realized treatment matches the stated probabilities
    hi = assign > 0.7
    assert abs(w[hi].mean() - assign[hi].mean()) < 0.03


def test_moderately_sparse_two_stage_rate():
    design = SimulationDesign(kind="moderately_sparse_two_stage", n=20_000, p=120,
                              seed=9, beta=BetaModel("harmonic", 1.0), rho=0.5)
    sim = draw_moderately_sparse_two_stage(design)
    # sigmoid of a symmetric index: marginal treatment rate one half
    assert abs(sim.data.W.mean() - 0.5) < 0.02
    assert sim.tau_true == 0.5
    assert abs(np.linalg.norm(sim.oracle_info["beta_y"]) - 1.0) <= 1e-12


# -------------------------------------------------------------- misspecified

def test_misspecified_latent_formula():
    design = SimulationDesign(kind="misspecified", n=500, p=12, seed=10)
    sim = draw_misspecified(design)
    x1 = sim.data.X[:, 0]
    theta = sim.oracle_info["theta"]
    # independent recomputation, term by term, in scalar arithmetic
    for i in range(0, 500, 61):
        ref = math.log1p(math.exp(-2.0 - 2.0 * x1[i])) / 0.915
        assert theta[i] == pytest.approx(ref, rel=1e-12)
    assert math.log1p(math.exp(-2.0)) / 0.915 == pytest.approx(0.13872, abs=5e-6)


def test_misspecified_probabilities_in_unit_interval():
    design = SimulationDesign(kind="misspecified", n=2000, p=10, seed=11)
    sim = draw_misspecified(design)
    prob = sim.oracle_info["assignment_prob"]
    assert prob.min() > 0.0 and prob.max() < 1.0


def test_misspecified_treated_gain_larger():
    wins = 0
    for rep in range(40):
        design = SimulationDesign(kind="misspecified", n=400, p=10, seed=12)
        sim = draw_misspecified(design, rep)
        theta = sim.oracle_info["theta"]
        if sim.tau_true > theta.mean():
            wins += 1
    assert wins >= 38


def test_misspecified_truth_is_treated_mean_effect():
    design = SimulationDesign(kind="misspecified", n=300, p=10, seed=13)
    sim = draw_misspecified(design)
    theta = sim.oracle_info["theta"]
    assert sim.tau_true == pytest.approx(theta[sim.data.W == 1].mean(), rel=1e-12)


# ------------------------------------------------------------- determinism

def test_draws_are_bit_reproducible():
    for kind, extra in (
        ("two_cluster", {"beta": BetaModel("dense", 2.0)}),
        ("many_cluster", {"beta": BetaModel("very_sparse", 3.0)}),
        ("sparse_two_stage", {}),
        ("moderately_sparse_two_stage", {"beta": BetaModel("harmonic", 1.0), "p": 110}),
        ("misspecified", {}),
    ):
        kw = {"kind": kind, "n": 60, "p": 20, "seed": 77, **extra}
        a = draw(SimulationDesign(**kw), rep=5)
        b = draw(SimulationDesign(**kw), rep=5)
        assert pickle.dumps(a.data.X) == pickle.dumps(b.data.X)
        assert np.array_equal(a.data.W, b.data.W)
        assert np.array_equal(a.data.Y, b.data.Y)
        assert a.tau_true == b.tau_true
        c = draw(SimulationDesign(**kw), rep=6)
        assert not np.array_equal(a.data.Y, c.data.Y)


def test_design_validation():
    with pytest.raises(ValueError, match="unknown design"):
        SimulationDesign(kind="bogus", n=10, p=2)
    with pytest.raises(ValueError, match="needs a BetaModel"):
        draw(SimulationDesign(kind="two_cluster", n=10, p=4))
    with pytest.raises(ValueError, match="p >= 100"):
        draw(SimulationDesign(kind="moderately_sparse_two_stage", n=10, p=20,
                              beta=BetaModel("dense", 1.0)))


def test_default_names():
    d = SimulationDesign(kind="two_cluster", n=10, p=4,
                         beta=BetaModel("very_sparse", 2.0), delta_kind="sparse")
    assert d.name == "two_cluster/very_sparse/sparse"
    d = SimulationDesign(kind="misspecified", n=400, p=100)
    assert d.name == "misspecified/n400/p100"
