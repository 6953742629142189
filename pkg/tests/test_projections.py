import numpy as np
import pytest

from resbal._projections import project_box, project_capped_simplex, project_sup_norm_cone

from oracles import cone_projection_ref, projection_qp


def test_capped_simplex_matches_qp_oracle():
    rng = np.random.default_rng(0)
    for trial in range(40):
        n = int(rng.integers(1, 30))
        x = rng.standard_normal(n) * rng.choice([0.1, 1.0, 10.0])
        cap = float(rng.uniform(1.2 / n, 1.5))
        got = project_capped_simplex(x, cap)
        want = projection_qp(x, cap)
        np.testing.assert_allclose(got, want, atol=5e-7)
        assert abs(got.sum() - 1.0) < 1e-10
        assert got.min() >= -1e-12 and got.max() <= cap + 1e-12


def test_capped_simplex_with_ties():
    x = np.array([0.3, 0.3, 0.3, -0.1, -0.1])
    got = project_capped_simplex(x, 0.4)
    want = projection_qp(x, 0.4)
    np.testing.assert_allclose(got, want, atol=1e-8)


def test_capped_simplex_tight_cap():
    # cap * n == total pins every coordinate at the cap
    got = project_capped_simplex(np.array([5.0, -3.0, 0.2, 0.1]), 0.25)
    np.testing.assert_allclose(got, 0.25, atol=1e-12)


def test_capped_simplex_infeasible():
    with pytest.raises(ValueError, match="empty"):
        project_capped_simplex(np.zeros(3), 0.2)


def test_single_element_simplex():
    np.testing.assert_allclose(project_capped_simplex(np.array([-4.0]), 1.0), [1.0])


def test_sup_norm_cone_matches_reference():
    rng = np.random.default_rng(1)
    for trial in range(40):
        p = int(rng.integers(1, 25))
        v = rng.standard_normal(p) * rng.choice([0.3, 1.0, 5.0])
        r = float(rng.standard_normal() * 2.0)
        u, s = project_sup_norm_cone(v, r)
        u_ref, s_ref = cone_projection_ref(v, r)
        assert abs(s - s_ref) < 5e-6
        np.testing.assert_allclose(u, u_ref, atol=5e-6)
        assert np.abs(u).max() <= s + 1e-12


def test_sup_norm_cone_interior_point_unchanged():
    v = np.array([0.1, -0.2])
    u, s = project_sup_norm_cone(v, 0.5)
    assert s == 0.5
    np.testing.assert_array_equal(u, v)


def test_sup_norm_cone_tip():
    u, s = project_sup_norm_cone(np.array([0.1, -0.1]), -5.0)
    assert s == 0.0
    np.testing.assert_array_equal(u, np.zeros(2))


def test_box_projection():
    np.testing.assert_array_equal(project_box(np.array([-2.0, 0.1, 3.0]), 1.0),
                                  [-1.0, 0.1, 1.0])
