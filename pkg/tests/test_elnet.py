import numpy as np
import pytest

from resbal import _cd
from resbal.data import DataError
from resbal.elnet import (ConvergenceWarning, CvPath, PenaltyConfig, cv_select,
                          fit_cv, fit_gaussian, fit_logistic, predict)

from oracles import coordinate_brute_force, penalized_logistic_ref


def raw_cfg(lam, alpha=0.9, **kw):
    return PenaltyConfig(lam=lam, alpha=alpha, standardize=False, **kw)


def gaussian_objective(X, y, beta, intercept, lam, alpha, sw=None):
    sw = np.ones(len(y)) if sw is None else sw
    r = y - intercept - X @ beta
    return float(sw @ (r * r) + lam * ((1 - alpha) * beta @ beta + alpha * np.abs(beta).sum()))


def external_gaussian_kkt(X, y, beta, intercept, lam, alpha, fit_intercept=True):
    r = y - intercept - X @ beta
    g = -2.0 * X.T @ r
    worst = 0.0
    for j in range(X.shape[1]):
        if beta[j] == 0.0:
            worst = max(worst, abs(g[j]) - lam * alpha)
        else:
            worst = max(worst, abs(g[j] + 2 * lam * (1 - alpha) * beta[j]
                                   + lam * alpha * np.sign(beta[j])))
    if fit_intercept:
        worst = max(worst, abs(2 * r.sum()))
    return worst


# ------------------------------------------------------------- gaussian fits

def test_huge_penalty_gives_intercept_only():
    rng = np.random.default_rng(0)
    X = rng.standard_normal((30, 5))
    y = rng.standard_normal(30) + 2.0
    fit = fit_gaussian(X, y, PenaltyConfig(lam=1e12))
    assert np.all(fit.beta == 0.0)
    assert fit.intercept == pytest.approx(y.mean(), abs=1e-12)
    assert fit.support.size == 0


def test_zero_penalty_interpolates_single_column():
    rng = np.random.default_rng(1)
    x = rng.standard_normal((25, 1))
    y = 3.0 * x[:, 0]
    fit = fit_gaussian(x, y, raw_cfg(0.0, alpha=1.0, fit_intercept=False))
    assert fit.beta[0] == pytest.approx(3.0, abs=1e-10)


def test_orthonormal_design_soft_threshold():
    rng = np.random.default_rng(2)
    Q, _ = np.linalg.qr(rng.standard_normal((40, 6)))
    X = Q
    y = rng.standard_normal(40)
    lam = 0.8
    fit = fit_gaussian(X, y, raw_cfg(lam, alpha=1.0, fit_intercept=False))
    z = X.T @ y
    closed = np.sign(z) * np.maximum(np.abs(z) - lam / 2.0, 0.0)
    np.testing.assert_allclose(fit.beta, closed, atol=1e-9)
    # every coordinate also survives a one-dimensional brute-force search
    for j in range(6):
        best = coordinate_brute_force(X, y, fit.beta, 0.0, lam, 1.0, j)
        assert abs(best - fit.beta[j]) < 1e-8


def test_kkt_on_random_fits():
    rng = np.random.default_rng(3)
    for trial in range(10):
        n = int(rng.integers(15, 60))
        p = int(rng.integers(2, 50))
        X = rng.standard_normal((n, p))
        y = X @ (rng.standard_normal(p) * (rng.random(p) < 0.3)) + rng.standard_normal(n)
        lam = float(rng.uniform(0.5, 30.0))
        alpha = float(rng.uniform(0.3, 1.0))
        fit = fit_gaussian(X, y, raw_cfg(lam, alpha))
        assert external_gaussian_kkt(X, y, fit.beta, fit.intercept, lam, alpha) <= 1e-6


def test_kkt_standardized_scale():
    rng = np.random.default_rng(4)
    X = rng.standard_normal((40, 12)) * np.array([10.0] * 6 + [0.1] * 6)
    y = X[:, 0] * 0.3 + rng.standard_normal(40)
    lam, alpha = 5.0, 0.9
    fit = fit_gaussian(X, y, PenaltyConfig(lam=lam, alpha=alpha))
    # reconstruct the standardized problem the solver saw and check there
    mean, sd = X.mean(axis=0), X.std(axis=0)
    Xs = (X - mean) / sd
    ys = y - y.mean()
    beta_s = fit.beta * sd
    assert external_gaussian_kkt(Xs, ys, beta_s, 0.0, lam, alpha, fit_intercept=False) <= 1e-6
    assert fit.kkt_residual <= 1e-7


def test_constant_column_handled():
    rng = np.random.default_rng(5)
    X = np.column_stack([np.full(20, 3.0), rng.standard_normal(20)])
    y = 2.0 * X[:, 1] + 1.0
    fit = fit_gaussian(X, y, PenaltyConfig(lam=1e-6))
    assert fit.beta[0] == 0.0  # constant column acts only through the intercept
    assert predict(fit, X)[0] == pytest.approx(y[0], abs=1e-4)


def test_objective_monotone_over_sweeps():
    rng = np.random.default_rng(6)
    for trial in range(5):
        n, p = 30, 20
        X = np.asfortranarray(rng.standard_normal((n, p)))
        y = rng.standard_normal(n)
        beta = np.zeros(p)
        _, _, _, _, monotone, converged = _cd.gaussian_cd(
            X, y, np.ones(n), 3.0, 0.8, True, beta, 0.0, 1e-7, 1e-7, 100000)
        assert monotone and converged


def test_warm_path_matches_cold_fits():
    rng = np.random.default_rng(7)
    n, p = 40, 30
    X = rng.standard_normal((n, p))
    y = X @ (rng.standard_normal(p) * (rng.random(p) < 0.4)) + rng.standard_normal(n)
    lambdas = np.geomspace(50.0, 0.5, 12)
    Xs = np.asfortranarray(X)
    B, b0s, _ = _cd.gaussian_path(Xs, y, np.ones(n), lambdas, 0.9, True, 1e-9, 1e-9, 100000)
    for k, lam in enumerate(lambdas):
        cold = fit_gaussian(X, y, raw_cfg(lam, 0.9))
        obj_warm = gaussian_objective(X, y, B[:, k], b0s[k], lam, 0.9)
        obj_cold = gaussian_objective(X, y, cold.beta, cold.intercept, lam, 0.9)
        assert abs(obj_warm - obj_cold) <= 1e-8 * max(1.0, obj_cold)


def test_outcome_scaling_equivariance():
    # with standardization off, alpha = 1 and lam -> c*lam, scaling y by c
    # scales the solution by exactly c; scaling the stopping thresholds along
    # (a power of two keeps every float operation exact) makes the two runs
    # bit-identical
    rng = np.random.default_rng(8)
    X = rng.standard_normal((30, 10))
    y = X[:, 0] - X[:, 3] + rng.standard_normal(30)
    c = 4.0
    f1 = fit_gaussian(X, y, raw_cfg(2.0, alpha=1.0))
    f2 = fit_gaussian(X, c * y, raw_cfg(c * 2.0, alpha=1.0, tol=c * 1e-7,
                                        kkt_tol=c * 1e-7))
    np.testing.assert_array_equal(f2.beta, c * f1.beta)
    assert f2.intercept == c * f1.intercept


def test_weighted_fit_coordinatewise_optimal():
    rng = np.random.default_rng(9)
    n, p = 25, 4
    X = rng.standard_normal((n, p))
    y = X[:, 0] + rng.standard_normal(n)
    sw = rng.uniform(0.2, 2.0, size=n)
    lam, alpha = 3.0, 0.7
    fit = fit_gaussian(X, y, raw_cfg(lam, alpha, fit_intercept=False), sample_weight=sw)
    for j in range(p):
        best = coordinate_brute_force(X, y, fit.beta, 0.0, lam, alpha, j, sw=sw)
        assert abs(best - fit.beta[j]) < 1e-7


def test_nonconvergence_is_reported():
    rng = np.random.default_rng(10)
    X = rng.standard_normal((30, 40))
    y = rng.standard_normal(30)
    with pytest.warns(ConvergenceWarning, match="stationarity residual"):
        fit = fit_gaussian(X, y, raw_cfg(0.01, alpha=1.0, max_iter=3))
    assert not fit.converged
    assert np.isfinite(fit.kkt_residual)


# ------------------------------------------------------------- logistic fits

def test_logistic_huge_penalty_intercept_only():
    rng = np.random.default_rng(11)
    X = rng.standard_normal((50, 4))
    w = (rng.random(50) < 0.3).astype(float)
    fit = fit_logistic(X, w, PenaltyConfig(lam=1e12))
    assert np.all(fit.beta == 0.0)
    assert fit.intercept == pytest.approx(np.log(w.mean() / (1 - w.mean())), abs=1e-8)


def test_logistic_symmetric_balanced():
    x = np.array([[-1.0], [-1.0], [1.0], [1.0]] * 5)
    w = (x[:, 0] > 0).astype(float)
    fit = fit_logistic(x, w, raw_cfg(0.5, alpha=0.5))
    assert abs(fit.intercept) < 1e-8
    assert fit.beta[0] > 0.1


def test_logistic_matches_numerical_oracle():
    rng = np.random.default_rng(12)
    n, p = 30, 3
    X = rng.standard_normal((n, p))
    w = (rng.random(n) < 1.0 / (1.0 + np.exp(-X[:, 0]))).astype(float)
    lam, alpha = 1.5, 0.8
    fit = fit_logistic(X, w, raw_cfg(lam, alpha))
    assert fit.kkt_residual <= 1e-6
    obj_ref = penalized_logistic_ref(X, w, lam, alpha)
    assert fit.objective <= obj_ref + 1e-8 * max(1.0, abs(obj_ref))
    assert abs(fit.objective - obj_ref) <= 1e-6 * max(1.0, abs(obj_ref))


def test_logistic_single_class_rejected():
    with pytest.raises(DataError, match="both classes"):
        fit_logistic(np.ones((5, 1)), np.ones(5), PenaltyConfig(lam=1.0))


def test_logistic_separation_capped_with_warning():
    x = np.linspace(-2, 2, 20).reshape(-1, 1)
    w = (x[:, 0] > 0).astype(float)
    with pytest.warns(ConvergenceWarning, match="separable"):
        fit = fit_logistic(x, w, raw_cfg(1e-10, alpha=0.5))
    assert fit.capped


# ------------------------------------------------------------- cross-validation

def test_cv_pure_noise_selects_tiny_support():
    hits = 0
    for seed in range(10):
        rng = np.random.default_rng(100 + seed)
        X = rng.standard_normal((60, 50))
        y = rng.standard_normal(60)
        fit, path = fit_cv(X, y, alpha=0.9, k_folds=5, rng=np.random.default_rng(seed))
        assert path.lambda_1se >= path.lambda_min
        # the conservative rule should stay close to the all-zero end
        if fit.support.size <= 2:
            hits += 1
    assert hits >= 9


def test_cv_strong_signal_recovers_support():
    found = 0
    for seed in range(5):
        rng = np.random.default_rng(200 + seed)
        X = rng.standard_normal((80, 30))
        y = 4.0 * X[:, 7] + 0.5 * rng.standard_normal(80)
        fit, _ = fit_cv(X, y, alpha=0.9, k_folds=5, rng=np.random.default_rng(seed))
        if 7 in fit.support:
            found += 1
    assert found == 5


def test_cv_leave_one_out_runs():
    rng = np.random.default_rng(13)
    X = rng.standard_normal((10, 4))
    y = X[:, 0] + 0.1 * rng.standard_normal(10)
    path = cv_select(X, y, alpha=0.9, k_folds=10, rng=np.random.default_rng(0))
    assert path.lambda_1se >= path.lambda_min
    assert (np.diff(path.lambdas) < 0).all()


def test_cv_path_validation():
    with pytest.raises(ValueError, match="decreasing"):
        CvPath(np.array([1.0, 1.0]), np.zeros(2), np.zeros(2), 1.0, 1.0)
    with pytest.raises(ValueError, match="lambda_1se"):
        CvPath(np.array([2.0, 1.0]), np.zeros(2), np.zeros(2), 2.0, 1.0)


def test_cv_logistic_stratified_folds():
    rng = np.random.default_rng(14)
    X = rng.standard_normal((40, 5))
    w = np.zeros(40)
    w[:8] = 1.0  # rare class still lands in every training split
    path = cv_select(X, w, family="binomial", alpha=0.9, k_folds=5,
                     rng=np.random.default_rng(0))
    assert np.isfinite(path.cv_mean).all()


# ------------------------------------------------------------- predictions

def test_predict_constant_model():
    fit = fit_gaussian(np.zeros((5, 2)) + np.eye(5, 2), np.full(5, 7.0),
                       PenaltyConfig(lam=1e12))
    np.testing.assert_allclose(predict(fit, np.random.default_rng(0).standard_normal((4, 2))),
                               7.0)


def test_predict_identity_fit():
    x = np.arange(10.0).reshape(-1, 1)
    fit = fit_gaussian(x, x[:, 0], raw_cfg(0.0, alpha=1.0, fit_intercept=False))
    np.testing.assert_allclose(predict(fit, x), x[:, 0], atol=1e-9)


def test_predict_matches_manual_dot():
    rng = np.random.default_rng(15)
    X = rng.standard_normal((20, 6))
    y = rng.standard_normal(20)
    fit = fit_gaussian(X, y, PenaltyConfig(lam=4.0))
    Xnew = rng.standard_normal((7, 6))
    manual = np.array([fit.intercept + float(np.dot(row, fit.beta)) for row in Xnew])
    np.testing.assert_allclose(predict(fit, Xnew), manual, atol=1e-12)


def test_predict_dimension_mismatch():
    fit = fit_gaussian(np.random.default_rng(0).standard_normal((10, 3)),
                       np.zeros(10), PenaltyConfig(lam=1.0))
    with pytest.raises(ValueError, match="column mismatch"):
        predict(fit, np.zeros((2, 5)))
