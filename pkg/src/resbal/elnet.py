"""Penalized linear and logistic regression with a cross-validated penalty path.

The objective is kept in unnormalized form,

    sum_i sw_i * loss_i  +  lam * ((1 - alpha) * ||beta||_2^2 + alpha * ||beta||_1),

so ``lam`` here plays the role of ``2 * n * lambda`` in the common
1/(2n)-scaled lasso convention (the ridge part then differs by a further
factor of two; the two conventions agree exactly at ``alpha = 1``).  When
``standardize`` is on, columns are centered and scaled to unit sample
standard deviation before fitting, the penalty applies on that scale, and
coefficients are mapped back to the original scale afterwards.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from . import _cd
from .data import DataError


class ConvergenceWarning(UserWarning):
    """A solver stopped at its iteration cap before meeting its tolerance."""


@dataclass(frozen=True)
class PenaltyConfig:
    """Penalty and solver settings for a single fit.

    ``tol`` bounds the largest coefficient move per sweep (on the scale being
    fit); ``kkt_tol`` is the stationarity residual at which a fit is declared
    converged.
    """

    lam: float = 1.0
    alpha: float = 0.9
    standardize: bool = True
    fit_intercept: bool = True
    max_iter: int = 100_000
    tol: float = 1e-7
    kkt_tol: float = 1e-7

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError("alpha must lie in (0, 1]")
        if self.lam < 0.0:
            raise ValueError("lam must be nonnegative")
        if self.tol <= 0.0 or self.kkt_tol <= 0.0:
            raise ValueError("tolerances must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")


@dataclass(frozen=True)
class LinearFit:
    """A fitted penalized model on the original covariate scale."""

    beta: np.ndarray
    intercept: float
    support: np.ndarray
    objective: float
    lambda_used: float
    family: str = "gaussian"
    kkt_residual: float = np.nan
    n_sweeps: int = 0
    converged: bool = True
    capped: bool = False


@dataclass(frozen=True)
class CvPath:
    """Cross-validation curve over a decreasing penalty grid."""

    lambdas: np.ndarray
    cv_mean: np.ndarray
    cv_se: np.ndarray
    lambda_min: float
    lambda_1se: float

    def __post_init__(self) -> None:
        if (np.diff(self.lambdas) >= 0).any():
            raise ValueError("lambda grid must be strictly decreasing")
        if self.lambda_1se < self.lambda_min:
            raise ValueError("lambda_1se must be >= lambda_min")


_LOGISTIC_COEF_CAP = 50.0  # on the standardized scale; far beyond any useful logit


def _as_weights(sample_weight, n: int) -> np.ndarray:
    if sample_weight is None:
        return np.ones(n)
    sw = np.asarray(sample_weight, dtype=np.float64).ravel()
    if sw.shape != (n,) or (sw < 0).any() or not np.isfinite(sw).all() or sw.sum() <= 0:
        raise ValueError("sample weights must be nonnegative, finite, with positive sum")
    return sw


def _standardize(X: np.ndarray, sw: np.ndarray, center: bool) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    wsum = sw.sum()
    mean = (sw @ X) / wsum
    var = (sw @ (X - mean) ** 2) / wsum
    scale = np.sqrt(var)
    scale[scale == 0.0] = 1.0  # constant columns keep coefficient zero
    if not center:
        mean = np.zeros_like(mean)  # without an intercept there is nothing to absorb a shift
    return np.asfortranarray((X - mean) / scale), mean, scale


def _prepare(X, y, cfg: PenaltyConfig, sw: np.ndarray, center_y: bool):
    """Common standardization plumbing; returns the solver-side problem."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("X must be 2-d")
    y = np.asarray(y, dtype=np.float64).ravel()
    if y.shape[0] != X.shape[0]:
        raise ValueError("X and y disagree on the number of rows")
    if cfg.standardize:
        Xs, mean, scale = _standardize(X, sw, center=cfg.fit_intercept)
    else:
        Xs = np.asfortranarray(X)
        mean = np.zeros(X.shape[1])
        scale = np.ones(X.shape[1])
    ym = 0.0
    if center_y and cfg.fit_intercept and cfg.standardize:
        ym = float(sw @ y / sw.sum())
        y = y - ym
    return Xs, y, mean, scale, ym


def _back_transform(beta_s: np.ndarray, b0_s: float, mean, scale, ym: float,
                    fit_intercept: bool) -> tuple[np.ndarray, float]:
    beta = beta_s / scale
    intercept = ym + b0_s - float(beta @ mean) if fit_intercept else float(b0_s)
    return beta, intercept


def fit_gaussian(X, y, cfg: PenaltyConfig, sample_weight=None) -> LinearFit:
    """Penalized least squares by coordinate descent.

    Minimizes ``sum(sw * (y - b0 - X beta)^2) + lam * ((1-alpha)||beta||_2^2 +
    alpha ||beta||_1)``.  With ``standardize`` on, the reported ``objective``
    and ``kkt_residual`` refer to the standardized problem the solver saw.
    """
    sw = _as_weights(sample_weight, np.asarray(X).shape[0])
    Xs, ys, mean, scale, ym = _prepare(X, y, cfg, sw, center_y=True)
    # with weighted centering the intercept of the centered problem is zero
    kernel_icept = cfg.fit_intercept and not cfg.standardize
    beta_s = np.zeros(Xs.shape[1])
    b0_s, kkt, sweeps, obj, monotone, converged = _cd.gaussian_cd(
        Xs, ys, sw, cfg.lam, cfg.alpha, kernel_icept, beta_s, 0.0,
        cfg.tol, cfg.kkt_tol, cfg.max_iter,
    )
    if not converged:
        warnings.warn(
            f"gaussian fit stopped after {sweeps} sweeps with stationarity residual "
            f"{kkt:.3e} (> {cfg.kkt_tol:g})",
            ConvergenceWarning,
        )
    if not monotone:
        warnings.warn("objective increased across a sweep", ConvergenceWarning)
    beta, intercept = _back_transform(beta_s, b0_s, mean, scale, ym, cfg.fit_intercept)
    return LinearFit(
        beta=beta, intercept=intercept, support=np.flatnonzero(beta_s),
        objective=float(obj), lambda_used=cfg.lam, family="gaussian",
        kkt_residual=float(kkt), n_sweeps=int(sweeps), converged=bool(converged),
    )


def fit_logistic(X, w, cfg: PenaltyConfig, sample_weight=None) -> LinearFit:
    """Penalized logistic regression (same penalty form, binomial likelihood)."""
    w01 = np.asarray(w, dtype=np.float64).ravel()
    if not np.isin(w01, (0.0, 1.0)).all():
        raise DataError("logistic response must be binary (0/1)")
    if w01.min() == w01.max():
        raise DataError("logistic fit needs both classes present")
    sw = _as_weights(sample_weight, w01.shape[0])
    Xs, _, mean, scale, _ = _prepare(X, w01, cfg, sw, center_y=False)
    beta_s = np.zeros(Xs.shape[1])
    wbar = float(sw @ w01 / sw.sum())
    b0_init = float(np.log(wbar / (1.0 - wbar))) if cfg.fit_intercept else 0.0
    b0_s, kkt, outer, capped, converged = _cd.logistic_cd(
        Xs, w01, sw, cfg.lam, cfg.alpha, cfg.fit_intercept, beta_s, b0_init,
        cfg.tol, cfg.kkt_tol, 200, cfg.max_iter, _LOGISTIC_COEF_CAP,
    )
    if capped:
        warnings.warn(
            "logistic coefficients hit the divergence cap (data may be separable); "
            "estimates were clamped",
            ConvergenceWarning,
        )
    elif not converged:
        warnings.warn(
            f"logistic fit stopped after {outer} outer steps with stationarity "
            f"residual {kkt:.3e} (> {cfg.kkt_tol:g})",
            ConvergenceWarning,
        )
    beta, intercept = _back_transform(beta_s, b0_s, mean, scale, 0.0, cfg.fit_intercept)
    eta = intercept + np.asarray(X, dtype=np.float64) @ beta
    prob = _sigmoid(eta)
    nll = -float(np.sum(sw * (w01 * np.log(prob) + (1 - w01) * np.log1p(-prob))))
    obj = nll + cfg.lam * ((1 - cfg.alpha) * beta_s @ beta_s + cfg.alpha * np.abs(beta_s).sum())
    return LinearFit(
        beta=beta, intercept=intercept, support=np.flatnonzero(beta_s),
        objective=float(obj), lambda_used=cfg.lam, family="binomial",
        kkt_residual=float(kkt), n_sweeps=int(outer), converged=bool(converged),
        capped=bool(capped),
    )


def _sigmoid(eta: np.ndarray) -> np.ndarray:
    out = np.empty_like(eta)
    pos = eta >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-eta[pos]))
    ez = np.exp(eta[~pos])
    out[~pos] = ez / (1.0 + ez)
    return np.clip(out, 1e-12, 1.0 - 1e-12)


def predict(fit: LinearFit, Xnew) -> np.ndarray:
    """Linear predictor (Gaussian) or fitted probability (binomial)."""
    Xnew = np.atleast_2d(np.asarray(Xnew, dtype=np.float64))
    if Xnew.shape[1] != fit.beta.shape[0]:
        raise ValueError(
            f"column mismatch: fit has {fit.beta.shape[0]} coefficients, "
            f"input has {Xnew.shape[1]} columns"
        )
    eta = fit.intercept + Xnew @ fit.beta
    if fit.family == "binomial":
        return _sigmoid(eta)
    return eta


def lambda_grid(X, y, family: str, alpha: float, sw: np.ndarray, fit_intercept: bool,
                n_lambda: int = 100, min_ratio: float | None = None) -> np.ndarray:
    """Geometric penalty grid from the all-zero threshold downwards.

    ``lambda_max`` is the smallest penalty at which every coefficient is zero;
    the grid descends to ``min_ratio * lambda_max`` (1e-3 when n < p, else
    1e-4, the usual path defaults).
    """
    n, p = X.shape
    if min_ratio is None:
        min_ratio = 1e-3 if n < p else 1e-4
    if family == "gaussian":
        resid = y - (sw @ y / sw.sum() if fit_intercept else 0.0)
        lam_max = np.abs(2.0 * (sw * resid) @ X).max() / alpha
    elif family == "binomial":
        wbar = sw @ y / sw.sum() if fit_intercept else 0.5
        lam_max = np.abs((sw * (y - wbar)) @ X).max() / alpha
    else:
        raise ValueError(f"unknown family {family!r}")
    lam_max = max(float(lam_max), 1e-12)
    return np.geomspace(lam_max, lam_max * min_ratio, n_lambda)


def _fit_path(X, y, family, lambdas, cfg: PenaltyConfig, sw,
              tol: float | None = None, kkt_tol: float | None = None
              ) -> tuple[np.ndarray, np.ndarray]:
    """Coefficient path on the original scale: (p, L) betas and (L,) intercepts."""
    Xs, ys, mean, scale, ym = _prepare(X, y, cfg, sw, center_y=(family == "gaussian"))
    kernel_icept = cfg.fit_intercept and (family == "binomial" or not cfg.standardize)
    tol = cfg.tol if tol is None else tol
    kkt_tol = cfg.kkt_tol if kkt_tol is None else kkt_tol
    if family == "gaussian":
        B, b0s, _ = _cd.gaussian_path(
            Xs, ys, sw, lambdas, cfg.alpha, kernel_icept, tol, kkt_tol, cfg.max_iter
        )
    else:
        wbar = float(sw @ ys / sw.sum())
        b0_start = float(np.log(wbar / (1.0 - wbar))) if cfg.fit_intercept else 0.0
        B, b0s, _, _ = _cd.logistic_path(
            Xs, ys, sw, lambdas, cfg.alpha, cfg.fit_intercept, b0_start,
            tol, kkt_tol, 200, cfg.max_iter, _LOGISTIC_COEF_CAP,
        )
    betas = B / scale[:, None]
    if cfg.fit_intercept:
        icepts = ym + b0s - mean @ betas
    else:
        icepts = b0s
    return betas, icepts


def _fold_ids(n: int, k: int, rng: np.random.Generator, strata: np.ndarray | None) -> np.ndarray:
    ids = np.empty(n, dtype=np.int64)
    if strata is None:
        perm = rng.permutation(n)
        for f, chunk in enumerate(np.array_split(perm, k)):
            ids[chunk] = f
    else:
        # deal each class round-robin so every training set keeps both classes
        offset = 0
        for value in np.unique(strata):
            members = rng.permutation(np.flatnonzero(strata == value))
            ids[members] = (np.arange(members.size) + offset) % k
            offset += members.size
    return ids


def cv_select(
    X,
    y,
    family: str = "gaussian",
    alpha: float = 0.9,
    k_folds: int = 10,
    cfg: PenaltyConfig | None = None,
    sample_weight=None,
    rng: np.random.Generator | None = None,
    n_lambda: int = 100,
    min_ratio: float | None = None,
) -> CvPath:
    """K-fold cross-validation over a shared penalty grid.

    The held-out loss is mean squared error (Gaussian) or mean binomial
    deviance.  ``lambda_1se`` is the largest penalty whose mean loss stays
    within one standard error of the minimum; fold assignment comes from the
    caller's ``rng`` so repeated calls are reproducible.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).ravel()
    n = X.shape[0]
    if not 2 <= k_folds <= n:
        raise ValueError("k_folds must lie between 2 and n")
    cfg = cfg or PenaltyConfig()
    cfg = replace(cfg, alpha=alpha)
    sw = _as_weights(sample_weight, n)
    rng = rng or np.random.default_rng(0)

    lambdas = lambda_grid(_prepare(X, y, cfg, sw, family == "gaussian")[0],
                          y, family, alpha, sw, cfg.fit_intercept, n_lambda, min_ratio)

    strata = None
    if family == "binomial":
        if np.unique(y).size < 2:
            raise DataError("logistic fit needs both classes present")
        strata = y
    ids = _fold_ids(n, k_folds, rng, strata)

    # held-out losses are insensitive to the last digits of the fold fits, so
    # the inner paths run with a stationarity budget tied to the grid scale
    path_tol = max(cfg.tol, 3e-5)
    path_kkt = max(cfg.kkt_tol, 3e-6 * lambdas[0] * alpha)

    obs_loss = np.empty((n, lambdas.size))
    for f in range(k_folds):
        test = ids == f
        train = ~test
        if strata is not None and np.unique(y[train]).size < 2:
            raise DataError(
                f"fold {f} leaves a single class in the training split; "
                "use fewer folds or more data"
            )
        betas, icepts = _fit_path(X[train], y[train], family, lambdas, cfg, sw[train],
                                  tol=path_tol, kkt_tol=path_kkt)
        pred = X[test] @ betas + icepts
        if family == "gaussian":
            obs_loss[test] = (y[test, None] - pred) ** 2
        else:
            prob = np.clip(_sigmoid(pred), 1e-12, 1 - 1e-12)
            obs_loss[test] = -2.0 * (y[test, None] * np.log(prob)
                                     + (1 - y[test, None]) * np.log1p(-prob))

    # the one-standard-error band follows the classic cross-validation
    # packages: per-observation loss spread scaled by 1/(k-1), a deliberately
    # wide band that errs on the side of heavier shrinkage
    wsum = sw.sum()
    cv_mean = sw @ obs_loss / wsum
    cv_se = np.sqrt(sw @ (obs_loss - cv_mean) ** 2 / wsum / (k_folds - 1))
    i_min = int(np.argmin(cv_mean))
    cutoff = cv_mean[i_min] + cv_se[i_min]
    i_1se = int(np.flatnonzero(cv_mean <= cutoff)[0])  # grid decreases, first hit = largest lam
    return CvPath(
        lambdas=lambdas, cv_mean=cv_mean, cv_se=cv_se,
        lambda_min=float(lambdas[i_min]), lambda_1se=float(lambdas[i_1se]),
    )


def fit_cv(
    X,
    y,
    family: str = "gaussian",
    alpha: float = 0.9,
    k_folds: int = 10,
    cfg: PenaltyConfig | None = None,
    sample_weight=None,
    rng: np.random.Generator | None = None,
    n_lambda: int = 100,
    min_ratio: float | None = None,
    rule: str = "1se",
) -> tuple[LinearFit, CvPath]:
    """Cross-validate the penalty, then refit on the full sample.

    ``rule`` picks the conservative one-standard-error penalty (default) or
    the loss-minimizing one (``"min"``).
    """
    path = cv_select(X, y, family, alpha, k_folds, cfg, sample_weight, rng,
                     n_lambda, min_ratio)
    lam = path.lambda_1se if rule == "1se" else path.lambda_min
    cfg = replace(cfg or PenaltyConfig(), alpha=alpha, lam=lam)
    if family == "gaussian":
        fit = fit_gaussian(X, y, cfg, sample_weight)
    else:
        fit = fit_logistic(X, y, cfg, sample_weight)
    return fit, path
