"""Point estimation and inference for average treatment effects.

The flagship estimator regresses the control outcomes on the covariates with
an elastic net, then corrects the regression's shrinkage bias by re-weighting
its residuals with weights that approximately balance the control covariates
against the treated mean:

    mu_c_hat = pred(xbar_t) + sum_{control i} gamma_i * (Y_i - pred(X_i))
    tau_hat  = mean(Y_treated) - mu_c_hat

Every weighting baseline in this module is the same functional with a
different choice of ``gamma`` (uniform, propensity odds, minimum-norm
balancing) and/or a different outcome fit (none, weighted, fluctuated).
Confidence intervals use the weighted-residual variance on the control side
plus the mean-residual variance on the treated side.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import ndtri

from .data import ArmView, Dataset, split_by_arm, treated_mean_covariates
from .elnet import ConvergenceWarning, LinearFit, PenaltyConfig, fit_cv, predict
from .weights import BalanceProblem, BalanceWeights, ipw_weights, solve_lagrange, solve_stable
from ._rng import philox_rng

DEFAULT_TRIM = (0.05, 0.95)


class EstimationError(RuntimeError):
    """An estimator could not produce a usable answer on this dataset."""


@dataclass
class EstimateReport:
    """One estimate with its uncertainty and solver diagnostics."""

    method: str
    tau_hat: float
    mu_c_hat: float
    mu_t_hat: float
    var_hat: float
    ci_lo: float
    ci_hi: float
    level: float
    diagnostics: dict = field(default_factory=dict)
    gamma: np.ndarray | None = None
    gamma_rows: np.ndarray | None = None  # dataset rows the weights refer to


@dataclass(frozen=True)
class FitPlan:
    """Cross-validation settings for one penalized fit."""

    alpha: float = 0.9
    k_folds: int = 10
    n_lambda: int = 100
    standardize: bool = True
    rule: str = "1se"
    tol: float = 1e-7
    kkt_tol: float = 1e-7

    def config(self) -> PenaltyConfig:
        return PenaltyConfig(alpha=self.alpha, standardize=self.standardize,
                             tol=self.tol, kkt_tol=self.kkt_tol)


def _intercept_only_fit(y: np.ndarray, p: int, family: str = "gaussian") -> LinearFit:
    mean = float(np.mean(y))
    icept = mean if family == "gaussian" else float(np.log(mean / (1 - mean)))
    return LinearFit(beta=np.zeros(p), intercept=icept, support=np.array([], dtype=np.int64),
                     objective=np.nan, lambda_used=np.inf, family=family)


class SharedFits:
    """Lazily computed model fits shared by every estimator on one dataset.

    Each cross-validated fit is computed at most once per dataset so that,
    say, the augmented weighting estimator and the plain regression estimator
    disagree only through their weights, never through retuned fits.  Fold
    assignments derive from ``seed`` and a per-fit stream index, so results
    are reproducible and independent of estimator call order.
    """

    def __init__(
        self,
        data: Dataset,
        outcome_plan: FitPlan | None = None,
        propensity_plan: FitPlan | None = None,
        trim: tuple[float, float] = DEFAULT_TRIM,
        seed: int = 0,
    ) -> None:
        self.data = data
        self.outcome_plan = outcome_plan or FitPlan()
        self.propensity_plan = propensity_plan or FitPlan()
        self.trim = trim
        self.seed = seed
        self.control, self.treated = split_by_arm(data)
        self.xbar_t = treated_mean_covariates(self.treated).xi
        self.xbar_all = data.X.mean(axis=0)
        center = self.xbar_all
        scale = data.X.std(axis=0)
        scale[scale == 0.0] = 1.0
        self.balance_center = center
        self.balance_scale = scale
        self._cache: dict[str, object] = {}

    def _cv_fit(self, key: str, X, y, family: str, plan: FitPlan, stream: int,
                sample_weight=None) -> LinearFit:
        if key not in self._cache:
            if y.shape[0] < 3:
                self._cache[key] = _intercept_only_fit(y, X.shape[1], family)
            else:
                k = min(plan.k_folds, y.shape[0])
                fit, _ = fit_cv(X, y, family=family, alpha=plan.alpha, k_folds=k,
                                cfg=plan.config(), sample_weight=sample_weight,
                                rng=philox_rng(self.seed, stream),
                                n_lambda=plan.n_lambda, rule=plan.rule)
                self._cache[key] = fit
        return self._cache[key]  # type: ignore[return-value]

    @property
    def control_fit(self) -> LinearFit:
        return self._cv_fit("control", self.control.Xsub, self.control.Ysub,
                            "gaussian", self.outcome_plan, stream=1)

    @property
    def treated_fit(self) -> LinearFit:
        return self._cv_fit("treated", self.treated.Xsub, self.treated.Ysub,
                            "gaussian", self.outcome_plan, stream=2)

    @property
    def propensity_fit(self) -> LinearFit:
        return self._cv_fit("propensity", self.data.X, self.data.W.astype(np.float64),
                            "binomial", self.propensity_plan, stream=3)

    @property
    def ehat(self) -> np.ndarray:
        """Fitted treatment probabilities for every row, untrimmed."""
        if "ehat" not in self._cache:
            self._cache["ehat"] = predict(self.propensity_fit, self.data.X)
        return self._cache["ehat"]  # type: ignore[return-value]

    def odds(self, rows: np.ndarray) -> np.ndarray:
        """Trimmed propensity odds ``e/(1-e)`` for the given rows."""
        e = np.clip(self.ehat[rows], self.trim[0], self.trim[1])
        return e / (1.0 - e)

    def weighted_control_fit(self) -> LinearFit:
        """Control-arm outcome fit using propensity odds as sample weights.

        Shares the fold stream of the unweighted control fit so that constant
        odds reduce it to exactly that fit.
        """
        return self._cv_fit("weighted_control", self.control.Xsub, self.control.Ysub,
                            "gaussian", self.outcome_plan, stream=1,
                            sample_weight=self.odds(self.control.indices))

    def balance_view(self, arm: ArmView, target: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Standardized copies of an arm's covariates and a target profile.

        The sup-norm imbalance is unit-dependent, so the balance programs see
        covariates scaled by the pooled column standard deviation (centering
        is immaterial once the weights sum to one, but helps the solver).
        """
        Xs = (arm.Xsub - self.balance_center) / self.balance_scale
        xis = (target - self.balance_center) / self.balance_scale
        return np.ascontiguousarray(Xs), xis


def variance_att(residuals_c: np.ndarray, gamma: np.ndarray, residuals_t: np.ndarray,
                 n_t: int) -> tuple[float, float, float]:
    """Heteroskedasticity-robust variance pieces for the balanced estimator.

    Control side: ``V_c = sum(gamma_i^2 r_i^2)``; treated side:
    ``V_t = sum(r_i^2) / n_t^2``.  Returns ``(V_c + V_t, V_c, V_t)``.
    """
    v_c = float(np.sum(gamma ** 2 * residuals_c ** 2))
    v_t = float(np.sum(residuals_t ** 2)) / float(n_t) ** 2
    return v_c + v_t, v_c, v_t


def _z(level: float) -> float:
    if not 0.0 < level < 1.0:
        raise ValueError("level must lie in (0, 1)")
    return float(ndtri(0.5 + level / 2.0))


def _report(method: str, mu_t: float, mu_c: float, var: float, level: float,
            diagnostics: dict, gamma=None, gamma_rows=None) -> EstimateReport:
    tau = mu_t - mu_c
    half = _z(level) * np.sqrt(max(var, 0.0))
    return EstimateReport(
        method=method, tau_hat=tau, mu_c_hat=mu_c, mu_t_hat=mu_t,
        var_hat=float(max(var, 0.0)), ci_lo=tau - half, ci_hi=tau + half,
        level=level, diagnostics=diagnostics, gamma=gamma, gamma_rows=gamma_rows,
    )


def _fit_with_override(fits: SharedFits, beta_override) -> LinearFit:
    if beta_override is None:
        return fits.control_fit
    beta = np.asarray(beta_override, dtype=np.float64)
    return LinearFit(beta=beta, intercept=0.0, support=np.flatnonzero(beta),
                     objective=np.nan, lambda_used=np.nan, family="gaussian")


def _meta_mu_c(fits: SharedFits, fit_c: LinearFit, gamma: np.ndarray) -> tuple[float, np.ndarray]:
    resid = fits.control.Ysub - predict(fit_c, fits.control.Xsub)
    mu_c = float(predict(fit_c, fits.xbar_t[None, :])[0] + gamma @ resid)
    return mu_c, resid


def _treated_residuals(fits: SharedFits) -> np.ndarray:
    return fits.treated.Ysub - predict(fits.treated_fit, fits.treated.Xsub)


def _weight_diag(sol: BalanceWeights, fits: SharedFits, gamma: np.ndarray) -> dict:
    raw = fits.xbar_t - fits.control.Xsub.T @ gamma
    return {
        "sup_imbalance": sol.sup_imbalance,
        "sup_imbalance_raw": float(np.abs(raw).max()),
        "sq_norm": float(gamma @ gamma),
        "solver_status": sol.status,
        "solver_iterations": sol.n_iter,
    }


def _check_weight_solution(sol: BalanceWeights, what: str) -> np.ndarray:
    if sol.gamma is None:
        raise EstimationError(f"{what}: balance program infeasible")
    if sol.status == "max_iter":
        warnings.warn(f"{what}: weight solver stopped at its iteration cap",
                      ConvergenceWarning)
    return sol.gamma


def arb_att(
    data: Dataset,
    zeta: float = 0.5,
    level: float = 0.95,
    fits: SharedFits | None = None,
    seed: int = 0,
    solver_tol: float = 1e-7,
    max_iter: int = 100_000,
    box_upper: float | None = None,
    simplex: bool = True,
    _gamma_override: np.ndarray | None = None,
    _beta_override: np.ndarray | None = None,
) -> EstimateReport:
    """Residual-balanced treatment effect on the treated.

    The control outcome model is an elastic net tuned by cross-validation;
    the residual weights minimize ``(1-zeta)||g||^2 + zeta * sup_imbalance^2``
    over the capped simplex.  The two underscore arguments bypass the weight
    solve or the outcome fit and exist for identity testing only.
    """
    fits = fits or SharedFits(data, seed=seed)
    fit_c = _fit_with_override(fits, _beta_override)

    if _gamma_override is not None:
        gamma = np.asarray(_gamma_override, dtype=np.float64)
        diag = {"sup_imbalance_raw": float(np.abs(fits.xbar_t - fits.control.Xsub.T @ gamma).max())}
    else:
        Xs, xis = fits.balance_view(fits.control, fits.xbar_t)
        prob = BalanceProblem(Xs, xis, form="lagrange", zeta=zeta, box_upper=box_upper,
                              simplex=simplex, solver_tol=solver_tol, max_iter=max_iter)
        sol = solve_lagrange(prob)
        gamma = _check_weight_solution(sol, "arb_att")
        diag = _weight_diag(sol, fits, gamma)

    mu_c, resid_c = _meta_mu_c(fits, fit_c, gamma)
    mu_t = float(fits.treated.Ysub.mean())
    var, v_c, v_t = variance_att(resid_c, gamma, _treated_residuals(fits), fits.treated.size)
    diag.update(_fit_diag(fit_c, fits))
    diag.update({"V_c": v_c, "V_t": v_t, "zeta": zeta})
    return _report("arb", mu_t, mu_c, var, level, diag, gamma, fits.control.indices)


def _fit_diag(fit_c: LinearFit, fits: SharedFits) -> dict:
    out = {"support_c": int(fit_c.support.size), "lambda_c": float(fit_c.lambda_used)}
    if "treated" in fits._cache:
        ft: LinearFit = fits._cache["treated"]  # type: ignore[assignment]
        out["support_t"] = int(ft.support.size)
        out["lambda_t"] = float(ft.lambda_used)
    return out


def arb_ate(
    data: Dataset,
    zeta: float = 0.5,
    level: float = 0.95,
    fits: SharedFits | None = None,
    seed: int = 0,
    solver_tol: float = 1e-7,
    max_iter: int = 100_000,
) -> EstimateReport:
    """Residual-balanced average treatment effect over the whole sample.

    Both arms are re-weighted toward the full-sample covariate mean (each arm
    capped at ``size**(-2/3)``), each with its own cross-validated outcome
    fit.  The variance adds the weighted-residual sums from the two arms.
    """
    fits = fits or SharedFits(data, seed=seed)
    reports = {}
    for label, arm, fit in (("c", fits.control, fits.control_fit),
                            ("t", fits.treated, fits.treated_fit)):
        Xs, xis = fits.balance_view(arm, fits.xbar_all)
        prob = BalanceProblem(Xs, xis, form="lagrange", zeta=zeta,
                              solver_tol=solver_tol, max_iter=max_iter)
        sol = solve_lagrange(prob)
        gamma = _check_weight_solution(sol, "arb_ate")
        resid = arm.Ysub - predict(fit, arm.Xsub)
        mu = float(predict(fit, fits.xbar_all[None, :])[0] + gamma @ resid)
        reports[label] = (gamma, resid, mu, sol)

    gamma_c, resid_c, mu_c, sol_c = reports["c"]
    gamma_t, resid_t, mu_t, sol_t = reports["t"]
    var = float(np.sum(gamma_c ** 2 * resid_c ** 2) + np.sum(gamma_t ** 2 * resid_t ** 2))
    diag = {
        "sup_imbalance_c": sol_c.sup_imbalance, "sup_imbalance_t": sol_t.sup_imbalance,
        "sq_norm_c": float(gamma_c @ gamma_c), "sq_norm_t": float(gamma_t @ gamma_t),
        "zeta": zeta,
    }
    diag.update(_fit_diag(fits.control_fit, fits))
    return _report("arb_ate", mu_t, mu_c, var, level, diag, gamma_c, fits.control.indices)


def naive(data: Dataset, level: float = 0.95, fits: SharedFits | None = None,
          seed: int = 0) -> EstimateReport:
    """Difference in arm means with the unpooled two-sample variance."""
    fits = fits or SharedFits(data, seed=seed)
    yc, yt = fits.control.Ysub, fits.treated.Ysub
    var = yt.var(ddof=1) / yt.size + yc.var(ddof=1) / yc.size
    return _report("naive", float(yt.mean()), float(yc.mean()), float(var), level, {})


def enet_only(
    data: Dataset,
    level: float = 0.95,
    fits: SharedFits | None = None,
    seed: int = 0,
    _beta_override: np.ndarray | None = None,
) -> EstimateReport:
    """The residual-balanced estimator with trivial uniform weights."""
    fits = fits or SharedFits(data, seed=seed)
    fit_c = _fit_with_override(fits, _beta_override)
    n_c = fits.control.size
    gamma = np.full(n_c, 1.0 / n_c)
    mu_c, resid_c = _meta_mu_c(fits, fit_c, gamma)
    mu_t = float(fits.treated.Ysub.mean())
    var, v_c, v_t = variance_att(resid_c, gamma, _treated_residuals(fits), fits.treated.size)
    diag = {"V_c": v_c, "V_t": v_t,
            "sup_imbalance_raw": float(np.abs(fits.xbar_t - fits.control.Xsub.mean(axis=0)).max())}
    diag.update(_fit_diag(fit_c, fits))
    return _report("enet", mu_t, mu_c, var, level, diag, gamma, fits.control.indices)


def balance_only(
    data: Dataset,
    level: float = 0.95,
    fits: SharedFits | None = None,
    seed: int = 0,
    threshold: float | None = None,
    solver_tol: float = 1e-7,
    max_iter: int = 100_000,
) -> EstimateReport:
    """Pure weighting: minimum-norm simplex weights under a sup-imbalance cap.

    With ``threshold=None`` the cap is set just above the smallest feasible
    value (found by bisection), which keeps the baseline defined in regimes
    where tight fixed caps are infeasible.  No outcome model: the residual
    variance is taken around the weighted mean itself.
    """
    fits = fits or SharedFits(data, seed=seed)
    Xs, xis = fits.balance_view(fits.control, fits.xbar_t)
    prob = BalanceProblem(Xs, xis, form="constraint", K=0.0, box_upper=1.0,
                          simplex=True, solver_tol=solver_tol, max_iter=max_iter)
    sol = solve_stable(prob, threshold)
    gamma = _check_weight_solution(sol, "balance_only")
    yc, yt = fits.control.Ysub, fits.treated.Ysub
    mu_c = float(gamma @ yc)
    mu_t = float(yt.mean())
    v_c = float(np.sum(gamma ** 2 * (yc - mu_c) ** 2))
    v_t = float(np.sum((yt - mu_t) ** 2)) / yt.size ** 2
    diag = _weight_diag(sol, fits, gamma)
    diag.update({"V_c": v_c, "V_t": v_t, "threshold": float(threshold) if threshold is not None else np.nan})
    return _report("balance", mu_t, mu_c, v_c + v_t, level, diag, gamma, fits.control.indices)


def ipw(
    data: Dataset,
    level: float = 0.95,
    fits: SharedFits | None = None,
    seed: int = 0,
    trim: tuple[float, float] | None = None,
) -> EstimateReport:
    """Weighted control mean with normalized, trimmed propensity odds."""
    fits = fits or SharedFits(data, seed=seed)
    trim = trim or fits.trim
    gamma = ipw_weights(fits.ehat[fits.control.indices], trim)
    yc, yt = fits.control.Ysub, fits.treated.Ysub
    mu_c = float(gamma @ yc)
    mu_t = float(yt.mean())
    v_c = float(np.sum(gamma ** 2 * (yc - mu_c) ** 2))
    v_t = float(np.sum((yt - mu_t) ** 2)) / yt.size ** 2
    diag = {"ehat_min": float(fits.ehat.min()), "ehat_max": float(fits.ehat.max()),
            "support_prop": int(fits.propensity_fit.support.size)}
    return _report("ipw", mu_t, mu_c, v_c + v_t, level, diag, gamma, fits.control.indices)


def aipw(
    data: Dataset,
    level: float = 0.95,
    fits: SharedFits | None = None,
    seed: int = 0,
    trim: tuple[float, float] | None = None,
) -> EstimateReport:
    """Regression adjustment plus an odds-weighted residual correction."""
    fits = fits or SharedFits(data, seed=seed)
    trim = trim or fits.trim
    gamma = ipw_weights(fits.ehat[fits.control.indices], trim)
    mu_c, resid_c = _meta_mu_c(fits, fits.control_fit, gamma)
    mu_t = float(fits.treated.Ysub.mean())
    var, v_c, v_t = variance_att(resid_c, gamma, _treated_residuals(fits), fits.treated.size)
    diag = {"V_c": v_c, "V_t": v_t, "support_prop": int(fits.propensity_fit.support.size)}
    diag.update(_fit_diag(fits.control_fit, fits))
    return _report("aipw", mu_t, mu_c, var, level, diag, gamma, fits.control.indices)


def weighted_enet(
    data: Dataset,
    level: float = 0.95,
    fits: SharedFits | None = None,
    seed: int = 0,
    trim: tuple[float, float] | None = None,
) -> EstimateReport:
    """Odds-weighted outcome regression, then the odds-weighted correction.

    The control fit uses the propensity odds as sample weights in the squared
    loss, concentrating the fit where the control sample resembles the
    treated one; the residual correction is the same as in ``aipw``.
    """
    fits = fits or SharedFits(data, seed=seed)
    trim = trim or fits.trim
    gamma = ipw_weights(fits.ehat[fits.control.indices], trim)
    wfit = fits.weighted_control_fit()
    mu_c, resid_c = _meta_mu_c(fits, wfit, gamma)
    mu_t = float(fits.treated.Ysub.mean())
    var, v_c, v_t = variance_att(resid_c, gamma, _treated_residuals(fits), fits.treated.size)
    diag = {"V_c": v_c, "V_t": v_t, "support_c": int(wfit.support.size),
            "lambda_c": float(wfit.lambda_used)}
    return _report("wenet", mu_t, mu_c, var, level, diag, gamma, fits.control.indices)


def tmle_style(
    data: Dataset,
    level: float = 0.95,
    fits: SharedFits | None = None,
    seed: int = 0,
    trim: tuple[float, float] | None = None,
) -> EstimateReport:
    """One-step targeted update of the outcome fit along the odds direction.

    A single coefficient ``eps`` is fit by least squares on the control
    residuals against the clever covariate ``h = e/(1-e)``, the predictions
    are fluctuated to ``pred + eps*h``, and the odds-weighted correction is
    applied to the fluctuated model.
    """
    fits = fits or SharedFits(data, seed=seed)
    trim = trim or fits.trim
    h_c = fits.odds(fits.control.indices)
    h_t = fits.odds(fits.treated.indices)
    fit_c = fits.control_fit
    resid_c = fits.control.Ysub - predict(fit_c, fits.control.Xsub)
    denom = float(h_c @ h_c)
    eps = float(h_c @ resid_c) / denom if denom > 0 else 0.0

    fluct_resid_c = resid_c - eps * h_c
    gamma = ipw_weights(fits.ehat[fits.control.indices], trim)
    mu_t_pred = float(np.mean(predict(fit_c, fits.treated.Xsub) + eps * h_t))
    mu_c = mu_t_pred + float(gamma @ fluct_resid_c)
    mu_t = float(fits.treated.Ysub.mean())
    var, v_c, v_t = variance_att(fluct_resid_c, gamma, _treated_residuals(fits),
                                 fits.treated.size)
    diag = {"V_c": v_c, "V_t": v_t, "epsilon": eps}
    diag.update(_fit_diag(fit_c, fits))
    return _report("tmle", mu_t, mu_c, var, level, diag, gamma, fits.control.indices)


def double_selection_ols(
    data: Dataset,
    level: float = 0.95,
    fits: SharedFits | None = None,
    seed: int = 0,
    two_lasso: bool = False,
) -> EstimateReport:
    """Least squares on the union of lasso-selected covariates.

    Three lasso problems vote on the covariate set: the outcome within each
    arm and a logistic model for assignment (``two_lasso=True`` drops the
    treated-arm vote).  The treatment coefficient of the joint least-squares
    fit on the union is the estimate; its variance is HC1-robust.
    """
    fits = fits or SharedFits(data, seed=seed)
    plan = replace(fits.outcome_plan, alpha=1.0)
    support: set[int] = set()

    def selected(X, y, family, stream) -> np.ndarray:
        if y.shape[0] < 3:
            return np.array([], dtype=np.int64)
        k = min(plan.k_folds, y.shape[0])
        fit, _ = fit_cv(X, y, family=family, alpha=1.0, k_folds=k, cfg=plan.config(),
                        rng=philox_rng(fits.seed, stream), n_lambda=plan.n_lambda)
        return fit.support

    support.update(selected(fits.control.Xsub, fits.control.Ysub, "gaussian", 11).tolist())
    if not two_lasso:
        support.update(selected(fits.treated.Xsub, fits.treated.Ysub, "gaussian", 12).tolist())
    support.update(selected(data.X, data.W.astype(np.float64), "binomial", 13).tolist())
    keep = np.array(sorted(support), dtype=np.int64)

    n = data.n
    D = np.column_stack([np.ones(n), data.W.astype(np.float64), data.X[:, keep]])
    k_cols = D.shape[1]
    if k_cols >= n:
        raise EstimationError(
            f"double selection kept {keep.size} covariates, leaving {k_cols} regressors "
            f"for {n} rows; increase the lasso penalty so fewer covariates survive"
        )
    gram = D.T @ D
    try:
        bread = np.linalg.inv(gram)
    except np.linalg.LinAlgError as exc:
        raise EstimationError(
            "selected design is singular; increase the lasso penalty"
        ) from exc
    coef = bread @ (D.T @ data.Y)
    resid = data.Y - D @ coef
    meat = (D * resid[:, None] ** 2).T @ D
    cov = bread @ meat @ bread * (n / (n - k_cols))
    tau = float(coef[1])
    var = float(cov[1, 1])
    mu_t = float(fits.treated.Ysub.mean())
    diag = {"support_union": int(keep.size), "two_lasso": float(two_lasso)}
    half = _z(level) * np.sqrt(max(var, 0.0))
    return EstimateReport(
        method="double-select", tau_hat=tau, mu_c_hat=mu_t - tau, mu_t_hat=mu_t,
        var_hat=max(var, 0.0), ci_lo=tau - half, ci_hi=tau + half, level=level,
        diagnostics=diag,
    )


METHODS = {
    "arb": arb_att,
    "arb-ate": arb_ate,
    "naive": naive,
    "enet": enet_only,
    "balance": balance_only,
    "ipw": ipw,
    "aipw": aipw,
    "wenet": weighted_enet,
    "tmle": tmle_style,
    "double-select": double_selection_ols,
}


def estimate(method: str, data: Dataset, level: float = 0.95,
             fits: SharedFits | None = None, seed: int = 0, **kwargs) -> EstimateReport:
    """Dispatch an estimator by its CLI tag."""
    try:
        fn = METHODS[method]
    except KeyError:
        raise ValueError(f"unknown method {method!r}; choose from {sorted(METHODS)}") from None
    return fn(data, level=level, fits=fits, seed=seed, **kwargs)
