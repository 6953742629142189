"""Balancing-weight solvers.

The central object is a convex program over nonnegative weights ``gamma`` on
the control rows: make the weighted control covariate mean track a target
profile ``xi`` while keeping the weights themselves small.  Two expressions of
that trade-off are supported,

* a penalized form, ``(1 - zeta) * ||gamma||_2^2 + zeta * sup_imbalance^2``
  minimized over the capped simplex, and
* a hard-constraint form, ``min ||gamma||_2^2`` subject to
  ``sup_imbalance <= bound``,

plus two classic pure-weighting baselines (minimum-norm weights under a fixed
imbalance budget, and maximum-entropy weights under exact balance) and
propensity-odds weights.

All quadratic programs run through one operator-splitting core: the sup-norm
is lifted to an epigraph variable, the iteration alternates a small linear
solve with exact projections onto the capped simplex and the sup-norm cone,
and convergence is declared on primal/dual residuals.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg
import scipy.optimize

from ._projections import project_box, project_capped_simplex, project_sup_norm_cone


class BalanceInfeasibleError(RuntimeError):
    """Raised when a requested balance condition cannot be met exactly."""


@dataclass(frozen=True)
class BalanceProblem:
    """One weighting problem over the control rows.

    Parameters
    ----------
    Xc : ndarray, shape (n_c, p)
        Control covariates (already standardized if the caller wants the
        sup-norm to treat columns comparably).
    xi : ndarray, shape (p,)
        Target covariate profile.
    form : {"lagrange", "constraint"}
        Penalized trade-off with weight ``zeta``, or minimum-norm weights
        under the hard bound ``K * sqrt(log(p) / n_c)``.
    zeta : float
        Trade-off weight in (0, 1); only read by the penalized form.
    K : float or None
        Scale of the hard imbalance bound; only read by the constraint form.
    box_upper : float or None
        Per-weight cap; defaults to ``n_c ** (-2/3)``.
    simplex : bool
        If True (default) enforce ``sum(gamma) = 1`` and ``gamma >= 0``;
        otherwise only the symmetric box ``|gamma_i| <= box_upper`` applies.
    """

    Xc: np.ndarray
    xi: np.ndarray
    form: str = "lagrange"
    zeta: float = 0.5
    K: float | None = None
    box_upper: float | None = None
    simplex: bool = True
    solver_tol: float = 1e-7
    max_iter: int = 100_000

    def __post_init__(self) -> None:
        Xc = np.ascontiguousarray(self.Xc, dtype=np.float64)
        xi = np.asarray(self.xi, dtype=np.float64).ravel()
        if Xc.ndim != 2 or Xc.shape[1] != xi.shape[0]:
            raise ValueError("Xc must be (n_c, p) with p matching xi")
        if not (np.isfinite(Xc).all() and np.isfinite(xi).all()):
            raise ValueError("non-finite entries in balance problem")
        if self.form not in ("lagrange", "constraint"):
            raise ValueError(f"unknown form {self.form!r}")
        if self.form == "lagrange" and not 0.0 < self.zeta < 1.0:
            raise ValueError("zeta must lie in (0, 1)")
        if self.form == "constraint":
            if self.K is None or self.K < 0.0:
                raise ValueError("constraint form requires K >= 0")
        cap = self.cap
        if cap <= 0.0:
            raise ValueError("box_upper must be positive")
        if self.simplex and cap * Xc.shape[0] < 1.0 - 1e-12:
            raise ValueError(
                f"infeasible: box_upper * n_c = {cap * Xc.shape[0]:g} < 1, "
                "the weights cannot sum to one"
            )
        if self.solver_tol <= 0.0 or self.max_iter < 1:
            raise ValueError("solver_tol must be positive and max_iter >= 1")
        object.__setattr__(self, "Xc", Xc)
        object.__setattr__(self, "xi", xi)

    @property
    def n_c(self) -> int:
        return self.Xc.shape[0]

    @property
    def p(self) -> int:
        return self.Xc.shape[1]

    @property
    def cap(self) -> float:
        if self.box_upper is not None:
            return float(self.box_upper)
        return float(self.Xc.shape[0] ** (-2.0 / 3.0))

    @property
    def constraint_bound(self) -> float:
        """Imbalance bound ``K * sqrt(log(p) / n_c)`` of the constraint form."""
        if self.K is None:
            raise ValueError("constraint bound undefined without K")
        return float(self.K) * np.sqrt(np.log(max(self.p, 2)) / self.n_c)


@dataclass
class BalanceWeights:
    """Solver output: the weights plus imbalance diagnostics."""

    gamma: np.ndarray | None
    imbalance: np.ndarray | None
    sup_imbalance: float
    sq_norm: float
    objective: float
    status: str  # optimal | max_iter | infeasible
    n_iter: int = 0
    diagnostics: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status == "optimal"


def _finish(prob_xi: np.ndarray, Xc: np.ndarray, gamma: np.ndarray, objective: float,
            status: str, n_iter: int) -> BalanceWeights:
    imbalance = prob_xi - Xc.T @ gamma
    return BalanceWeights(
        gamma=gamma,
        imbalance=imbalance,
        sup_imbalance=float(np.abs(imbalance).max()),
        sq_norm=float(gamma @ gamma),
        objective=float(objective),
        status=status,
        n_iter=n_iter,
    )


def _infeasible(n_iter: int = 0) -> BalanceWeights:
    return BalanceWeights(
        gamma=None, imbalance=None, sup_imbalance=np.inf, sq_norm=np.inf,
        objective=np.inf, status="infeasible", n_iter=n_iter,
    )


def _spectral_norm(G: np.ndarray) -> float:
    """Largest eigenvalue of a PSD matrix by a short power iteration."""
    v = np.full(G.shape[0], 1.0 / np.sqrt(G.shape[0]))
    lam = 1.0
    for _ in range(30):
        w = G @ v
        lam = float(np.linalg.norm(w))
        if lam <= 0.0:
            return 1.0
        v = w / lam
    return lam


def _splitting_qp(
    Xc: np.ndarray,
    xi: np.ndarray,
    quad_gamma: float,
    quad_t: float,
    lin_t: float,
    project_gamma: Callable[[np.ndarray], np.ndarray],
    tol: float,
    max_iter: int,
    t_fixed: float | None = None,
    gamma0: np.ndarray | None = None,
) -> tuple[np.ndarray, float, int, bool]:
    """Minimize ``0.5*quad_gamma*||g||^2 + 0.5*quad_t*t^2 + lin_t*t`` subject
    to ``g`` in the projection set and ``max|xi - Xc'g| <= t`` (``t`` fixed to
    ``t_fixed`` when given).

    Alternates a dense linear solve in ``(g, t)`` with exact projections of
    consensus copies (capped simplex or box for ``g``, sup-norm cone or clip
    for the imbalance).  The two constraint blocks live on different scales,
    so each carries its own penalty: the imbalance block's is shrunk by the
    spectral norm of ``Xc``.  Returns ``(gamma, t, iterations, converged)``;
    the returned ``gamma`` is the projected copy, so its membership in the
    weight set is exact.
    """
    n_c = Xc.shape[0]
    G = Xc @ Xc.T
    relax = 1.6
    rho_u = max(1.0, quad_gamma)
    rho_v = rho_u / max(1.0, np.sqrt(_spectral_norm(G)))

    def factor(ru: float, rv: float) -> np.ndarray:
        M = G * rv
        M[np.diag_indices_from(M)] += quad_gamma + ru
        return np.linalg.inv(M)

    Minv = factor(rho_u, rho_v)
    start = np.full(n_c, 1.0 / n_c) if gamma0 is None else np.asarray(gamma0, dtype=np.float64)
    gamma = project_gamma(start)
    u = gamma.copy()
    v = xi - Xc.T @ gamma
    if t_fixed is not None:
        t = s = float(t_fixed)
        v = np.clip(v, -t, t)
    else:
        v, s = project_sup_norm_cone(v, float(np.abs(v).max()))
        t = s
    du = np.zeros(n_c)
    dv = np.zeros_like(xi)
    ds = 0.0

    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        # linear solve in (gamma, t)
        rhs = rho_u * (u - du) + rho_v * (Xc @ (xi - v + dv))
        gamma = Minv @ rhs
        if t_fixed is None:
            t = (rho_v * (s - ds) - lin_t) / (quad_t + rho_v)

        av = xi - Xc.T @ gamma
        hat_u = relax * gamma + (1.0 - relax) * u
        hat_v = relax * av + (1.0 - relax) * v
        u_old, v_old, s_old = u, v, s
        u = project_gamma(hat_u + du)
        if t_fixed is None:
            hat_s = relax * t + (1.0 - relax) * s
            v, s = project_sup_norm_cone(hat_v + dv, hat_s + ds)
            ds += hat_s - s
        else:
            v = np.clip(hat_v + dv, -t, t)
        du += hat_u - u
        dv += hat_v - v

        if it % 10 == 0 or it == max_iter:
            r_pri = max(
                float(np.abs(gamma - u).max()),
                float(np.abs(av - v).max()),
                abs(t - s) if t_fixed is None else 0.0,
            )
            r_dual = max(
                float(np.abs(rho_u * (u - u_old) - rho_v * (Xc @ (v - v_old))).max()),
                rho_v * abs(s - s_old) if t_fixed is None else 0.0,
            )
            if r_pri <= tol and r_dual <= tol:
                converged = True
                break
            if it % 100 == 0:
                if r_pri > 10.0 * r_dual and rho_u < 1e6:
                    scale = 0.5  # duals shrink when the penalties double
                elif r_dual > 10.0 * r_pri and rho_u > 1e-6:
                    scale = 2.0
                else:
                    scale = 1.0
                if scale != 1.0:
                    du *= scale
                    dv *= scale
                    ds *= scale
                    rho_u /= scale
                    rho_v /= scale
                    Minv = factor(rho_u, rho_v)

    return u, (t if t_fixed is None else float(t_fixed)), it, converged


def _uniform_weights(prob: BalanceProblem) -> np.ndarray:
    return np.full(prob.n_c, 1.0 / prob.n_c)


def _uniform_sup_imbalance(prob: BalanceProblem) -> float:
    return float(np.abs(prob.xi - prob.Xc.mean(axis=0)).max())


def min_sup_imbalance(prob: BalanceProblem) -> float:
    """Smallest attainable sup-imbalance over the problem's weight set.

    This is a plain linear program (epigraph variable over the weight
    polytope), solved exactly; it certifies feasibility for the hard-bound
    programs and anchors the automatic threshold search.
    """
    n, p = prob.n_c, prob.p
    cost = np.zeros(n + 1)
    cost[n] = 1.0
    A_ub = np.vstack([
        np.hstack([-prob.Xc.T, -np.ones((p, 1))]),  # xi - Xc'g <= t
        np.hstack([prob.Xc.T, -np.ones((p, 1))]),   # Xc'g - xi <= t
    ])
    b_ub = np.concatenate([-prob.xi, prob.xi])
    cap = prob.cap
    if prob.simplex:
        bounds = [(0.0, cap)] * n + [(0.0, None)]
        A_eq = np.zeros((1, n + 1))
        A_eq[0, :n] = 1.0
        res = scipy.optimize.linprog(cost, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq,
                                     b_eq=[1.0], bounds=bounds, method="highs")
    else:
        bounds = [(-cap, cap)] * n + [(0.0, None)]
        res = scipy.optimize.linprog(cost, A_ub=A_ub, b_ub=b_ub, bounds=bounds,
                                     method="highs")
    if res.status != 0:
        raise RuntimeError(f"imbalance minimization failed: {res.message}")
    return max(float(res.fun), 0.0)


def _gamma_projector(prob: BalanceProblem) -> Callable[[np.ndarray], np.ndarray]:
    cap = prob.cap
    if prob.simplex:
        return lambda x: project_capped_simplex(x, cap)
    return lambda x: project_box(x, cap)


def solve_lagrange(prob: BalanceProblem, gamma0: np.ndarray | None = None) -> BalanceWeights:
    """Minimize ``(1 - zeta) * ||g||_2^2 + zeta * sup_imbalance(g)^2`` over the
    capped simplex (or box when ``simplex=False``).

    ``gamma0`` optionally seeds the iteration; the optimum is unique (the
    squared-norm term is strictly convex), so the start only affects speed.
    """
    if prob.form != "lagrange":
        raise ValueError("problem form is not 'lagrange'")
    zeta = prob.zeta

    def objective(gamma: np.ndarray) -> float:
        sup = np.abs(prob.xi - prob.Xc.T @ gamma).max()
        return (1.0 - zeta) * float(gamma @ gamma) + zeta * float(sup) ** 2

    if prob.simplex and gamma0 is None:
        uniform = _uniform_weights(prob)
        if prob.cap >= uniform[0] and _uniform_sup_imbalance(prob) <= 1e-14 * max(1.0, np.abs(prob.xi).max()):
            return _finish(prob.xi, prob.Xc, uniform, objective(uniform), "optimal", 0)

    gamma, _, it, converged = _splitting_qp(
        prob.Xc, prob.xi, quad_gamma=2.0 * (1.0 - zeta), quad_t=2.0 * zeta, lin_t=0.0,
        project_gamma=_gamma_projector(prob), tol=prob.solver_tol, max_iter=prob.max_iter,
        gamma0=gamma0,
    )
    return _finish(prob.xi, prob.Xc, gamma, objective(gamma),
                   "optimal" if converged else "max_iter", it)


def solve_constraint(prob: BalanceProblem) -> BalanceWeights:
    """Minimize ``||g||_2^2`` subject to ``sup_imbalance <= K*sqrt(log(p)/n_c)``.

    Infeasibility is reported through ``status``, not raised: with a hard
    bound there may simply be no weights that balance well enough.
    """
    if prob.form != "constraint":
        raise ValueError("problem form is not 'constraint'")
    return _solve_min_norm(prob, prob.constraint_bound)


def solve_stable(prob: BalanceProblem, threshold: float | None = None) -> BalanceWeights:
    """Minimum-norm weights under the explicit sup-imbalance bound ``threshold``.

    With ``threshold=None`` the smallest feasible bound is located by
    bisection (20 halvings of the interval from zero to the sup-imbalance of
    uniform weights) and the program is solved at 1.05 times that value, so
    the baseline stays feasible in regimes where tight fixed bounds are not.
    """
    if threshold is None:
        # start from a certainly-feasible bound: uniform weights on the
        # simplex, the zero vector on the box
        hi = _uniform_sup_imbalance(prob) if prob.simplex else float(np.abs(prob.xi).max())
        t_min = min_sup_imbalance(prob)
        lo = 0.0
        for _ in range(20):
            mid = 0.5 * (lo + hi)
            if mid >= t_min:  # feasible iff the bound clears the attainable minimum
                hi = mid
            else:
                lo = mid
        threshold = 1.05 * hi
    elif threshold < 0.0:
        raise ValueError("threshold must be nonnegative")
    return _solve_min_norm(prob, float(threshold))


def _solve_min_norm(prob: BalanceProblem, bound: float) -> BalanceWeights:
    project = _gamma_projector(prob)
    if prob.simplex:
        uniform = _uniform_weights(prob)
        if prob.cap + 1e-15 >= uniform[0] and _uniform_sup_imbalance(prob) <= bound:
            return _finish(prob.xi, prob.Xc, uniform, float(uniform @ uniform), "optimal", 0)
    elif bound >= float(np.abs(prob.xi).max()):
        zero = np.zeros(prob.n_c)
        return _finish(prob.xi, prob.Xc, zero, 0.0, "optimal", 0)

    feas_slack = max(10.0 * prob.solver_tol, 1e-9)
    t_min = min_sup_imbalance(prob)
    if bound < t_min - feas_slack:
        return _infeasible()

    # solve, tightening the splitting tolerance until the hard bound holds on
    # the returned (exactly simplex-feasible) weights
    viol_tol = max(prob.solver_tol, 1e-7)
    tol = prob.solver_tol
    gamma, it, converged = None, 0, False
    for _ in range(3):
        gamma, _, it, converged = _splitting_qp(
            prob.Xc, prob.xi, quad_gamma=2.0, quad_t=0.0, lin_t=0.0,
            project_gamma=project, tol=tol, max_iter=prob.max_iter,
            t_fixed=max(bound, t_min),
        )
        sup = float(np.abs(prob.xi - prob.Xc.T @ gamma).max())
        if not converged or sup <= max(bound, t_min) + viol_tol:
            break
        tol *= 0.05
    return _finish(prob.xi, prob.Xc, gamma, float(gamma @ gamma),
                   "optimal" if converged else "max_iter", it)


def solve_entropy(prob: BalanceProblem) -> BalanceWeights:
    """Maximum-entropy weights on the simplex under exact balance.

    Solved through the smooth convex dual in p variables: the weights take a
    softmax form ``g_i = exp(lam . x_i) / sum_k exp(lam . x_k)`` and ``lam``
    is chosen so the weighted mean matches ``xi`` exactly.  Exact balance must
    be attainable (in practice p < n_c); anything else raises.
    """
    Xc, xi = prob.Xc, prob.xi
    Z = Xc - xi  # shifts the dual optimum to a bounded point when feasible

    def dual(lam: np.ndarray) -> tuple[float, np.ndarray]:
        a = Z @ lam
        amax = a.max()
        e = np.exp(a - amax)
        se = e.sum()
        g = e / se
        return float(amax + np.log(se)), Z.T @ g

    lam0 = np.zeros(prob.p)
    res = scipy.optimize.minimize(dual, lam0, jac=True, method="L-BFGS-B",
                                  options={"maxiter": 2000, "ftol": 1e-16, "gtol": 1e-12})
    lam = res.x
    _, grad = dual(lam)
    if np.abs(grad).max() > 1e-8:
        # polish with a few damped Newton steps before giving up
        for _ in range(50):
            a = Z @ lam
            g = np.exp(a - a.max())
            g /= g.sum()
            grad = Z.T @ g
            H = (Z * g[:, None]).T @ Z - np.outer(grad, grad)
            try:
                step = np.linalg.solve(H + 1e-12 * np.eye(prob.p), grad)
            except np.linalg.LinAlgError:
                break
            lam = lam - step
            if np.abs(Z.T @ _softmax(Z @ lam)).max() <= 1e-10:
                break
        grad = Z.T @ _softmax(Z @ lam)
        if np.abs(grad).max() > 1e-8:
            raise BalanceInfeasibleError(
                f"exact balance unattainable: residual imbalance {np.abs(grad).max():.3e} "
                "(the target must lie inside the convex hull of the control rows)"
            )
    gamma = _softmax(Z @ lam)
    neg_entropy = float(np.sum(gamma * np.log(np.maximum(gamma, 1e-300))))
    return _finish(xi, Xc, gamma, neg_entropy, "optimal", int(res.nit))


def _softmax(a: np.ndarray) -> np.ndarray:
    e = np.exp(a - a.max())
    return e / e.sum()


def ipw_weights(ehat: np.ndarray, trim: tuple[float, float] = (0.05, 0.95)) -> np.ndarray:
    """Normalized propensity-odds weights over control units.

    The fitted propensities are clamped into ``[trim[0], trim[1]]`` before the
    odds transform, then ``g_i`` is proportional to ``e_i / (1 - e_i)`` and
    normalized to sum to one.
    """
    lo, hi = trim
    if not 0.0 < lo <= hi < 1.0:
        raise ValueError("trim bounds must satisfy 0 < lo <= hi < 1")
    e = np.clip(np.asarray(ehat, dtype=np.float64), lo, hi)
    odds = e / (1.0 - e)
    return odds / odds.sum()
