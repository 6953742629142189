"""Independent reference solvers used to check the production code.

Everything here goes through generic machinery (an interior-point QP solver,
HiGHS linear programming, box-constrained quasi-Newton, equality-constrained
Newton, scalar golden-section search) so that agreement with the package's
own solvers is meaningful evidence and not a tautology.
"""

from __future__ import annotations

import numpy as np
import scipy.optimize


def _qp(P, q, G, h, A=None, b=None):
    from cvxopt import matrix, solvers

    solvers.options["show_progress"] = False
    kwargs = {}
    if A is not None:
        kwargs = {"A": matrix(np.atleast_2d(A)), "b": matrix(np.atleast_1d(b))}
    # near-degenerate active sets can end an interior-point run with a
    # singular KKT system after the duality gap has already collapsed, so
    # accept 'unknown' exits whose gap is tiny and retry once relaxed
    for abstol in (1e-12, 1e-9):
        solvers.options["abstol"] = abstol
        solvers.options["reltol"] = abstol
        solvers.options["feastol"] = max(abstol, 1e-11)
        sol = solvers.qp(matrix(P), matrix(q), matrix(G), matrix(h), **kwargs)
        if sol["status"] == "optimal":
            return np.array(sol["x"]).ravel()
        gap = sol.get("gap")
        if sol["x"] is not None and gap is not None and gap < 1e-7:
            return np.array(sol["x"]).ravel()
    raise RuntimeError(f"oracle QP status {sol['status']}")


def epigraph_qp(Xc, xi, *, zeta=None, bound=None, cap=None, simplex=True,
                min_norm_weight=1.0):
    """Dense epigraph QP for the balance programs, solved by interior point.

    With ``zeta`` set, minimizes ``(1-zeta)||g||^2 + zeta*t^2`` over the
    weight set with ``|xi - Xc'g| <= t``; with ``bound`` set, minimizes
    ``min_norm_weight*||g||^2`` subject to ``|xi - Xc'g| <= bound``.
    Returns ``(gamma, objective)``.
    """
    n, p = Xc.shape
    if zeta is not None:
        P = np.zeros((n + 1, n + 1))
        P[:n, :n] = 2.0 * (1.0 - zeta) * np.eye(n)
        P[n, n] = 2.0 * zeta
        q = np.zeros(n + 1)
        G_rows = [np.hstack([Xc.T, -np.ones((p, 1))]),
                  np.hstack([-Xc.T, -np.ones((p, 1))])]
        h_rows = [xi, -xi]
        width = n + 1
    else:
        P = 2.0 * min_norm_weight * np.eye(n)
        q = np.zeros(n)
        G_rows = [Xc.T, -Xc.T]
        h_rows = [xi + bound, bound - xi]
        width = n

    eye = np.eye(n, width)
    if simplex:
        G_rows += [-eye, eye]
        h_rows += [np.zeros(n), np.full(n, cap)]
        A = np.zeros((1, width))
        A[0, :n] = 1.0
        z = _qp(P, q, np.vstack(G_rows), np.concatenate(h_rows), A, np.array([1.0]))
    else:
        G_rows += [-eye, eye]
        h_rows += [np.full(n, cap), np.full(n, cap)]
        z = _qp(P, q, np.vstack(G_rows), np.concatenate(h_rows))
    g = z[:n]
    sup = np.abs(xi - Xc.T @ g).max()
    if zeta is not None:
        return g, float((1 - zeta) * g @ g + zeta * sup ** 2)
    return g, float(min_norm_weight * g @ g)


def projection_qp(x, cap, total=1.0):
    """Capped-simplex projection as a dense QP."""
    n = x.shape[0]
    P = 2.0 * np.eye(n)
    q = -2.0 * x
    G = np.vstack([-np.eye(n), np.eye(n)])
    h = np.concatenate([np.zeros(n), np.full(n, cap)])
    A = np.ones((1, n))
    return _qp(P, q, G, h, A, np.array([total]))


def cone_projection_ref(v, r):
    """Sup-norm cone projection by smooth bounded optimization over s."""
    a = np.abs(v)

    def obj(s):
        s = s[0]
        return np.sum(np.maximum(a - s, 0.0) ** 2) + (s - r) ** 2

    res = scipy.optimize.minimize(obj, x0=[max(r, a.max() / 2, 0.0)],
                                  bounds=[(0.0, None)], method="L-BFGS-B",
                                  options={"ftol": 1e-18, "gtol": 1e-14})
    s = float(res.x[0])
    return np.clip(v, -s, s), s


def min_imbalance_lp_ref(Xc, xi, cap, simplex=True):
    """Minimum sup-imbalance as an epigraph LP solved by cvxopt's cone solver
    (independent of the HiGHS route used in production)."""
    from cvxopt import matrix, solvers

    solvers.options["show_progress"] = False
    solvers.options["abstol"] = 1e-9
    solvers.options["reltol"] = 1e-9
    solvers.options["feastol"] = 1e-9
    n, p = Xc.shape
    c = np.zeros(n + 1)
    c[n] = 1.0
    G_rows = [np.hstack([Xc.T, -np.ones((p, 1))]),
              np.hstack([-Xc.T, -np.ones((p, 1))])]
    h_rows = [xi, -xi]
    eye = np.eye(n, n + 1)
    if simplex:
        G_rows += [-eye, eye]
        h_rows += [np.zeros(n), np.full(n, cap)]
        A = np.zeros((1, n + 1))
        A[0, :n] = 1.0
        sol = solvers.lp(matrix(c), matrix(np.vstack(G_rows)),
                         matrix(np.concatenate(h_rows)), matrix(A),
                         matrix(np.array([1.0])))
    else:
        G_rows += [-eye, eye]
        h_rows += [np.full(n, cap), np.full(n, cap)]
        sol = solvers.lp(matrix(c), matrix(np.vstack(G_rows)),
                         matrix(np.concatenate(h_rows)))
    gap = sol.get("gap")
    if sol["status"] != "optimal" and not (sol["x"] is not None and gap is not None
                                           and gap < 1e-6):
        raise RuntimeError(f"oracle LP status {sol['status']}")
    return float(np.array(sol["x"]).ravel()[n])


def penalized_logistic_ref(X, w, lam, alpha, fit_intercept=True):
    """Penalized logistic objective minimized by L-BFGS-B on the split
    ``beta = a - b`` with ``a, b >= 0`` (exact reformulation of the L1 term).

    Returns the optimal objective value.
    """
    n, p = X.shape

    def unpack(z):
        b0 = z[0] if fit_intercept else 0.0
        off = 1 if fit_intercept else 0
        a, b = z[off:off + p], z[off + p:]
        return b0, a, b

    def obj_grad(z):
        b0, a, b = unpack(z)
        beta = a - b
        eta = b0 + X @ beta
        # stable softplus pieces
        nll = np.sum(np.logaddexp(0.0, eta) - w * eta)
        prob = 1.0 / (1.0 + np.exp(-np.clip(eta, -500, 500)))
        gbeta = -X.T @ (w - prob)
        pen = lam * ((1 - alpha) * beta @ beta + alpha * np.sum(a + b))
        ga = gbeta + 2 * lam * (1 - alpha) * beta + lam * alpha
        gb = -gbeta - 2 * lam * (1 - alpha) * beta + lam * alpha
        grad = np.concatenate([[-np.sum(w - prob)] if fit_intercept else [], ga, gb])
        return nll + pen, grad

    z0 = np.zeros((1 if fit_intercept else 0) + 2 * p)
    bounds = ([(None, None)] if fit_intercept else []) + [(0.0, None)] * (2 * p)
    res = scipy.optimize.minimize(obj_grad, z0, jac=True, bounds=bounds,
                                  method="L-BFGS-B",
                                  options={"maxiter": 20000, "ftol": 1e-18, "gtol": 1e-12})
    return float(res.fun)


def entropy_primal_newton(Xc, xi, tol=1e-12, max_iter=200):
    """Maximum-entropy weights by infeasible-start Newton on the primal.

    Solves ``min sum(g log g)`` subject to ``Xc'g = xi`` and ``sum(g) = 1``
    directly in the weights, the route dual to the package's softmax solver.
    """
    n, p = Xc.shape
    A = np.vstack([Xc.T, np.ones((1, n))])
    b = np.concatenate([xi, [1.0]])
    g = np.full(n, 1.0 / n)
    nu = np.zeros(p + 1)
    for _ in range(max_iter):
        grad = np.log(g) + 1.0 + A.T @ nu
        rp = A @ g - b
        if max(np.abs(grad).max(), np.abs(rp).max()) < tol:
            break
        H = 1.0 / g
        # KKT solve by elimination: (A diag(g) A') dnu = rp - A diag(g) grad
        AD = A * g
        S = AD @ A.T
        rhs = rp - AD @ grad
        dnu = np.linalg.solve(S + 1e-13 * np.eye(p + 1), rhs)
        dg = -(grad + A.T @ dnu) / H
        step = 1.0
        while np.any(g + step * dg <= 0):
            step *= 0.5
            if step < 1e-14:
                break
        g = g + step * dg
        nu = nu + step * dnu
    return g


def golden_section(f, lo, hi, tol=1e-13, max_iter=300):
    """Scalar minimization of a unimodal function by golden section."""
    phi = 0.5 * (3.0 - np.sqrt(5.0))
    x1 = lo + phi * (hi - lo)
    x2 = hi - phi * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if hi - lo < tol:
            break
        if f1 < f2:
            hi, x2, f2 = x2, x1, f1
            x1 = lo + phi * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = hi - phi * (hi - lo)
            f2 = f(x2)
    return 0.5 * (lo + hi)


def coordinate_brute_force(X, y, beta, intercept, lam, alpha, j, sw=None, span=3.0):
    """Best value of coordinate ``j`` with all others frozen, by golden section.

    Minimizes the penalized squared loss restricted to one coordinate; at a
    true optimum of the joint problem this must return (up to search
    tolerance) the fitted coefficient itself.  The scalar objective is
    evaluated in 40-digit arithmetic so the search is not limited by the
    flat double-precision plateau around the minimum.
    """
    import mpmath

    sw = np.ones(X.shape[0]) if sw is None else sw
    base = y - intercept - X @ beta + X[:, j] * beta[j]
    col = X[:, j]
    with mpmath.workdps(40):
        base_mp = [mpmath.mpf(v) for v in base]
        col_mp = [mpmath.mpf(v) for v in col]
        sw_mp = [mpmath.mpf(v) for v in sw]
        lam_mp, alpha_mp = mpmath.mpf(lam), mpmath.mpf(alpha)

        def obj(b):
            b = mpmath.mpf(b)
            acc = mpmath.mpf(0)
            for swi, bi, ci in zip(sw_mp, base_mp, col_mp):
                r = bi - ci * b
                acc += swi * r * r
            return acc + lam_mp * ((1 - alpha_mp) * b * b + alpha_mp * abs(b))

        center = float(beta[j])
        return float(golden_section(obj, center - span, center + span, tol=1e-11))
