"""Compiled coordinate-descent kernels for penalized regression.

Everything here works on already-standardized, Fortran-ordered float64
matrices.  The penalty convention throughout is

    loss(beta) + lam * ((1 - alpha) * ||beta||_2^2 + alpha * ||beta||_1)

with an unnormalized loss: squared error ``sum(sw * (y - b0 - X beta)^2)``
for the Gaussian family, negative log-likelihood for the binomial family.
Convergence is certified on the exact stationarity residual, not just on
coordinate movement.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _weighted_colsq(X, sw):
    n, m = X.shape
    out = np.empty(m)
    for j in range(m):
        s = 0.0
        for i in range(n):
            s += sw[i] * X[i, j] * X[i, j]
        out[j] = s
    return out


@njit(cache=True)
def _sweep(X, sw, r, beta, colsq, thr, ridge, active_only):
    """One pass of coordinate updates; returns the largest coefficient move."""
    n, m = X.shape
    maxd = 0.0
    for j in range(m):
        bj = beta[j]
        if active_only and bj == 0.0:
            continue
        denom = colsq[j] + ridge
        if denom <= 0.0:
            continue
        rho = colsq[j] * bj
        for i in range(n):
            rho += sw[i] * X[i, j] * r[i]
        if rho > thr:
            nb = (rho - thr) / denom
        elif rho < -thr:
            nb = (rho + thr) / denom
        else:
            nb = 0.0
        d = nb - bj
        if d != 0.0:
            for i in range(n):
                r[i] -= X[i, j] * d
            beta[j] = nb
            ad = abs(d)
            if ad > maxd:
                maxd = ad
    return maxd


@njit(cache=True)
def _sweep_masked(X, sw, r, beta, colsq, thr, ridge, mask, active_only):
    """Coordinate pass restricted to ``mask`` (screening candidate set)."""
    n, m = X.shape
    maxd = 0.0
    for j in range(m):
        if not mask[j]:
            continue
        bj = beta[j]
        if active_only and bj == 0.0:
            continue
        denom = colsq[j] + ridge
        if denom <= 0.0:
            continue
        rho = colsq[j] * bj
        for i in range(n):
            rho += sw[i] * X[i, j] * r[i]
        if rho > thr:
            nb = (rho - thr) / denom
        elif rho < -thr:
            nb = (rho + thr) / denom
        else:
            nb = 0.0
        d = nb - bj
        if d != 0.0:
            for i in range(n):
                r[i] -= X[i, j] * d
            beta[j] = nb
            ad = abs(d)
            if ad > maxd:
                maxd = ad
    return maxd


@njit(cache=True)
def _intercept_step(sw, r, sw_total):
    acc = 0.0
    for i in range(r.shape[0]):
        acc += sw[i] * r[i]
    d = acc / sw_total
    for i in range(r.shape[0]):
        r[i] -= d
    return d


@njit(cache=True)
def _penalty(beta, lam, alpha):
    l1 = 0.0
    l2 = 0.0
    for j in range(beta.shape[0]):
        l1 += abs(beta[j])
        l2 += beta[j] * beta[j]
    return lam * ((1.0 - alpha) * l2 + alpha * l1)


@njit(cache=True)
def _gaussian_kkt(X, sw, r, beta, lam, alpha, use_icept):
    """Largest violation of the stationarity conditions at (beta, r)."""
    n, m = X.shape
    la = lam * alpha
    ridge2 = 2.0 * lam * (1.0 - alpha)
    worst = 0.0
    for j in range(m):
        g = 0.0
        for i in range(n):
            g += sw[i] * X[i, j] * r[i]
        g = -2.0 * g
        if beta[j] == 0.0:
            v = abs(g) - la
        elif beta[j] > 0.0:
            v = abs(g + ridge2 * beta[j] + la)
        else:
            v = abs(g + ridge2 * beta[j] - la)
        if v > worst:
            worst = v
    if use_icept:
        acc = 0.0
        for i in range(n):
            acc += sw[i] * r[i]
        v = abs(2.0 * acc)
        if v > worst:
            worst = v
    return worst


@njit(cache=True)
def gaussian_cd(X, y, sw, lam, alpha, use_icept, beta, b0_init, tol, kkt_tol, max_sweeps):
    """Weighted Gaussian elastic net by cyclic coordinate descent.

    ``beta`` is updated in place (enabling warm starts).  Returns
    ``(intercept, kkt_residual, sweeps, objective, monotone, converged)``.
    """
    n, m = X.shape
    thr = 0.5 * lam * alpha
    ridge = lam * (1.0 - alpha)
    sw_total = 0.0
    for i in range(n):
        sw_total += sw[i]
    colsq = _weighted_colsq(X, sw)

    r = np.empty(n)
    for i in range(n):
        r[i] = y[i]
    for j in range(m):
        bj = beta[j]
        if bj != 0.0:
            for i in range(n):
                r[i] -= X[i, j] * bj
    b0 = 0.0
    if use_icept:
        b0 = b0_init
        for i in range(n):
            r[i] -= b0
        b0 += _intercept_step(sw, r, sw_total)

    prev_obj = np.inf
    monotone = True
    kkt = np.inf
    sweeps = 0
    converged = False
    obj = np.inf
    while sweeps < max_sweeps:
        maxd = _sweep(X, sw, r, beta, colsq, thr, ridge, False)
        if use_icept:
            d = _intercept_step(sw, r, sw_total)
            b0 += d
            if abs(d) > maxd:
                maxd = abs(d)
        sweeps += 1
        while maxd >= tol and sweeps < max_sweeps:
            maxd = _sweep(X, sw, r, beta, colsq, thr, ridge, True)
            if use_icept:
                d = _intercept_step(sw, r, sw_total)
                b0 += d
                if abs(d) > maxd:
                    maxd = abs(d)
            sweeps += 1

        rss = 0.0
        for i in range(n):
            rss += sw[i] * r[i] * r[i]
        obj = rss + _penalty(beta, lam, alpha)
        if obj > prev_obj + 1e-9 * (1.0 + abs(prev_obj)):
            monotone = False
        prev_obj = obj

        kkt = _gaussian_kkt(X, sw, r, beta, lam, alpha, use_icept)
        if kkt <= kkt_tol:
            converged = True
            break
    return b0, kkt, sweeps, obj, monotone, converged


@njit(cache=True)
def _gaussian_grad_abs(X, sw, r, out):
    """|gradient| of the residual sum of squares, per coordinate."""
    n, m = X.shape
    for j in range(m):
        g = 0.0
        for i in range(n):
            g += sw[i] * X[i, j] * r[i]
        out[j] = abs(2.0 * g)


@njit(cache=True)
def gaussian_path(X, y, sw, lambdas, alpha, use_icept, tol, kkt_tol, max_sweeps):
    """Warm-started solutions along a decreasing penalty grid.

    Each step screens coordinates with the sequential strong rule (a
    coordinate is a candidate when its gradient at the previous solution
    exceeds ``alpha * (2*lam_k - lam_{k-1})``), solves on the candidate set,
    then checks stationarity over all coordinates and re-solves if any
    violator slipped through, so screening never changes the solution.
    """
    n, m = X.shape
    L = lambdas.shape[0]
    B = np.zeros((m, L))
    b0s = np.zeros(L)
    kkts = np.zeros(L)
    beta = np.zeros(m)
    b0 = 0.0
    sw_total = 0.0
    for i in range(n):
        sw_total += sw[i]
    colsq = _weighted_colsq(X, sw)
    r = np.empty(n)
    for i in range(n):
        r[i] = y[i]
    if use_icept:
        acc = 0.0
        for i in range(n):
            acc += sw[i] * r[i]
        b0 = acc / sw_total
        for i in range(n):
            r[i] -= b0
    grad = np.empty(m)
    mask = np.zeros(m, dtype=np.bool_)
    prev_lam = lambdas[0]
    for l in range(L):
        lam = lambdas[l]
        thr = 0.5 * lam * alpha
        ridge = lam * (1.0 - alpha)
        strong = alpha * (2.0 * lam - prev_lam)
        _gaussian_grad_abs(X, sw, r, grad)
        for j in range(m):
            mask[j] = (beta[j] != 0.0) or (grad[j] >= strong)
        kkt = np.inf
        for _round in range(100):
            sweeps = 0
            while sweeps < max_sweeps:
                maxd = _sweep_masked(X, sw, r, beta, colsq, thr, ridge, mask, False)
                if use_icept:
                    d = _intercept_step(sw, r, sw_total)
                    b0 += d
                    if abs(d) > maxd:
                        maxd = abs(d)
                sweeps += 1
                while maxd >= tol and sweeps < max_sweeps:
                    maxd = _sweep_masked(X, sw, r, beta, colsq, thr, ridge, mask, True)
                    if use_icept:
                        d = _intercept_step(sw, r, sw_total)
                        b0 += d
                        if abs(d) > maxd:
                            maxd = abs(d)
                    sweeps += 1
                # stationarity on the candidate set only
                kkt_in = 0.0
                for j in range(m):
                    if not mask[j]:
                        continue
                    g = 0.0
                    for i in range(n):
                        g += sw[i] * X[i, j] * r[i]
                    g = -2.0 * g
                    if beta[j] == 0.0:
                        v = abs(g) - lam * alpha
                    elif beta[j] > 0.0:
                        v = abs(g + 2.0 * ridge * beta[j] + lam * alpha)
                    else:
                        v = abs(g + 2.0 * ridge * beta[j] - lam * alpha)
                    if v > kkt_in:
                        kkt_in = v
                if kkt_in <= kkt_tol:
                    break
            # full check: pull in any screened-out violator
            _gaussian_grad_abs(X, sw, r, grad)
            kkt = 0.0
            grew = False
            for j in range(m):
                if beta[j] == 0.0:
                    v = grad[j] - lam * alpha
                else:
                    g = 0.0
                    for i in range(n):
                        g += sw[i] * X[i, j] * r[i]
                    g = -2.0 * g
                    if beta[j] > 0.0:
                        v = abs(g + 2.0 * ridge * beta[j] + lam * alpha)
                    else:
                        v = abs(g + 2.0 * ridge * beta[j] - lam * alpha)
                if v > kkt:
                    kkt = v
                if v > kkt_tol and not mask[j]:
                    mask[j] = True
                    grew = True
            if not grew:
                break
        for j in range(m):
            B[j, l] = beta[j]
        b0s[l] = b0
        kkts[l] = kkt
        prev_lam = lam
    return B, b0s, kkts


@njit(cache=True)
def _logistic_terms(X, w01, sw, beta, b0):
    """Linear predictor, fitted probabilities and penalized NLL pieces."""
    n = X.shape[0]
    eta = np.empty(n)
    for i in range(n):
        e = b0
        for j in range(X.shape[1]):
            if beta[j] != 0.0:
                e += X[i, j] * beta[j]
        eta[i] = e
    prob = np.empty(n)
    nll = 0.0
    for i in range(n):
        e = eta[i]
        if e >= 0.0:
            z = np.exp(-e)
            pi = 1.0 / (1.0 + z)
            # log(1 + exp(-e)) stable on either branch
            log1p = np.log1p(z)
            nll += sw[i] * (log1p + (1.0 - w01[i]) * e)
        else:
            z = np.exp(e)
            pi = z / (1.0 + z)
            log1p = np.log1p(z)
            nll += sw[i] * (log1p - w01[i] * e)
        prob[i] = min(max(pi, 1e-10), 1.0 - 1e-10)
    return eta, prob, nll


@njit(cache=True)
def _logistic_kkt(X, w01, sw, prob, beta, lam, alpha, use_icept):
    n, m = X.shape
    la = lam * alpha
    ridge2 = 2.0 * lam * (1.0 - alpha)
    worst = 0.0
    for j in range(m):
        g = 0.0
        for i in range(n):
            g += sw[i] * X[i, j] * (w01[i] - prob[i])
        g = -g
        if beta[j] == 0.0:
            v = abs(g) - la
        elif beta[j] > 0.0:
            v = abs(g + ridge2 * beta[j] + la)
        else:
            v = abs(g + ridge2 * beta[j] - la)
        if v > worst:
            worst = v
    if use_icept:
        acc = 0.0
        for i in range(n):
            acc += sw[i] * (w01[i] - prob[i])
        if abs(acc) > worst:
            worst = abs(acc)
    return worst


@njit(cache=True)
def _logistic_kkt_masked(X, w01, sw, prob, beta, lam, alpha, use_icept, mask):
    n, m = X.shape
    la = lam * alpha
    ridge2 = 2.0 * lam * (1.0 - alpha)
    worst = 0.0
    for j in range(m):
        if not mask[j]:
            continue
        g = 0.0
        for i in range(n):
            g += sw[i] * X[i, j] * (w01[i] - prob[i])
        g = -g
        if beta[j] == 0.0:
            v = abs(g) - la
        elif beta[j] > 0.0:
            v = abs(g + ridge2 * beta[j] + la)
        else:
            v = abs(g + ridge2 * beta[j] - la)
        if v > worst:
            worst = v
    if use_icept:
        acc = 0.0
        for i in range(n):
            acc += sw[i] * (w01[i] - prob[i])
        if abs(acc) > worst:
            worst = abs(acc)
    return worst


@njit(cache=True)
def _logistic_cd_core(X, w01, sw, lam, alpha, use_icept, beta, b0_init, tol, kkt_tol,
                      max_outer, max_sweeps, coef_cap, mask):
    """IRLS over the candidate set ``mask``; see ``logistic_cd``."""
    n, m = X.shape
    b0 = b0_init
    eta, prob, nll = _logistic_terms(X, w01, sw, beta, b0)
    obj = nll + _penalty(beta, lam, alpha)
    capped = False
    converged = False
    outer = 0
    irls_w = np.empty(n)
    z = np.empty(n)
    r = np.empty(n)
    beta_old = np.empty(m)
    thr = 0.5 * (2.0 * lam) * alpha          # quadratic model doubles the penalty
    ridge = (2.0 * lam) * (1.0 - alpha)
    for outer in range(1, max_outer + 1):
        sw_total = 0.0
        for i in range(n):
            om = prob[i] * (1.0 - prob[i])
            if om < 1e-5:
                om = 1e-5
            irls_w[i] = sw[i] * om
            sw_total += irls_w[i]
            z[i] = eta[i] + (w01[i] - prob[i]) / om
        for j in range(m):
            beta_old[j] = beta[j]
        b0_old = b0
        colsq = _weighted_colsq(X, irls_w)
        for i in range(n):
            r[i] = z[i] - b0
        for j in range(m):
            if beta[j] != 0.0:
                for i in range(n):
                    r[i] -= X[i, j] * beta[j]
        sweeps = 0
        while sweeps < max_sweeps:
            maxd = _sweep_masked(X, irls_w, r, beta, colsq, thr, ridge, mask, False)
            if use_icept:
                d = _intercept_step(irls_w, r, sw_total)
                b0 += d
                if abs(d) > maxd:
                    maxd = abs(d)
            sweeps += 1
            while maxd >= tol and sweeps < max_sweeps:
                maxd = _sweep_masked(X, irls_w, r, beta, colsq, thr, ridge, mask, True)
                if use_icept:
                    d = _intercept_step(irls_w, r, sw_total)
                    b0 += d
                    if abs(d) > maxd:
                        maxd = abs(d)
                sweeps += 1
            if maxd < tol:
                break
        # halving line search on the true penalized NLL
        step = 1.0
        for _ in range(12):
            eta, prob, nll = _logistic_terms(X, w01, sw, beta, b0)
            new_obj = nll + _penalty(beta, lam, alpha)
            if new_obj <= obj + 1e-12 * (1.0 + abs(obj)):
                break
            step *= 0.5
            for j in range(m):
                beta[j] = beta_old[j] + step * (beta[j] - beta_old[j])
            b0 = b0_old + step * (b0 - b0_old)
        delta = abs(b0 - b0_old)
        for j in range(m):
            d = abs(beta[j] - beta_old[j])
            if d > delta:
                delta = d
        big = 0.0
        for j in range(m):
            if abs(beta[j]) > big:
                big = abs(beta[j])
        if big > coef_cap:
            for j in range(m):
                if beta[j] > coef_cap:
                    beta[j] = coef_cap
                elif beta[j] < -coef_cap:
                    beta[j] = -coef_cap
            eta, prob, nll = _logistic_terms(X, w01, sw, beta, b0)
            capped = True
            break
        kkt = _logistic_kkt_masked(X, w01, sw, prob, beta, lam, alpha, use_icept, mask)
        if kkt <= kkt_tol:
            converged = True
            break
        if delta < 1e-13:  # quadratic model is stationary; nothing left to move
            break
        obj = nll + _penalty(beta, lam, alpha)
    kkt = _logistic_kkt_masked(X, w01, sw, prob, beta, lam, alpha, use_icept, mask)
    return b0, kkt, outer, capped, converged


@njit(cache=True)
def logistic_cd(X, w01, sw, lam, alpha, use_icept, beta, b0_init, tol, kkt_tol,
                max_outer, max_sweeps, coef_cap):
    """Penalized logistic regression by iteratively reweighted least squares.

    Each outer step builds the local quadratic model of the negative
    log-likelihood and hands it to the weighted least-squares sweeps (the 1/2
    factor of the quadratic model doubles the effective penalty there).  A
    halving line search keeps the true penalized NLL monotone, and run-away
    coefficients (separable data with a weak penalty) are capped.

    Returns ``(intercept, kkt_residual, outer_iterations, capped, converged)``.
    """
    mask = np.ones(X.shape[1], dtype=np.bool_)
    return _logistic_cd_core(X, w01, sw, lam, alpha, use_icept, beta, b0_init,
                             tol, kkt_tol, max_outer, max_sweeps, coef_cap, mask)


@njit(cache=True)
def logistic_path(X, w01, sw, lambdas, alpha, use_icept, b0_start, tol, kkt_tol,
                  max_outer, max_sweeps, coef_cap):
    """Warm-started logistic path with sequential strong-rule screening."""
    n, m = X.shape
    L = lambdas.shape[0]
    B = np.zeros((m, L))
    b0s = np.zeros(L)
    kkts = np.zeros(L)
    any_capped = False
    beta = np.zeros(m)
    b0 = b0_start
    mask = np.zeros(m, dtype=np.bool_)
    prev_lam = lambdas[0]
    for l in range(L):
        lam = lambdas[l]
        strong = alpha * (2.0 * lam - prev_lam)
        eta, prob, _ = _logistic_terms(X, w01, sw, beta, b0)
        for j in range(m):
            g = 0.0
            for i in range(n):
                g += sw[i] * X[i, j] * (w01[i] - prob[i])
            mask[j] = (beta[j] != 0.0) or (abs(g) >= strong)
        kkt = np.inf
        capped = False
        for _round in range(100):
            b0, kkt_in, _, capped, _ = _logistic_cd_core(
                X, w01, sw, lam, alpha, use_icept, beta, b0, tol, kkt_tol,
                max_outer, max_sweeps, coef_cap, mask,
            )
            if capped:
                any_capped = True
            eta, prob, _ = _logistic_terms(X, w01, sw, beta, b0)
            kkt = kkt_in
            grew = False
            la = lam * alpha
            for j in range(m):
                if mask[j]:
                    continue
                g = 0.0
                for i in range(n):
                    g += sw[i] * X[i, j] * (w01[i] - prob[i])
                v = abs(g) - la
                if v > kkt:
                    kkt = v
                if v > kkt_tol:
                    mask[j] = True
                    grew = True
            if not grew or capped:
                break
        for j in range(m):
            B[j, l] = beta[j]
        b0s[l] = b0
        kkts[l] = kkt
        prev_lam = lam
    return B, b0s, kkts, any_capped
