"""Exact Euclidean projections used by the weight solvers.

Both projections reduce to a one-dimensional piecewise-linear root find and
are solved exactly by sorting, in O(n log n).
"""

from __future__ import annotations

import numpy as np


def project_capped_simplex(x: np.ndarray, cap: float, total: float = 1.0) -> np.ndarray:
    """Project ``x`` onto ``{g : sum(g) = total, 0 <= g_i <= cap}``.

    The projection is ``g_i = clip(x_i - theta, 0, cap)`` for the unique
    ``theta`` at which the coordinate sum hits ``total``; ``theta`` is found
    exactly by walking the sorted breakpoints of the piecewise-linear sum.
    """
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[0]
    if cap <= 0.0 or n * cap < total - 1e-12:
        raise ValueError(f"capped simplex is empty: n*cap = {n * cap:g} < total = {total:g}")
    if total <= 0.0:
        raise ValueError("total must be positive")

    # sum(theta) = cap * #{x_i - theta >= cap} + sum of the interior x_i - theta
    xs = np.sort(x)
    prefix = np.concatenate(([0.0], np.cumsum(xs)))

    def coordinate_sums(thetas: np.ndarray) -> np.ndarray:
        lo = np.searchsorted(xs, thetas, side="right")        # x_i <= theta -> 0
        hi = np.searchsorted(xs, thetas + cap, side="left")   # x_i >= theta + cap -> cap
        return cap * (n - hi) + (prefix[hi] - prefix[lo]) - thetas * (hi - lo)

    knots = np.sort(np.concatenate([xs - cap, xs]))
    sums = coordinate_sums(knots)
    # sums is non-increasing; locate the knot interval bracketing `total`
    k = int(np.searchsorted(-sums, -total, side="left"))
    if sums[k] == total or k == 0:
        theta = knots[k]
    else:
        t_lo, t_hi = knots[k - 1], knots[k]
        probe = np.array([0.5 * (t_lo + t_hi)])
        mid = (np.searchsorted(xs, probe[0] + cap, side="left")
               - np.searchsorted(xs, probe[0], side="right"))
        if mid == 0:
            theta = t_hi  # flat stretch, any point attains the same sum
        else:
            theta = t_lo + (coordinate_sums(np.array([t_lo]))[0] - total) / mid
    return np.clip(x - theta, 0.0, cap)


def project_box(x: np.ndarray, cap: float) -> np.ndarray:
    """Project onto the symmetric box ``|g_i| <= cap``."""
    return np.clip(x, -cap, cap)


def project_sup_norm_cone(v: np.ndarray, r: float) -> tuple[np.ndarray, float]:
    """Project ``(v, r)`` onto the cone ``{(u, s) : max|u_i| <= s}``.

    For a fixed slack ``s`` the best ``u`` is ``clip(v, -s, s)``, which turns
    the problem into a scalar minimization of
    ``sum((|v_i| - s)_+^2) + (s - r)^2`` whose root is found by water-filling
    over the sorted magnitudes.
    """
    a = np.abs(np.asarray(v, dtype=np.float64))
    if a.size == 0:
        return np.asarray(v, dtype=np.float64), max(r, 0.0)
    amax = a.max()
    if r >= amax:
        return np.asarray(v, dtype=np.float64).copy(), float(r)

    # stationarity: (1 + k) s = r + sum of the k largest magnitudes above s
    order = np.sort(a)[::-1]
    csum = np.cumsum(order)
    ks = np.arange(1, a.size + 1)
    cand = (r + csum) / (1.0 + ks)
    upper = order
    lower = np.concatenate([order[1:], [-np.inf]])
    valid = (cand <= upper) & (cand >= lower)
    if valid.any():
        s = float(cand[np.argmax(valid)])
    else:
        s = float(cand[-1])
    if s <= 0.0:
        return np.zeros_like(a), 0.0
    return np.clip(v, -s, s), s
