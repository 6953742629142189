"""Synthetic designs with known treatment effects for benchmark studies.

Five generative families are provided: two cluster layouts where treatment is
confounded with a cluster shift, two logistic-assignment models over AR(1)
Gaussian covariates, and a deliberately nonlinear design on which every
linear outcome model is wrong.  Each draw returns the dataset together with
the ground-truth estimand and whatever latent quantities (cluster labels,
assignment probabilities, coefficient vectors) an oracle would know.

Draws are pure functions of ``(design, replication index)``: the generator is
a counter-based Philox stream keyed by the design seed and the replication,
so replications can be produced in any order, in parallel, bit-for-bit
reproducibly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ._rng import philox_rng
from .data import Dataset

DESIGN_KINDS = (
    "two_cluster",
    "many_cluster",
    "sparse_two_stage",
    "moderately_sparse_two_stage",
    "misspecified",
)

BETA_KINDS = (
    "dense",             # beta_j ~ 1/sqrt(j)
    "harmonic",          # beta_j ~ 1/(9 + j)
    "moderately_sparse", # 10 tens, 90 ones, then zeros
    "very_sparse",       # 10 ones, then zeros
    "inv_square",        # beta_j ~ 1/j^2
    "inv_sqrt",          # beta_j ~ 1/sqrt(j)  (alias of dense, kept for clarity)
    "inv_j",             # beta_j ~ 1/j
)


@dataclass(frozen=True)
class BetaModel:
    """A named coefficient pattern rescaled to a target Euclidean norm."""

    kind: str
    norm: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in BETA_KINDS:
            raise ValueError(f"unknown beta kind {self.kind!r}; choose from {BETA_KINDS}")
        if self.norm <= 0.0:
            raise ValueError("norm must be positive")


def make_beta(model: BetaModel, p: int, index_shift: bool = False) -> np.ndarray:
    """Build a coefficient vector of length ``p`` with ``||beta||_2 == norm``.

    With ``index_shift`` the pattern is read at positions ``23*(j-1) mod p``
    instead of ``j-1``, spreading the large entries across the coordinate
    range; the vector is rescaled after shifting.
    """
    j = np.arange(1, p + 1, dtype=np.float64)
    kind = model.kind
    if kind in ("dense", "inv_sqrt"):
        base = 1.0 / np.sqrt(j)
    elif kind == "harmonic":
        base = 1.0 / (9.0 + j)
    elif kind == "inv_square":
        base = 1.0 / j ** 2
    elif kind == "inv_j":
        base = 1.0 / j
    elif kind == "very_sparse":
        if p < 10:
            raise ValueError("very_sparse pattern needs p >= 10")
        base = np.zeros(p)
        base[:10] = 1.0
    elif kind == "moderately_sparse":
        if p < 100:
            raise ValueError("moderately_sparse pattern needs p >= 100")
        base = np.zeros(p)
        base[:10] = 10.0
        base[10:100] = 1.0
    else:  # pragma: no cover - guarded by BetaModel
        raise ValueError(kind)
    if index_shift:
        pos = (23 * (j.astype(np.int64) - 1)) % p
        base = base[pos]
    return base * (model.norm / np.linalg.norm(base))


@dataclass(frozen=True)
class SimulationDesign:
    """Parameters of one generative model.

    Only the fields relevant to ``kind`` are read; see the ``draw_*``
    functions for the exact data-generating equations.
    """

    kind: str
    n: int
    p: int
    seed: int = 0
    beta: BetaModel | None = None
    delta_kind: str = "dense"          # two_cluster: dense | sparse separation
    eta: float = 0.1                   # many_cluster: within-block treatment rate
    n_clusters: int = 20               # many_cluster
    rho: float = 0.5                   # two-stage designs: AR(1) autocorrelation
    beta_w_kind: str = "very_sparse"   # sparse_two_stage: very_sparse (1/j^2) | dense (1/sqrt j)
    beta_w_norm: float = 1.0           # sparse_two_stage
    name: str = ""

    def __post_init__(self) -> None:
        if self.kind not in DESIGN_KINDS:
            raise ValueError(f"unknown design {self.kind!r}; choose from {DESIGN_KINDS}")
        if self.n < 2 or self.p < 1:
            raise ValueError("need n >= 2 and p >= 1")
        if not -1.0 < self.rho < 1.0:
            raise ValueError("rho must lie in (-1, 1)")
        if not 0.0 < self.eta < 1.0:
            raise ValueError("eta must lie in (0, 1)")
        if self.delta_kind not in ("dense", "sparse"):
            raise ValueError("delta_kind must be 'dense' or 'sparse'")
        if self.beta_w_kind not in ("very_sparse", "dense"):
            raise ValueError("beta_w_kind must be 'very_sparse' or 'dense'")
        if not self.name:
            object.__setattr__(self, "name", default_name(self))


def default_name(design: SimulationDesign) -> str:
    kind = design.kind
    if kind == "two_cluster":
        return f"two_cluster/{design.beta.kind if design.beta else 'none'}/{design.delta_kind}"
    if kind == "many_cluster":
        return f"many_cluster/{design.beta.kind if design.beta else 'none'}/eta{design.eta:g}"
    if kind == "sparse_two_stage":
        by = design.beta.norm if design.beta else 1.0
        return (f"sparse_two_stage/{design.beta_w_kind}"
                f"/bw{design.beta_w_norm:g}/by{by:g}/rho{design.rho:g}")
    if kind == "moderately_sparse_two_stage":
        return f"moderately_sparse_two_stage/{design.beta.kind if design.beta else 'none'}/rho{design.rho:g}"
    return f"misspecified/n{design.n}/p{design.p}"


@dataclass(frozen=True)
class SimDraw:
    """One simulated dataset plus its ground truth."""

    data: Dataset
    tau_true: float
    oracle_info: dict = field(default_factory=dict)


def _require_beta(design: SimulationDesign) -> BetaModel:
    if design.beta is None:
        raise ValueError(f"design kind {design.kind!r} needs a BetaModel")
    return design.beta


def draw_two_cluster(design: SimulationDesign, rep: int = 0) -> SimDraw:
    """Two cluster centers, treatment leaning 80/20 toward one of them.

    ``W ~ Bernoulli(1/2)``; the unit sits at center ``delta`` with
    probability 0.8 when treated and 0.2 when control; ``X`` adds standard
    Gaussian noise to the center and ``Y = X.beta + W + eps``.  The dense
    separation is ``4/sqrt(n)`` in every coordinate, the sparse one
    ``40/sqrt(n)`` in every tenth coordinate.  The unit effect is additive,
    so the estimand is exactly 1.
    """
    rng = philox_rng(design.seed, rep)
    n, p = design.n, design.p
    beta = make_beta(_require_beta(design), p)
    w = (rng.random(n) < 0.5).astype(np.int64)
    shifted = rng.random(n) < np.where(w == 1, 0.8, 0.2)
    if design.delta_kind == "dense":
        delta = np.full(p, 4.0 / np.sqrt(n))
    else:
        delta = np.zeros(p)
        delta[0::10] = 40.0 / np.sqrt(n)
    X = rng.standard_normal((n, p))
    X[shifted] += delta
    eps = rng.standard_normal(n)
    Y = X @ beta + w + eps
    return SimDraw(
        data=Dataset(X, w, Y),
        tau_true=1.0,
        oracle_info={"beta": beta, "cluster": shifted.astype(np.int64),
                     "propensity": np.where(shifted, 0.8, 0.2)},
    )


def draw_many_cluster(design: SimulationDesign, rep: int = 0) -> SimDraw:
    """Twenty Gaussian cluster centers with block-structured treatment rates.

    Centers are drawn fresh per replication; units land on a uniformly chosen
    center plus Gaussian noise.  Units in the first half of the clusters are
    treated with probability ``eta``, in the second half with ``1 - eta``;
    the outcome is again ``X.beta + W + eps`` with unit effect 1.
    """
    rng = philox_rng(design.seed, rep)
    n, p, k = design.n, design.p, design.n_clusters
    beta = make_beta(_require_beta(design), p)
    centers = rng.standard_normal((k, p))
    labels = rng.integers(0, k, size=n)
    prob = np.where(labels < k // 2, design.eta, 1.0 - design.eta)
    w = (rng.random(n) < prob).astype(np.int64)
    X = centers[labels] + rng.standard_normal((n, p))
    Y = X @ beta + w + rng.standard_normal(n)
    return SimDraw(
        data=Dataset(X, w, Y),
        tau_true=1.0,
        oracle_info={"beta": beta, "cluster": labels, "propensity": prob},
    )


def _ar1_covariates(rng: np.random.Generator, n: int, p: int, rho: float) -> np.ndarray:
    """Stationary AR(1) rows: unit marginals, lag-one correlation ``rho``."""
    Z = rng.standard_normal((n, p))
    X = np.empty((n, p))
    X[:, 0] = Z[:, 0]
    scale = np.sqrt(1.0 - rho ** 2)
    for j in range(1, p):
        X[:, j] = rho * X[:, j - 1] + scale * Z[:, j]
    return X


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def draw_sparse_two_stage(design: SimulationDesign, rep: int = 0) -> SimDraw:
    """Logistic selection on a latent index over AR(1) covariates.

    ``theta = X.beta_w + eps1`` and ``P(W=1) = 1/(1 + exp(theta))``, so large
    indices push units toward control; the outcome is
    ``Y = X.beta_y + 0.5 W + eps2`` with ``beta_y ~ 1/j^2``.  The assignment
    coefficient decays like ``1/j^2`` ("very_sparse") or ``1/sqrt(j)``
    ("dense").
    """
    rng = philox_rng(design.seed, rep)
    n, p = design.n, design.p
    beta_y = make_beta(BetaModel("inv_square", design.beta.norm if design.beta else 1.0), p)
    bw_kind = "inv_square" if design.beta_w_kind == "very_sparse" else "inv_sqrt"
    beta_w = make_beta(BetaModel(bw_kind, design.beta_w_norm), p)
    X = _ar1_covariates(rng, n, p, design.rho)
    theta = X @ beta_w + rng.standard_normal(n)
    assign = _sigmoid(-theta)
    w = (rng.random(n) < assign).astype(np.int64)
    Y = X @ beta_y + 0.5 * w + rng.standard_normal(n)
    return SimDraw(
        data=Dataset(X, w, Y),
        tau_true=0.5,
        oracle_info={"beta_y": beta_y, "beta_w": beta_w, "assignment_prob": assign},
    )


def draw_moderately_sparse_two_stage(design: SimulationDesign, rep: int = 0) -> SimDraw:
    """Well-specified logistic assignment with an index-shifted outcome model.

    The outcome coefficients follow the named pattern with indices multiplied
    by 23 mod p; assignment is ``P(W=1) = sigmoid(sum of the first 100
    covariates / 40)``.  Outcome: ``Y = X.beta + 0.5 W + eps``.
    """
    if design.p < 100:
        raise ValueError("moderately sparse two-stage design needs p >= 100")
    rng = philox_rng(design.seed, rep)
    n, p = design.n, design.p
    beta_y = make_beta(_require_beta(design), p, index_shift=True)
    X = _ar1_covariates(rng, n, p, design.rho)
    assign = _sigmoid(X[:, :100].sum(axis=1) / 40.0)
    w = (rng.random(n) < assign).astype(np.int64)
    Y = X @ beta_y + 0.5 * w + rng.standard_normal(n)
    return SimDraw(
        data=Dataset(X, w, Y),
        tau_true=0.5,
        oracle_info={"beta_y": beta_y, "assignment_prob": assign},
    )


def draw_misspecified(design: SimulationDesign, rep: int = 0) -> SimDraw:
    """Nonlinear effect and assignment driven by the first covariate.

    ``theta = log(1 + exp(-2 - 2 x_1)) / 0.915``, ``P(W=1) = 1 - exp(-theta)``
    and ``Y = x_1 + ... + x_10 + theta*(2W - 1)/2 + eps``: the unit-level
    effect is ``theta`` itself, so treated units (which tend to have large
    ``theta``) benefit far more than average.  The reported estimand is the
    realized treated-sample mean of ``theta``.
    """
    rng = philox_rng(design.seed, rep)
    n, p = design.n, design.p
    if p < 10:
        raise ValueError("misspecified design needs p >= 10")
    X = rng.standard_normal((n, p))
    theta = np.logaddexp(0.0, -2.0 - 2.0 * X[:, 0]) / 0.915
    w = (rng.random(n) < 1.0 - np.exp(-theta)).astype(np.int64)
    Y = X[:, :10].sum(axis=1) + theta * (2 * w - 1) / 2.0 + rng.standard_normal(n)
    if w.sum() == 0:
        raise ValueError("draw produced no treated units; increase n")
    return SimDraw(
        data=Dataset(X, w, Y),
        tau_true=float(theta[w == 1].mean()),
        oracle_info={"theta": theta, "assignment_prob": 1.0 - np.exp(-theta)},
    )


_DRAWERS: dict[str, Callable[[SimulationDesign, int], SimDraw]] = {
    "two_cluster": draw_two_cluster,
    "many_cluster": draw_many_cluster,
    "sparse_two_stage": draw_sparse_two_stage,
    "moderately_sparse_two_stage": draw_moderately_sparse_two_stage,
    "misspecified": draw_misspecified,
}


def draw(design: SimulationDesign, rep: int = 0) -> SimDraw:
    """Produce the ``rep``-th replication of a design, deterministically."""
    return _DRAWERS[design.kind](design, rep)
