"""Observational data containers and CSV input/output.

Every estimator in this package consumes the same triple: a dense covariate
matrix ``X`` (one row per unit), a binary treatment indicator ``W`` and a
scalar outcome ``Y``.  Units are kept in input order throughout so that
per-unit quantities (balancing weights in particular) can always be reported
against the rows of the original file.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np


class DataError(ValueError):
    """Raised for malformed, inconsistent or degenerate input data."""


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Dataset:
    """An observational sample ``(X, W, Y)``.

    Parameters
    ----------
    X : ndarray, shape (n, p)
        Covariates.  Stored Fortran-ordered because all solvers in this
        package sweep columns.
    W : ndarray, shape (n,)
        Treatment indicator, entries in {0, 1}; both arms must be present.
    Y : ndarray, shape (n,)
        Observed outcome.

    The arrays are copied on construction and marked read-only; a ``Dataset``
    is therefore safe to share across threads and worker processes.
    """

    X: np.ndarray
    W: np.ndarray
    Y: np.ndarray

    def __post_init__(self) -> None:
        X = np.asfortranarray(self.X, dtype=np.float64)
        W = np.asarray(self.W)
        Y = np.array(self.Y, dtype=np.float64)
        if X.ndim != 2:
            raise DataError("X must be a 2-d matrix")
        n, p = X.shape
        if n < 2 or p < 1:
            raise DataError(f"need at least 2 rows and 1 covariate, got X of shape {X.shape}")
        if W.shape != (n,) or Y.shape != (n,):
            raise DataError("W and Y must be vectors with one entry per row of X")
        if not np.isfinite(X).all():
            raise DataError("X contains non-finite entries")
        if not np.isfinite(Y).all():
            raise DataError("Y contains non-finite entries")
        Wf = np.asarray(W, dtype=np.float64)
        if not np.isin(Wf, (0.0, 1.0)).all():
            raise DataError("W must be binary (0/1)")
        Wi = Wf.astype(np.int64)
        n_t = int(Wi.sum())
        if n_t == 0:
            raise DataError("empty treated arm")
        if n_t == n:
            raise DataError("empty control arm")
        object.__setattr__(self, "X", _frozen(X))
        object.__setattr__(self, "W", _frozen(Wi))
        object.__setattr__(self, "Y", _frozen(Y))

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    @property
    def n_treated(self) -> int:
        return int(self.W.sum())

    @property
    def n_control(self) -> int:
        return self.n - self.n_treated


@dataclass(frozen=True)
class ArmView:
    """Rows of a :class:`Dataset` belonging to one treatment arm.

    ``indices`` are strictly increasing positions into the parent dataset, so
    weights computed on an arm can be mapped back to input rows.
    """

    indices: np.ndarray
    Xsub: np.ndarray
    Ysub: np.ndarray

    def __post_init__(self) -> None:
        idx = np.asarray(self.indices, dtype=np.int64)
        if idx.ndim != 1 or (np.diff(idx) <= 0).any():
            raise DataError("arm indices must be strictly increasing")
        if self.Xsub.shape[0] != idx.shape[0] or self.Ysub.shape[0] != idx.shape[0]:
            raise DataError("arm submatrix row count does not match index count")
        object.__setattr__(self, "indices", _frozen(idx))

    @property
    def size(self) -> int:
        return self.indices.shape[0]


@dataclass(frozen=True)
class TargetMean:
    """A target covariate profile; the balance solvers chase this vector."""

    xi: np.ndarray

    def __post_init__(self) -> None:
        xi = np.array(self.xi, dtype=np.float64).ravel()
        if not np.isfinite(xi).all():
            raise DataError("target mean contains non-finite entries")
        object.__setattr__(self, "xi", _frozen(xi))


def split_by_arm(data: Dataset) -> tuple[ArmView, ArmView]:
    """Partition a dataset into its (control, treated) arms.

    The two index sets are disjoint and jointly cover every row.
    """
    w = data.W.astype(bool)
    idx_c = np.flatnonzero(~w)
    idx_t = np.flatnonzero(w)
    control = ArmView(idx_c, np.asfortranarray(data.X[idx_c]), data.Y[idx_c])
    treated = ArmView(idx_t, np.asfortranarray(data.X[idx_t]), data.Y[idx_t])
    return control, treated


def treated_mean_covariates(treated: ArmView) -> TargetMean:
    """Column means of the treated-arm covariates."""
    if treated.size == 0:
        raise DataError("empty treated arm")
    return TargetMean(treated.Xsub.mean(axis=0))


def load_csv(path, treatment_col: str = "w", outcome_col: str = "y") -> Dataset:
    """Read a dataset from an RFC-4180-style CSV file with a header row.

    The columns named ``treatment_col`` and ``outcome_col`` supply ``W`` and
    ``Y``; every other column is parsed as a numeric covariate, in header
    order.  Missing or non-numeric cells are rejected with the offending data
    row and column named; imputation is deliberately not offered.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file, header row required") from None
        header = [h.strip() for h in header]
        if len(set(header)) != len(header):
            raise DataError(f"{path}: duplicate column names in header")
        for name in (treatment_col, outcome_col):
            if name not in header:
                raise DataError(f"{path}: missing column {name!r} (header: {', '.join(header)})")
        if treatment_col == outcome_col:
            raise DataError("treatment and outcome columns must differ")
        w_pos = header.index(treatment_col)
        y_pos = header.index(outcome_col)
        x_pos = [k for k in range(len(header)) if k not in (w_pos, y_pos)]
        if not x_pos:
            raise DataError(f"{path}: no covariate columns besides {treatment_col!r} and {outcome_col!r}")

        rows_x: list[list[float]] = []
        rows_w: list[int] = []
        rows_y: list[float] = []
        for rownum, row in enumerate(reader, start=1):
            if len(row) != len(header):
                raise DataError(f"{path}: data row {rownum} has {len(row)} cells, expected {len(header)}")

            def cell(k: int) -> float:
                raw = row[k].strip()
                try:
                    val = float(raw)
                except ValueError:
                    val = np.nan
                if not np.isfinite(val):
                    raise DataError(
                        f"{path}: non-numeric or missing value {row[k]!r} at data row {rownum}, "
                        f"column {header[k]!r}"
                    )
                return val

            wv = cell(w_pos)
            if wv not in (0.0, 1.0):
                raise DataError(
                    f"{path}: non-binary treatment value {row[w_pos]!r} at data row {rownum}, "
                    f"column {treatment_col!r}"
                )
            rows_w.append(int(wv))
            rows_y.append(cell(y_pos))
            rows_x.append([cell(k) for k in x_pos])

    if not rows_x:
        raise DataError(f"{path}: no data rows")
    return Dataset(np.asarray(rows_x, dtype=np.float64), np.asarray(rows_w), np.asarray(rows_y))


def save_csv(
    data: Dataset,
    path,
    treatment_col: str = "w",
    outcome_col: str = "y",
    covariate_names: list[str] | None = None,
) -> None:
    """Write a dataset as CSV; finite doubles round-trip exactly.

    Floats are serialized with 17 significant digits so that
    ``load_csv(save_csv(d)) == d`` bit for bit.
    """
    if covariate_names is None:
        covariate_names = [f"x{j + 1}" for j in range(data.p)]
    if len(covariate_names) != data.p:
        raise DataError("covariate_names length does not match number of columns")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([outcome_col, treatment_col, *covariate_names])
        for i in range(data.n):
            writer.writerow(
                [format(data.Y[i], ".17g"), int(data.W[i])]
                + [format(v, ".17g") for v in data.X[i]]
            )
