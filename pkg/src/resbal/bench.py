"""Monte Carlo benchmark harness.

Runs a grid of simulation designs against a set of estimators, aggregates
root-mean-squared error, bias, spread, interval coverage and failure counts,
and writes machine-readable tables.  Replications are deterministic given the
experiment seed: every (cell, replication) pair derives its own random
substream, so a parallel run reduces to exactly the same table as a serial
one.
"""

from __future__ import annotations

import csv
import json
import math
import time
import warnings
from concurrent.futures import FIRST_COMPLETED, ProcessPoolExecutor, wait
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from ._rng import mix64
from .estimators import METHODS, SharedFits
from .sims import BetaModel, SimulationDesign, draw

TABLE_COLUMNS = ("design", "method", "rmse", "bias", "sd", "coverage",
                 "mean_ci_width", "n_fail", "n_reps")


@dataclass(frozen=True)
class ExperimentSpec:
    """A benchmark to run: designs x methods x replications."""

    designs: tuple[SimulationDesign, ...]
    methods: tuple[str, ...]
    replications: int
    level: float = 0.95
    seed: int = 0

    def __post_init__(self) -> None:
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if not self.methods:
            raise ValueError("methods must be nonempty")
        unknown = [m for m in self.methods if m not in METHODS]
        if unknown:
            raise ValueError(f"unknown methods {unknown}; choose from {sorted(METHODS)}")
        object.__setattr__(self, "designs", tuple(self.designs))
        object.__setattr__(self, "methods", tuple(self.methods))


@dataclass
class ResultsRow:
    design: str
    method: str
    rmse: float
    bias: float
    sd: float
    coverage: float
    mean_ci_width: float
    n_fail: int
    n_reps: int


@dataclass
class ResultsTable:
    rows: list[ResultsRow] = field(default_factory=list)
    complete: bool = True

    def cell(self, design: str, method: str) -> ResultsRow:
        for row in self.rows:
            if row.design == design and row.method == method:
                return row
        raise KeyError((design, method))


def _run_one(design: SimulationDesign, methods: tuple[str, ...], level: float,
             seed: int, cell: int, rep: int) -> list[tuple[str, float, float, float, float, bool]]:
    """One replication of one cell; returns per-method records."""
    out = []
    try:
        sim = draw(replace(design, seed=mix64(seed, cell)), rep)
    except Exception:
        return [(m, math.nan, math.nan, math.nan, math.nan, False) for m in methods]
    fits = SharedFits(sim.data, seed=mix64(seed, cell, rep))
    for m in methods:
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                rpt = METHODS[m](sim.data, level=level, fits=fits)
            out.append((m, rpt.tau_hat, sim.tau_true, rpt.ci_lo, rpt.ci_hi, True))
        except KeyboardInterrupt:
            raise
        except Exception:
            out.append((m, math.nan, sim.tau_true, math.nan, math.nan, False))
    return out


def run_experiment(spec: ExperimentSpec, jobs: int = 1, max_seconds: float | None = None,
                   progress: bool = False) -> ResultsTable:
    """Execute the experiment and aggregate per (design, method) cell.

    ``jobs > 1`` fans replications over a process pool; the aggregation is an
    ordered reduction over replication indices, so the table is bitwise
    identical to a serial run.  ``max_seconds`` aborts cleanly: finished
    replications are aggregated and the table is marked incomplete.
    """
    t0 = time.monotonic()
    tasks = [(ci, r) for ci in range(len(spec.designs)) for r in range(spec.replications)]
    results: dict[tuple[int, int], list] = {}
    timed_out = False

    if jobs <= 1:
        for ci, r in tasks:
            if max_seconds is not None and time.monotonic() - t0 > max_seconds:
                timed_out = True
                break
            results[(ci, r)] = _run_one(spec.designs[ci], spec.methods, spec.level,
                                        spec.seed, ci, r)
            if progress:
                print(f"\rcell {ci} rep {r}", end="", flush=True)
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = {
                pool.submit(_run_one, spec.designs[ci], spec.methods, spec.level,
                            spec.seed, ci, r): (ci, r)
                for ci, r in tasks
            }
            pending = set(futures)
            while pending:
                budget = None
                if max_seconds is not None:
                    budget = max(0.0, max_seconds - (time.monotonic() - t0))
                done, pending = wait(pending, timeout=budget, return_when=FIRST_COMPLETED)
                for fut in done:
                    results[futures[fut]] = fut.result()
                if max_seconds is not None and time.monotonic() - t0 > max_seconds and pending:
                    for fut in pending:
                        fut.cancel()
                    timed_out = True
                    break
    if progress:
        print()

    table = ResultsTable(complete=not timed_out)
    for ci, design in enumerate(spec.designs):
        per_method: dict[str, list] = {m: [] for m in spec.methods}
        n_done = 0
        for r in range(spec.replications):
            rec = results.get((ci, r))
            if rec is None:
                continue
            n_done += 1
            for m, tau_hat, tau_true, lo, hi, ok in rec:
                per_method[m].append((tau_hat, tau_true, lo, hi, ok))
        for m in spec.methods:
            recs = per_method[m]
            ok = [(th, tt, lo, hi) for th, tt, lo, hi, good in recs if good]
            n_fail = len(recs) - len(ok)
            if ok:
                err = np.array([th - tt for th, tt, _, _ in ok])
                bias = float(err.mean())
                sd = float(err.std(ddof=0))
                rmse = float(np.sqrt(np.mean(err ** 2)))
                cover = float(np.mean([lo <= tt <= hi for _, tt, lo, hi in ok]))
                width = float(np.mean([hi - lo for _, _, lo, hi in ok]))
            else:
                bias = sd = rmse = cover = width = math.nan
            table.rows.append(ResultsRow(
                design=design.name, method=m, rmse=rmse, bias=bias, sd=sd,
                coverage=cover, mean_ci_width=width, n_fail=n_fail, n_reps=len(recs),
            ))
    return table


def emit_table(table: ResultsTable, path, fmt: str = "csv") -> None:
    """Write the results as ``csv`` or ``json`` (full precision) or as
    fixed-width ``text`` with errors rounded to three decimals."""
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(TABLE_COLUMNS)
            for row in table.rows:
                writer.writerow([
                    row.design, row.method,
                    *(format(v, ".17g") for v in (row.rmse, row.bias, row.sd,
                                                  row.coverage, row.mean_ci_width)),
                    row.n_fail, row.n_reps,
                ])
    elif fmt == "json":
        payload = {"complete": table.complete, "rows": [asdict(r) for r in table.rows]}
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True, allow_nan=True)
            fh.write("\n")
    elif fmt == "text":
        with open(path, "w") as fh:
            fh.write(f"{'design':40s} {'method':14s} {'rmse':>8s} {'bias':>8s} "
                     f"{'coverage':>9s} {'fails':>6s}\n")
            for row in table.rows:
                fh.write(f"{row.design:40s} {row.method:14s} {row.rmse:8.3f} "
                         f"{row.bias:8.3f} {row.coverage:9.3f} {row.n_fail:6d}\n")
    else:
        raise ValueError(f"unknown format {fmt!r}")


def read_table(path, fmt: str = "csv") -> ResultsTable:
    """Read a table previously written by :func:`emit_table`."""
    table = ResultsTable()
    if fmt == "csv":
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            for rec in reader:
                table.rows.append(ResultsRow(
                    design=rec["design"], method=rec["method"],
                    rmse=float(rec["rmse"]), bias=float(rec["bias"]), sd=float(rec["sd"]),
                    coverage=float(rec["coverage"]), mean_ci_width=float(rec["mean_ci_width"]),
                    n_fail=int(rec["n_fail"]), n_reps=int(rec["n_reps"]),
                ))
    elif fmt == "json":
        with open(path) as fh:
            payload = json.load(fh)
        table.complete = payload["complete"]
        for rec in payload["rows"]:
            table.rows.append(ResultsRow(**rec))
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return table


@dataclass
class Comparison:
    matched: list[dict] = field(default_factory=list)
    inversions: list[dict] = field(default_factory=list)
    hard_failures: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.hard_failures


def load_reference(path=None) -> dict:
    """Bundled full-scale benchmark results used for ordering comparisons."""
    if path is None:
        from importlib.resources import files
        path = files("resbal").joinpath("reference_tables.json")
        return json.loads(path.read_text())
    with open(path) as fh:
        return json.load(fh)


def compare_to_reference(table: ResultsTable, reference: dict,
                         hard_checks: list[dict] | None = None) -> Comparison:
    """Set our table against reference values cell by cell.

    For every (design, method) present on both sides the ratio is recorded;
    within each design, pairs of methods whose RMSE ordering disagrees with
    the reference are flagged as inversions.  ``hard_checks`` entries
    (``{"design", "method", "rmse", "tol"}``) turn selected cells into
    pass/fail assertions collected in ``hard_failures``.
    """
    ref_cells = {entry["name"]: entry["rmse"] for entry in reference.get("rmse", [])}
    comp = Comparison()
    by_design: dict[str, dict[str, float]] = {}
    for row in table.rows:
        ref = ref_cells.get(row.design, {}).get(row.method)
        if ref is None or math.isnan(row.rmse):
            continue
        by_design.setdefault(row.design, {})[row.method] = row.rmse
        comp.matched.append({
            "design": row.design, "method": row.method,
            "rmse": row.rmse, "reference": ref, "ratio": row.rmse / ref,
        })
    for design, ours in by_design.items():
        ref = ref_cells[design]
        methods = sorted(ours)
        for i, a in enumerate(methods):
            for b in methods[i + 1:]:
                if a in ref and b in ref:
                    if (ours[a] - ours[b]) * (ref[a] - ref[b]) < 0:
                        comp.inversions.append({
                            "design": design, "method_low": a, "method_high": b,
                            "ours": (ours[a], ours[b]), "reference": (ref[a], ref[b]),
                        })
    for check in hard_checks or []:
        try:
            row = table.cell(check["design"], check["method"])
        except KeyError:
            comp.hard_failures.append({**check, "observed": None, "reason": "cell missing"})
            continue
        target = float(check["rmse"])
        tol = float(check.get("tol", 0.05))
        if math.isnan(row.rmse) or abs(row.rmse - target) > tol:
            comp.hard_failures.append({**check, "observed": row.rmse,
                                       "reason": f"|rmse - {target}| > {tol}"})
    return comp


def design_from_dict(cfg: dict) -> SimulationDesign:
    """Build a design from a JSON-style mapping (the benchmark spec format)."""
    cfg = dict(cfg)
    beta = cfg.pop("beta", None)
    if beta is not None:
        beta = BetaModel(kind=beta["kind"], norm=float(beta.get("norm", 1.0)))
    allowed = {"kind", "n", "p", "seed", "delta_kind", "eta", "n_clusters",
               "rho", "beta_w_kind", "beta_w_norm", "name"}
    unknown = set(cfg) - allowed
    if unknown:
        raise ValueError(f"unknown design fields {sorted(unknown)}")
    return SimulationDesign(beta=beta, **cfg)


def spec_from_json(payload: dict) -> tuple[ExperimentSpec, list[dict]]:
    """Parse a benchmark spec mapping; returns the spec and any hard checks."""
    designs = tuple(design_from_dict(d) for d in payload["designs"])
    spec = ExperimentSpec(
        designs=designs,
        methods=tuple(payload["methods"]),
        replications=int(payload["replications"]),
        level=float(payload.get("level", 0.95)),
        seed=int(payload.get("seed", 0)),
    )
    return spec, list(payload.get("hard_checks", []))
