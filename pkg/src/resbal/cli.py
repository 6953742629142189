"""Command-line entry point.

Subcommands:

* ``estimate``   one treatment-effect estimate from a CSV file
* ``weights``    balancing weights for a CSV file, exported as CSV
* ``simulate``   draw one synthetic dataset to CSV plus a truth sidecar
* ``benchmark``  run a Monte Carlo experiment described by a JSON spec

Exit codes: 0 success, 2 usage errors, 3 data errors, 4 numeric failures.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import replace

import numpy as np

from .bench import (compare_to_reference, emit_table, load_reference, run_experiment,
                    spec_from_json)
from .data import DataError, Dataset, load_csv, save_csv, split_by_arm, treated_mean_covariates
from .estimators import METHODS, EstimationError, FitPlan, SharedFits, estimate
from .sims import BetaModel, SimulationDesign, draw
from .weights import (BalanceInfeasibleError, BalanceProblem, solve_constraint,
                      solve_entropy, solve_lagrange, solve_stable)

USAGE_ERROR, DATA_ERROR, NUMERIC_ERROR = 2, 3, 4

_DESIGN_NAMES = {
    "two-cluster": "two_cluster",
    "many-cluster": "many_cluster",
    "sparse-two-stage": "sparse_two_stage",
    "moderately-sparse-two-stage": "moderately_sparse_two_stage",
    "misspecified": "misspecified",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="resbal",
        description="Treatment-effect estimation by balanced residual weighting, "
                    "with weighting and regression baselines, synthetic designs and "
                    "a Monte Carlo benchmark runner.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", help="estimate a treatment effect from a CSV file")
    est.add_argument("--input", required=True, help="input CSV with header row")
    est.add_argument("--treatment-col", default="w", help="treatment column name (default: w)")
    est.add_argument("--outcome-col", default="y", help="outcome column name (default: y)")
    est.add_argument("--method", default="arb", choices=sorted(METHODS),
                     help="estimator to run (default: arb)")
    est.add_argument("--zeta", type=float, default=0.5,
                     help="balance/variance trade-off in (0,1) for balancing methods")
    est.add_argument("--alpha", type=float, default=0.9,
                     help="elastic-net mixing weight for outcome models (default: 0.9)")
    est.add_argument("--prop-alpha", type=float, default=0.9,
                     help="elastic-net mixing weight for the propensity model")
    est.add_argument("--level", type=float, default=0.95, help="confidence level (default: 0.95)")
    est.add_argument("--trim", type=float, nargs=2, default=(0.05, 0.95),
                     metavar=("LO", "HI"), help="propensity trimming bounds")
    est.add_argument("--k-folds", type=int, default=10, help="cross-validation folds")
    est.add_argument("--seed", type=int, default=0, help="seed for fold assignment")
    est.add_argument("--ds-two-lasso", action="store_true",
                     help="double selection: drop the treated-arm outcome lasso")
    est.add_argument("--dump-weights", metavar="PATH",
                     help="also write (row_index, gamma) per control row as CSV")
    est.add_argument("--format", choices=("json", "csv"), default="json",
                     help="report format on stdout or --out (default: json)")
    est.add_argument("--out", help="write the report here instead of stdout")

    wts = sub.add_parser("weights", help="solve balancing weights for a CSV file")
    wts.add_argument("--input", required=True)
    wts.add_argument("--treatment-col", default="w")
    wts.add_argument("--outcome-col", default="y")
    wts.add_argument("--form", default="lagrange",
                     choices=("lagrange", "constraint", "stable", "entropy"))
    wts.add_argument("--zeta", type=float, default=0.5, help="lagrange form trade-off")
    wts.add_argument("--bound-scale", type=float, default=None, dest="K",
                     metavar="K", help="constraint form: bound scale K")
    wts.add_argument("--threshold", type=float, default=None,
                     help="stable form imbalance bound (default: smallest feasible)")
    wts.add_argument("--cap", type=float, default=None,
                     help="per-weight upper bound (default: n_c^(-2/3))")
    wts.add_argument("--no-simplex", action="store_true",
                     help="drop the sum-to-one and positivity constraints")
    wts.add_argument("--raw-scale", action="store_true",
                     help="balance raw covariates instead of standardized ones")
    wts.add_argument("--solver-tol", type=float, default=1e-7)
    wts.add_argument("--dump-weights", metavar="PATH", required=True,
                     help="output CSV of (row_index, gamma)")

    sim = sub.add_parser("simulate", help="draw one synthetic dataset")
    sim.add_argument("--design", required=True, choices=sorted(_DESIGN_NAMES))
    sim.add_argument("--n", type=int, required=True)
    sim.add_argument("--p", type=int, required=True)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--rep", type=int, default=0, help="replication index (default: 0)")
    sim.add_argument("--beta-kind", default="very_sparse",
                     help="coefficient pattern for designs that take one")
    sim.add_argument("--beta-norm", type=float, default=None,
                     help="signal size (defaults: 2 two-cluster, 3 many-cluster, 1 elsewhere)")
    sim.add_argument("--delta-kind", default="dense", choices=("dense", "sparse"),
                     help="two-cluster separation pattern")
    sim.add_argument("--eta", type=float, default=0.1, help="many-cluster treatment rate")
    sim.add_argument("--rho", type=float, default=0.5, help="two-stage designs: autocorrelation")
    sim.add_argument("--beta-w-kind", default="very_sparse", choices=("very_sparse", "dense"),
                     help="sparse two-stage assignment decay")
    sim.add_argument("--beta-w-norm", type=float, default=1.0)
    sim.add_argument("--out", required=True, help="output CSV; truth goes to OUT + '.json'")

    ben = sub.add_parser("benchmark", help="run a Monte Carlo experiment from a JSON spec")
    ben.add_argument("--spec", required=True, help="experiment spec JSON")
    ben.add_argument("--out", required=True, help="output table path")
    ben.add_argument("--format", choices=("csv", "json", "text"), default="csv")
    ben.add_argument("--jobs", type=int, default=int(os.environ.get("RESBAL_JOBS", "1")),
                     help="worker processes (default: $RESBAL_JOBS or 1)")
    ben.add_argument("--max-seconds", type=float, default=None,
                     help="abort cleanly after this long, keeping partial results")
    ben.add_argument("--compare", action="store_true",
                     help="compare against reference results and report inversions")
    ben.add_argument("--reference", default=None,
                     help="reference results JSON (default: bundled tables)")
    ben.add_argument("--progress", action="store_true")

    return parser


def _write_weight_csv(path: str, rows: np.ndarray, gamma: np.ndarray) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["row_index", "gamma"])
        for idx, g in zip(rows, gamma):
            writer.writerow([int(idx), format(g, ".17g")])


def _report_payload(rpt) -> dict:
    payload = {
        "method": rpt.method, "tau_hat": rpt.tau_hat, "mu_c_hat": rpt.mu_c_hat,
        "mu_t_hat": rpt.mu_t_hat, "var_hat": rpt.var_hat, "ci_lo": rpt.ci_lo,
        "ci_hi": rpt.ci_hi, "level": rpt.level,
        "diagnostics": {k: (float(v) if isinstance(v, (int, float, np.floating)) else v)
                        for k, v in rpt.diagnostics.items()},
    }
    return payload


def _emit_report(payload: dict, fmt: str, out: str | None) -> None:
    if fmt == "json":
        text = json.dumps(payload, indent=2, sort_keys=True, default=float) + "\n"
    else:
        cols = ["method", "tau_hat", "var_hat", "ci_lo", "ci_hi", "level",
                "mu_c_hat", "mu_t_hat"]
        lines = [",".join(cols)]
        lines.append(",".join(
            payload["method"] if c == "method" else format(payload[c], ".17g") for c in cols
        ))
        text = "\n".join(lines) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_estimate(args) -> int:
    data = load_csv(args.input, args.treatment_col, args.outcome_col)
    plan = FitPlan(alpha=args.alpha, k_folds=args.k_folds)
    prop_plan = FitPlan(alpha=args.prop_alpha, k_folds=args.k_folds)
    fits = SharedFits(data, outcome_plan=plan, propensity_plan=prop_plan,
                      trim=tuple(args.trim), seed=args.seed)
    kwargs = {}
    if args.method in ("arb", "arb-ate"):
        kwargs["zeta"] = args.zeta
    if args.method == "double-select" and args.ds_two_lasso:
        kwargs["two_lasso"] = True
    rpt = estimate(args.method, data, level=args.level, fits=fits, seed=args.seed, **kwargs)
    _emit_report(_report_payload(rpt), args.format, args.out)
    if args.dump_weights:
        if rpt.gamma is None:
            raise EstimationError(f"method {args.method!r} does not produce per-row weights")
        _write_weight_csv(args.dump_weights, rpt.gamma_rows, rpt.gamma)
    return 0


def _cmd_weights(args) -> int:
    data = load_csv(args.input, args.treatment_col, args.outcome_col)
    control, treated = split_by_arm(data)
    xi = treated_mean_covariates(treated).xi
    Xc = control.Xsub
    if not args.raw_scale:
        scale = data.X.std(axis=0)
        scale[scale == 0.0] = 1.0
        center = data.X.mean(axis=0)
        Xc = (Xc - center) / scale
        xi = (xi - center) / scale
    common = dict(box_upper=args.cap, simplex=not args.no_simplex,
                  solver_tol=args.solver_tol)
    if args.form == "lagrange":
        sol = solve_lagrange(BalanceProblem(Xc, xi, form="lagrange", zeta=args.zeta, **common))
    elif args.form == "constraint":
        if args.K is None:
            raise EstimationError("constraint form needs --bound-scale K")
        sol = solve_constraint(BalanceProblem(Xc, xi, form="constraint", K=args.K, **common))
    elif args.form == "stable":
        prob = BalanceProblem(Xc, xi, form="constraint", K=0.0,
                              box_upper=args.cap if args.cap is not None else 1.0,
                              simplex=not args.no_simplex, solver_tol=args.solver_tol)
        sol = solve_stable(prob, args.threshold)
    else:
        sol = solve_entropy(BalanceProblem(Xc, xi, form="constraint", K=0.0, **common))
    if sol.gamma is None:
        raise EstimationError(f"{args.form} weights infeasible for this dataset")
    _write_weight_csv(args.dump_weights, control.indices, sol.gamma)
    print(json.dumps({"form": args.form, "status": sol.status,
                      "sup_imbalance": sol.sup_imbalance, "sq_norm": sol.sq_norm,
                      "objective": sol.objective, "n_iter": sol.n_iter}, sort_keys=True))
    return 0


_DEFAULT_NORMS = {"two_cluster": 2.0, "many_cluster": 3.0}


def _cmd_simulate(args) -> int:
    kind = _DESIGN_NAMES[args.design]
    norm = args.beta_norm if args.beta_norm is not None else _DEFAULT_NORMS.get(kind, 1.0)
    beta = None
    if kind in ("two_cluster", "many_cluster", "moderately_sparse_two_stage"):
        beta = BetaModel(args.beta_kind, norm)
    elif kind == "sparse_two_stage":
        beta = BetaModel("inv_square", norm)
    design = SimulationDesign(
        kind=kind, n=args.n, p=args.p, seed=args.seed, beta=beta,
        delta_kind=args.delta_kind, eta=args.eta, rho=args.rho,
        beta_w_kind=args.beta_w_kind, beta_w_norm=args.beta_w_norm,
    )
    try:
        sim = draw(design, args.rep)
    except ValueError as exc:
        raise DataError(str(exc)) from exc
    save_csv(sim.data, args.out)
    sidecar = {
        "design": design.name, "kind": kind, "n": args.n, "p": args.p,
        "seed": args.seed, "rep": args.rep, "tau_true": sim.tau_true,
        "oracle_info": {k: (v.tolist() if isinstance(v, np.ndarray) else v)
                        for k, v in sim.oracle_info.items()},
    }
    with open(args.out + ".json", "w") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {args.out} (n={args.n}, p={args.p}, tau_true={sim.tau_true:.6g})")
    return 0


def _cmd_benchmark(args) -> int:
    with open(args.spec) as fh:
        payload = json.load(fh)
    spec, hard_checks = spec_from_json(payload)
    table = run_experiment(spec, jobs=args.jobs, max_seconds=args.max_seconds,
                           progress=args.progress)
    emit_table(table, args.out, args.format)
    if not table.complete:
        print("warning: time budget hit, table is incomplete", file=sys.stderr)
    rc = 0
    if args.compare or hard_checks:
        reference = load_reference(args.reference)
        comp = compare_to_reference(table, reference, hard_checks)
        if args.compare:
            print(json.dumps({"matched": comp.matched, "inversions": comp.inversions,
                              "hard_failures": comp.hard_failures},
                             indent=2, sort_keys=True, default=float))
        if not comp.ok:
            for failure in comp.hard_failures:
                print(f"hard check failed: {failure}", file=sys.stderr)
            rc = 1
    return rc


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "estimate":
            return _cmd_estimate(args)
        if args.command == "weights":
            return _cmd_weights(args)
        if args.command == "simulate":
            return _cmd_simulate(args)
        return _cmd_benchmark(args)
    except (DataError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DATA_ERROR
    except (EstimationError, BalanceInfeasibleError, np.linalg.LinAlgError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return NUMERIC_ERROR


if __name__ == "__main__":
    sys.exit(main())
