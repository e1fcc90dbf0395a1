"""Command-line front end.

Subcommands: ``bounds`` (one model point), ``scan`` (sweeps over n),
``simulate`` (Monte Carlo of the optimal covariant measurement), ``verify``
(invariant and oracle suite).  Exit codes: 0 success, 2 validation error,
3 computation error.
"""

from __future__ import annotations

import argparse
import sys as _sys

import numpy as np

from . import __version__
from .cli_io import format_float, json_envelope, rows_to_csv
from .global_bounds import family_asymptotic_eta, family_r_max, global_report
from .local_bounds import ComputationError, bounds_report
from .simulate import SimConfig, average_fidelity, default_threads, fibonacci_sphere_grid, worst_case_scan
from .spin import SpinSystem
from .states import ParamPoint, WeightDistribution, custom_weights
from .sweep import CSV_COLUMNS, SweepSpec, make_weights, run_sweep
from .verify import VerifyContext, run_checks

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_COMPUTE = 3


def _add_family_args(p: argparse.ArgumentParser, require_n: bool = True):
    p.add_argument("--family", required=True, choices=["binomial", "geometric", "delta", "custom"])
    if require_n:
        p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, help="binomial success probability")
    p.add_argument("--r", type=float, help="geometric ratio")
    p.add_argument("--a", type=float, help="point-mass location on the m grid")
    p.add_argument("--weights", help="file with one nonnegative weight per line (custom family)")


def _add_output_args(p: argparse.ArgumentParser):
    p.add_argument("--format", choices=["csv", "json"], default="json")
    p.add_argument("--out", help="output path (default stdout)")


def _load_custom_weights(path: str, n: int) -> WeightDistribution:
    with open(path) as fh:
        values = [float(line.strip()) for line in fh if line.strip()]
    if len(values) != n + 1:
        raise ValueError(f"custom weights file must hold {n + 1} values, found {len(values)}")
    arr = np.asarray(values, dtype=float)
    if np.any(arr < 0):
        raise ValueError("custom weights must be nonnegative")
    total = arr.sum()
    if total <= 0:
        raise ValueError("custom weights must have a positive sum")
    if abs(total - 1.0) > 1e-9:
        print(f"warning: weights sum to {total!r}; normalizing", file=_sys.stderr)
    return custom_weights(SpinSystem(n), arr / total)


def _resolve_weights(args) -> WeightDistribution:
    if args.family == "custom":
        if not args.weights:
            raise ValueError("custom family requires --weights PATH")
        return _load_custom_weights(args.weights, args.n)
    param = {"binomial": args.p, "geometric": args.r, "delta": args.a}[args.family]
    if param is None:
        flag = {"binomial": "--p", "geometric": "--r", "delta": "--a"}[args.family]
        raise ValueError(f"family {args.family} requires {flag}")
    if args.family == "geometric" and args.r == 1.0:
        raise ValueError("r must differ from 1")
    return make_weights(args.family, args.n, param)


def _load_weight_matrix(path: str | None):
    if path is None:
        return None
    rows = []
    with open(path) as fh:
        for line in fh:
            if line.strip():
                rows.append([float(x) for x in line.split()])
    g = np.asarray(rows, dtype=float)
    if g.shape != (2, 2):
        raise ValueError(f"weight matrix must be 2x2, got shape {g.shape}")
    if np.max(np.abs(g - g.T)) > 1e-12 or np.linalg.eigvalsh(g).min() < -1e-12:
        raise ValueError("weight matrix must be symmetric positive semidefinite")
    return g


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        _sys.stdout.write(text)


def _matrix_payload(m) -> list | None:
    if m is None:
        return None
    arr = np.asarray(m)
    if np.iscomplexobj(arr) and np.max(np.abs(arr.imag)) > 0:
        return {"re": arr.real.tolist(), "im": arr.imag.tolist()}
    return np.real(arr).tolist()


def _cmd_bounds(args) -> int:
    w = _resolve_weights(args)
    g = _load_weight_matrix(args.weight_matrix)
    local = bounds_report(w, g)
    glob = global_report(w)
    payload = {
        "family": w.family,
        "params": w.params,
        "n": w.sys.n,
        "local": {
            "sld_bound": local.sld_bound,
            "sld_upper": local.sld_upper,
            "rld_bound": local.rld_bound,
            "rld_reason": local.rld_reason,
            "hn_upper": local.hn_upper,
            "hn_d_invariant": local.hn_d_invariant,
            "d_invariant": local.d_invariant,
            "d_residual": local.d_residual,
            "sld_fisher": _matrix_payload(local.fisher.sld),
            "rld_fisher": _matrix_payload(local.fisher.rld),
            "d_matrix": _matrix_payload(local.fisher.d_matrix),
            "weight_matrix": _matrix_payload(local.weight),
        },
        "global": {
            "condition_lhs": glob.condition_lhs,
            "condition_rhs": glob.condition_rhs,
            "condition_holds": glob.condition_holds,
            "r_max": glob.r_max,
            "eta": glob.eta,
            "closed_form_r": glob.closed_form_r,
            "asymptotic_eta": glob.asymptotic_eta,
        },
    }
    if args.format == "json":
        text = json_envelope("bounds", _echo_args(args), payload)
    else:
        scalars = {
            "n": w.sys.n,
            "family": w.family,
            "param": next(iter(w.params.values()), ""),
            "sld_bound": local.sld_bound,
            "sld_upper": local.sld_upper,
            "rld_bound": local.rld_bound,
            "hn_upper": local.hn_upper,
            "hn_d_invariant": local.hn_d_invariant,
            "d_invariant": local.d_invariant,
            "condition_lhs": glob.condition_lhs,
            "condition_rhs": glob.condition_rhs,
            "condition_holds": glob.condition_holds,
            "r_max": glob.r_max,
            "eta": glob.eta,
            "closed_form_r": glob.closed_form_r,
            "asymptotic_eta": glob.asymptotic_eta,
        }
        head = ",".join(scalars)
        vals = ",".join(_csv_cell(v) for v in scalars.values())
        text = head + "\n" + vals + "\n"
    _emit(text, args.out)
    return EXIT_OK


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format_float(v)
    return str(v)


def _parse_n_values(args) -> tuple:
    if args.n_list:
        vals = tuple(int(x) for x in args.n_list.split(","))
    else:
        if args.n_min is None or args.n_max is None:
            raise ValueError("scan requires --n-list or both --n-min and --n-max")
        if args.n_max < args.n_min:
            raise ValueError("empty n range")
        vals = tuple(range(args.n_min, args.n_max + 1, args.n_step))
    if not vals:
        raise ValueError("empty n range")
    return vals


def _cmd_scan(args) -> int:
    n_values = _parse_n_values(args)
    if args.family == "custom":
        raise ValueError("scan supports the parametric families only")
    param = {"binomial": args.p, "geometric": args.r, "delta": args.a}[args.family]
    if param is None:
        raise ValueError(f"family {args.family} requires its parameter flag")
    g = _load_weight_matrix(args.weight_matrix)
    spec = SweepSpec(args.family, param, n_values, tuple(map(tuple, g)) if g is not None else None)
    rows = run_sweep(spec, threads=args.threads)
    if args.format == "csv":
        text = rows_to_csv(rows)
    else:
        text = json_envelope(
            "scan",
            _echo_args(args),
            {"columns": CSV_COLUMNS, "rows": [
                {col: getattr(r, col) if col != "reasons" else list(r.reasons) for col in CSV_COLUMNS}
                for r in rows
            ]},
        )
    _emit(text, args.out)
    return EXIT_OK


def _cmd_simulate(args) -> int:
    w = _resolve_weights(args)
    if args.samples < 1:
        raise ValueError("samples must be at least 1")
    theta = ParamPoint(*(float(x) for x in args.theta.split(","))) if args.theta else ParamPoint(0.0, 0.0)
    cfg = SimConfig(w, theta, args.samples, args.seed)
    grid = None
    if args.grid:
        kind, _, num = args.grid.partition(":")
        if kind != "fibonacci" or not num.isdigit() or int(num) < 1:
            raise ValueError("grid must look like fibonacci:K with K >= 1")
        grid = fibonacci_sphere_grid(int(num))
    analytic = family_r_max(w)
    if grid is None:
        results = [average_fidelity(cfg, threads=args.threads)]
        thetas = [theta]
    else:
        results = worst_case_scan(cfg, grid, threads=args.threads)
        thetas = grid
    rows = [
        {
            "theta1": t.theta1,
            "theta2": t.theta2,
            "mean_fidelity": res.mean_fidelity,
            "std_error": res.std_error,
            "acceptance_rate": res.acceptance_rate,
            "samples_used": res.samples_used,
            "mean_bloch": list(res.mean_bloch),
        }
        for t, res in zip(thetas, results)
    ]
    payload = {
        "rows": rows,
        "min_mean_fidelity": min(r["mean_fidelity"] for r in rows),
        "analytic_r_max": analytic,
    }
    if args.format == "json":
        text = json_envelope("simulate", _echo_args(args), payload, seed=args.seed)
    else:
        cols = ["theta1", "theta2", "mean_fidelity", "std_error", "acceptance_rate", "samples_used"]
        lines = [",".join(cols)]
        for r in rows:
            lines.append(",".join(_csv_cell(r[c]) for c in cols))
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return EXIT_OK


def _cmd_verify(args) -> int:
    ctx = VerifyContext(max_n=args.max_n, samples=args.samples, seed=args.seed,
                        threads=args.threads or default_threads())
    results = run_checks(ctx)
    width = max(len(r.name) for r in results)
    failed = 0
    for r in results:
        mark = "PASS" if r.passed else "FAIL"
        if not r.passed:
            failed += 1
        print(f"[{mark}] {r.name:<{width}}  {r.detail}")
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else 1


def _echo_args(args) -> dict:
    skip = {"func"}
    return {k: v for k, v in vars(args).items() if k not in skip and v is not None}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spinj", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_bounds = sub.add_parser("bounds", help="local and global bounds at one model point")
    _add_family_args(p_bounds)
    p_bounds.add_argument("--weight-matrix", help="path to a 2x2 weight matrix file")
    _add_output_args(p_bounds)
    p_bounds.set_defaults(func=_cmd_bounds)

    p_scan = sub.add_parser("scan", help="sweep bounds over a grid of n")
    _add_family_args(p_scan, require_n=False)
    p_scan.add_argument("--n-min", type=int)
    p_scan.add_argument("--n-max", type=int)
    p_scan.add_argument("--n-step", type=int, default=1)
    p_scan.add_argument("--n-list", help="comma-separated n values, overrides the range flags")
    p_scan.add_argument("--weight-matrix")
    p_scan.add_argument("--threads", type=int, default=None)
    _add_output_args(p_scan)
    p_scan.set_defaults(func=_cmd_scan)

    p_sim = sub.add_parser("simulate", help="Monte Carlo of the optimal covariant measurement")
    _add_family_args(p_sim)
    p_sim.add_argument("--samples", type=int, required=True)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--theta", help="true parameter as 't1,t2' (default origin)")
    p_sim.add_argument("--grid", help="worst-case scan grid, e.g. fibonacci:12")
    p_sim.add_argument("--threads", type=int, default=None)
    _add_output_args(p_sim)
    p_sim.set_defaults(func=_cmd_simulate)

    p_verify = sub.add_parser("verify", help="run the invariant and oracle suite")
    p_verify.add_argument("--max-n", type=int, default=30)
    p_verify.add_argument("--samples", type=int, default=20000)
    p_verify.add_argument("--seed", type=int, default=20240801)
    p_verify.add_argument("--threads", type=int, default=None)
    p_verify.set_defaults(func=_cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_USAGE
    except ComputationError as exc:
        print(f"computation error [{exc.reason}]: {exc}", file=_sys.stderr)
        return EXIT_COMPUTE
    except Exception as exc:  # noqa: BLE001 - keep the exit-code contract
        print(f"computation error: {exc}", file=_sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    raise SystemExit(main())
