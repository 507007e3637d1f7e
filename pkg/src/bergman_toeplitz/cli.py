"""Command-line entry point: ``bergman-toeplitz <subcommand> [options]``.

Exit status is 0 when every check passes, 1 when a check fails or a
precision guard trips, and 2 for usage or input errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
from pathlib import Path

import numpy as np

from . import berezin as bz
from . import carleson, experiments
from .core import CoeffVector, TruncatedOperator, rank_one
from .errors import DomainError, EvaluationError, PrecisionError, UsageError
from .identities import RunConfig, run_identities, summary
from .measures import atoms, load_measure
from .quadrature import ASSEMBLY_ORDERS, build_disk_quadrature
from .toeplitz import from_csv, to_csv, to_json, toeplitz

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
SLOPE_TOL = 0.05
RATIO_GROWTH = 10.0
SWEEP_SLACK = 1e-7


def default_atoms():
    return atoms([0.3, -0.2 + 0.5j, -0.4 - 0.3j], [1.0, 0.5, 0.25], name="three_atoms")


def _fmt(x):
    return f"{x:.17g}"


def emit(args, name, text):
    """Write ``text`` to ``<out>/<name>``, or to stdout without ``--out``."""
    if args.out is None:
        sys.stdout.write(text)
        return None
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    path.write_text(text, encoding="utf-8")
    return path


def dump_json(obj):
    return json.dumps(obj, sort_keys=True, indent=1, default=_json_default) + "\n"


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    raise TypeError(f"not serializable: {type(obj).__name__}")


def csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _quadrature(args):
    return build_disk_quadrature(args.quad_m, args.quad_l)


def _n_berezin(args, default=0):
    v = args.n_berezin
    if v is None:
        return default
    try:
        n = int(v)
    except ValueError as exc:
        raise UsageError(f"--n-berezin must be a nonnegative integer, got {v!r}") from exc
    if n < 0:
        raise UsageError(f"--n-berezin must be a nonnegative integer, got {v!r}")
    return n


def _need_measure(args):
    if args.measure is None:
        raise UsageError("--measure is required for this subcommand")
    return load_measure(args.measure)


def parse_operator(spec, N):
    """``E<k>``, ``e<p>xe<q>`` or a path to a CSV matrix."""
    m = re.fullmatch(r"E(\d+)", spec)
    if m:
        k = int(m.group(1))
        if k >= N:
            raise UsageError(f"--operator E{k} needs --n-trunc > {k}")
        return TruncatedOperator.projection(k, N)
    m = re.fullmatch(r"e(\d+)xe(\d+)", spec)
    if m:
        p, q = int(m.group(1)), int(m.group(2))
        if max(p, q) >= N:
            raise UsageError(f"--operator {spec} needs --n-trunc > {max(p, q)}")
        return rank_one(CoeffVector.basis(p, N), CoeffVector.basis(q, N))
    try:
        text = Path(spec).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"--operator: '{spec}' is neither E<k>, e<p>xe<q> nor a readable file") from exc
    try:
        return from_csv(text)
    except (ValueError, IndexError) as exc:
        raise UsageError(f"--operator: '{spec}' is not a valid matrix CSV") from exc


# subcommands -----------------------------------------------------------------------------


def cmd_verify_identities(args):
    cfg = RunConfig(
        N=args.n_trunc or 64,
        M=args.quad_m,
        L=args.quad_l,
        grid_rmax=args.grid_rmax if args.grid_rmax is not None else 0.9,
        seed=args.seed,
    )
    results = run_identities(cfg)
    for r in results:
        res = "-" if r.residual is None else f"{r.residual:.3e}"
        print(f"{r.status:16s} {r.name:26s} residual={res} tol={r.tolerance:.0e} [{r.anchor}]", file=sys.stderr)
    report = summary(cfg, results)
    emit(args, "identities.json", dump_json(report))
    return EXIT_OK if report["passed"] else EXIT_FAIL


def cmd_assemble(args):
    mu = _need_measure(args)
    N = args.n_trunc or 64
    T = toeplitz(mu, args.k, N, _quadrature(args))
    if args.format == "json":
        emit(args, f"toeplitz_k{args.k}_N{N}.json", to_json(T, args.k, mu) + "\n")
    else:
        emit(args, f"toeplitz_k{args.k}_N{N}.csv", to_csv(T))
    return EXIT_OK


def cmd_berezin_field(args):
    rmax = args.grid_rmax if args.grid_rmax is not None else bz.GRID_RMAX
    _, grid = bz.hyperbolic_grid(rmax, args.n_radii, args.n_angles)
    n = _n_berezin(args)
    if (args.operator is None) == (args.measure is None):
        raise UsageError("give exactly one of --operator and --measure")
    if args.operator is not None:
        N = args.n_trunc or 64
        field = bz.operator_field(parse_operator(args.operator, N), n, grid)
    else:
        mu = load_measure(args.measure)
        field = bz.measure_field(mu, n, grid, k=args.k)
    emit(args, f"berezin_field_n{n}.csv", field.to_csv())
    return EXIT_OK


def cmd_carleson_report(args):
    mu = _need_measure(args)
    rmax = args.grid_rmax if args.grid_rmax is not None else bz.GRID_RMAX
    rep = carleson.carleson_classify(mu, ks=range(args.k_max + 1), N=args.n_trunc or 48, rmax=rmax)
    emit(args, "carleson_report.json", rep.to_json() + "\n")
    return EXIT_OK


def _parse_j_list(text):
    try:
        js = [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"--j-list must be comma-separated integers, got {text!r}") from exc
    if not js or min(js) < 0:
        raise UsageError("--j-list must contain nonnegative integers")
    return sorted(set(js))


def cmd_counterexample5(args):
    N = args.n_trunc or experiments.GROWTH_N
    js = _parse_j_list(args.j_list)
    k = args.k if args.k is not None else 1
    if k < 1:
        raise UsageError("--k must be at least 1 for this experiment")
    n = None if args.n_berezin in (None, "auto") else _n_berezin(args)
    ells = list(range(1, max(3, k) + 1))
    growth = []
    for ell in ells:
        slope, _, _ = experiments.growth_slope(ell, experiments.GROWTH_J, max(N, experiments.GROWTH_J[1] + ell + 1))
        growth.append({"ell": ell, "slope": slope, "expected": 2 * ell, "pass": abs(slope - 2 * ell) <= SLOPE_TOL})
    table = experiments.counterexample_table(k, js, n, N)
    ratios = [row["ratio"] for row in table]
    ratio_growth = ratios[-1] / ratios[0]
    passed = all(g["pass"] for g in growth) and ratio_growth >= RATIO_GROWTH
    emit(args, "growth.csv", csv_text(["ell", "slope", "expected"], [[g["ell"], g["slope"], float(g["expected"])] for g in growth]))
    header = ["j", "n"] + [f"norm_dt{ell}" for ell in range(k + 1)] + ["ratio", "dist_to_Ej"]
    rows = [[r["j"], r["n"]] + r["norms"] + [r["ratio"], r["dist_to_Ej"]] for r in table]
    emit(args, "counterexample.csv", csv_text(header, rows))
    emit(args, "counterexample.json", dump_json({
        "k": k,
        "N": N,
        "growth": growth,
        "table": table,
        "ratio_growth": ratio_growth,
        "ratio_growth_threshold": RATIO_GROWTH,
        "passed": passed,
    }))
    return EXIT_OK if passed else EXIT_FAIL


def cmd_approximation(args):
    mu = load_measure(args.measure) if args.measure else default_atoms()
    k_max = args.k if args.k is not None else 2
    rmax = args.grid_rmax if args.grid_rmax is not None else bz.GRID_RMAX
    ns_sym = list(range(1, 51))
    sym = experiments.symbol_sweep(ns=ns_sym, rmax=rmax)
    ops = {}
    for k in range(k_max + 1):
        ops[k] = experiments.operator_sweep(mu, k, range(1, 21), args.n_trunc or 48, _quadrature(args))
    sym_ok = experiments.non_increasing(sym)
    ops_ok = {k: experiments.non_increasing(v, SWEEP_SLACK) for k, v in ops.items()}
    emit(args, "symbol_sweep.csv", csv_text(["n", "sup_error"], [[n, v] for n, v in zip(ns_sym, sym)]))
    emit(args, "operator_sweep.csv", csv_text(["k", "n", "norm_diff"], [[k, n, v] for k, vs in ops.items() for n, v in zip(range(1, 21), vs)]))
    passed = sym_ok and all(ops_ok.values())
    emit(args, "approximation.json", dump_json({
        "symbol": "|z|",
        "symbol_sweep_non_increasing": sym_ok,
        "measure": mu.descriptor,
        "operator_sweep_non_increasing": {str(k): v for k, v in ops_ok.items()},
        "passed": passed,
    }))
    return EXIT_OK if passed else EXIT_FAIL


# parser ------------------------------------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n-trunc", type=int, default=None, help="truncation order N")
    common.add_argument("--k", type=int, default=None, help="generalized Toeplitz index (max index for sweeps)")
    common.add_argument("--n-berezin", default=None, help="Berezin order n ('auto' allowed for counterexample5)")
    common.add_argument("--measure", default=None, help="JSON measure file")
    common.add_argument("--out", default=None, help="output directory (default: stdout)")
    common.add_argument("--seed", type=int, default=0, help="seed for the random test corpus")
    common.add_argument("--grid-rmax", type=float, default=None, help="outer radius of the evaluation grid")
    common.add_argument("--quad-m", type=int, default=ASSEMBLY_ORDERS[0], help="radial quadrature order")
    common.add_argument("--quad-l", type=int, default=ASSEMBLY_ORDERS[1], help="angular quadrature order")

    parser = argparse.ArgumentParser(prog="bergman-toeplitz", description="Generalized Toeplitz operators on the Bergman space.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-identities", parents=[common], help="run the identity checks")
    p.set_defaults(func=cmd_verify_identities)

    p = sub.add_parser("assemble", parents=[common], help="assemble T_mu^(k) and export it")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_assemble)

    p = sub.add_parser("berezin-field", parents=[common], help="Berezin transform on the hyperbolic grid")
    p.add_argument("--operator", default=None, help="E<k>, e<p>xe<q> or a matrix CSV")
    p.add_argument("--n-radii", type=int, default=40)
    p.add_argument("--n-angles", type=int, default=64)
    p.set_defaults(func=cmd_berezin_field)

    p = sub.add_parser("carleson-report", parents=[common], help="Carleson diagnostics and norm bounds")
    p.add_argument("--k-max", type=int, default=2)
    p.set_defaults(func=cmd_carleson_report)

    p = sub.add_parser("counterexample5", parents=[common], help="growth of the invariant Laplacian on E_j")
    p.add_argument("--j-list", default=",".join(str(j) for j in experiments.RATIO_JS))
    p.set_defaults(func=cmd_counterexample5)

    p = sub.add_parser("approximation", parents=[common], help="convergence sweeps of B_n")
    p.set_defaults(func=cmd_approximation)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.k is not None and args.k < 0:
        parser.error("--k must be nonnegative")
    if args.command != "counterexample5" and args.k is None:
        args.k = 0 if args.command != "approximation" else None
    try:
        return args.func(args)
    except (UsageError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PrecisionError, EvaluationError) as exc:
        print(f"precision error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
