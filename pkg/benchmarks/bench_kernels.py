"""Time the compiled kernels against the numpy fallback.

Usage::

    python3 benchmarks/bench_kernels.py [--repeat 5] [--json out.json]

Each case is run on both backends; the table reports the best wall time of
``--repeat`` runs, the speedup, and the largest disagreement relative to the
column scale.  End-to-end Toeplitz assembly is timed in a subprocess per
backend so the selection at import is exercised as in normal use.
"""
import argparse
import json
import os
import subprocess
import sys
import timeit

import numpy as np

from bergman_toeplitz import _kernels_py, kernels

CASES = [
    ("fused_column", {"k": 0, "N": 64}),
    ("fused_column", {"k": 8, "N": 64}),
    ("fused_column", {"k": 32, "N": 128}),
    ("fused_columns", {"ncols": 8, "N": 48}),
    ("fused_columns", {"ncols": 48, "N": 48}),
    ("fused_columns", {"ncols": 64, "N": 128}),
]

ASSEMBLY = (
    "import time; from bergman_toeplitz import kernels, toeplitz, measures, quadrature;"
    "q = quadrature.build_disk_quadrature(200, 256); mu = measures.bergman_weight(0.5);"
    "t = time.perf_counter();"
    "[toeplitz.toeplitz(mu, k, {N}, q, radial_shortcut=False) for k in range(4)];"
    "print(kernels.BACKEND, time.perf_counter() - t)"
)


def points(m, seed=0):
    rng = np.random.default_rng(seed)
    r = 0.99 * np.sqrt(rng.uniform(0, 1, m))
    return r * np.exp(2j * np.pi * rng.uniform(0, 1, m))


def best_time(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def run_cases(n_points, repeat):
    compiled = kernels.get_backend("compiled")
    z = points(n_points)
    rows = []
    for name, kw in CASES:
        args = (z,) + tuple(kw.values())
        fast = getattr(compiled, name)
        slow = getattr(_kernels_py, name)
        a, b = fast(*args), slow(*args)
        scale = np.max(np.abs(b), axis=-1, keepdims=True)
        rows.append({
            "kernel": name,
            "params": kw,
            "points": n_points,
            "compiled_s": best_time(lambda: fast(*args), repeat),
            "python_s": best_time(lambda: slow(*args), repeat),
            "max_rel_diff": float(np.max(np.abs(a - b) / scale)),
        })
    return rows


def run_assembly(N):
    out = {}
    for label, env_extra in (("compiled", {}), ("python", {"BERGMAN_TOEPLITZ_PURE_PYTHON": "1"})):
        env = {k: v for k, v in os.environ.items() if k != "BERGMAN_TOEPLITZ_PURE_PYTHON"}
        env.update(env_extra)
        res = subprocess.run([sys.executable, "-c", ASSEMBLY.format(N=N)], env=env, capture_output=True, text=True, check=True)
        backend, seconds = res.stdout.split()
        out[label] = {"backend": backend, "seconds": float(seconds)}
    return out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=4096)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--assembly-n", type=int, default=32)
    ap.add_argument("--json", default=None, help="write results to this file")
    args = ap.parse_args(argv)

    if "compiled" not in kernels.available_backends():
        print("compiled kernels are not built; nothing to compare", file=sys.stderr)
        return 1

    rows = run_cases(args.points, args.repeat)
    print(f"{'kernel':14s} {'params':24s} {'compiled':>10s} {'python':>10s} {'speedup':>8s} {'max rel diff':>13s}")
    for r in rows:
        params = ",".join(f"{k}={v}" for k, v in r["params"].items())
        print(f"{r['kernel']:14s} {params:24s} {r['compiled_s']*1e3:8.2f}ms {r['python_s']*1e3:8.2f}ms "
              f"{r['python_s'] / r['compiled_s']:7.1f}x {r['max_rel_diff']:13.2e}")

    asm = run_assembly(args.assembly_n)
    ratio = asm["python"]["seconds"] / asm["compiled"]["seconds"]
    print(f"\nassembly of T^(k), k<4, N={args.assembly_n}, 200x256 rule: "
          f"compiled {asm['compiled']['seconds']:.2f}s, python {asm['python']['seconds']:.2f}s ({ratio:.1f}x)")

    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump({"kernels": rows, "assembly": asm}, fh, indent=1)
    return 0


if __name__ == "__main__":
    sys.exit(main())
