"""Growth of the invariant Laplacian on ``E_j`` and the convergence sweeps.

The bad-behaviour experiment uses ``a_j = B_n(E_j)``.  Since ``E_j`` is the
generalized Toeplitz operator of ``delta_0`` with index ``j``,

    T_{B_n(E_j)} = T^(j)_{B_n(delta_0)},   B_n(delta_0) = (n+1)(1-|z|^2)^{n+2},

so ``T_{a_j}`` is diagonal with entries
``(n+1) int_0^1 (1-x)^{n+2} |h_p(sqrt x)|^2 dx``.  A Gauss rule with the
weight ``(1-x)^{n+2}`` keeps this accurate for ``n`` in the tens of thousands,
which is the regime where ``T_{a_j}`` is close to ``E_j``.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from .berezin import (
    BiPolynomial,
    berezin_symbol,
    delta_tilde_diag,
    delta_tilde_power_diag,
    hyperbolic_grid,
    transform_as_symbol,
)
from .core import TruncatedOperator, fused_kernel_column
from .errors import PrecisionError, UsageError
from .measures import Radial
from .quadrature import FIELD_ORDERS, build_disk_quadrature, gauss_jacobi_unit
from .toeplitz import operator_norm, toeplitz

GROWTH_N = 512
GROWTH_J = (32, 256)
RATIO_JS = (8, 16, 32, 64)
TRACE_TAIL_TOL = 1e-10
DIAG_ORDER = 200


def auto_n(j):
    """Default Berezin order for ``a_j``: ``4 (j+1)^2``."""
    return 4 * (j + 1) ** 2


# exact banded growth -------------------------------------------------------------


def growth_norms(ell, js, N=GROWTH_N):
    """``||delta_tilde^ell E_j||`` for each ``j`` (diagonal, so the max entry)."""
    return np.array([np.max(np.abs(delta_tilde_power_diag(j, ell, N))) for j in js])


def growth_slope(ell, j_range=GROWTH_J, N=GROWTH_N):
    """Least-squares slope of ``log ||delta_tilde^ell E_j||`` against ``log(j+1)``."""
    js = np.arange(j_range[0], j_range[1] + 1)
    norms = growth_norms(ell, js, N)
    return float(np.polyfit(np.log(js + 1.0), np.log(norms), 1)[0]), js, norms


# T_{B_n(E_j)} --------------------------------------------------------------------------


def t_bn_ej_diag(j, n, N, order=DIAG_ORDER, check_trace=True):
    """Diagonal of ``T_{B_n(E_j)}`` on indices ``< N``.

    The operator has trace 1, so ``1 - sum`` is the mass lost past N; a
    precision error is raised when it exceeds ``TRACE_TAIL_TOL``.
    """
    if j + 2 > N:
        raise PrecisionError(f"truncation N={N} too small for j={j}")
    x, w = gauss_jacobi_unit(order, float(n + 2))
    H = fused_kernel_column(np.sqrt(x), j, N)
    d = (n + 1) * (w @ np.abs(H) ** 2)
    tail = 1.0 - float(np.sum(d))
    if check_trace and abs(tail) > TRACE_TAIL_TOL:
        raise PrecisionError(f"T_(B_{n}(E_{j})) loses {tail:.3g} of its trace past N={N}")
    return d


def t_bn_ej_exact(j, n, N):
    """Same diagonal in exact rationals, from the bi-degree form of ``B_n(E_j)``.

    For a radial symbol ``sum_a c_a |z|^{2a}`` the Toeplitz diagonal is
    ``(p+1) sum_a c_a / (a+p+1)``.  Practical for small ``j`` and ``n`` only.
    """
    c = np.zeros((j + 1, j + 1), dtype=object)
    c[:] = Fraction(0)
    c[j, j] = Fraction(j + 1)
    B = BiPolynomial(c).times_weight().berezin_iterate(n)
    coeffs = [B.coeffs[a, a] for a in range(B.coeffs.shape[0])]
    return [(p + 1) * sum(ca / (a + p + 1) for a, ca in enumerate(coeffs)) for p in range(N)]


def counterexample_row(j, k=1, n=None, N=GROWTH_N):
    """One table row for ``a_j = B_n(E_j)``.

    The scale ``(j+1)^{-2k}`` of ``a_j`` cancels in the ratio, so it is not
    applied.  Entries of ``delta_tilde^ell`` are exact on indices
    ``< N - ell``; the trace check makes sure nothing sits near the edge.
    """
    if j + k + 2 > N:
        raise PrecisionError(f"need j + k + 2 <= N, got j={j}, k={k}, N={N}")
    n = auto_n(j) if n is None else int(n)
    d = t_bn_ej_diag(j, n, N)
    norms = []
    cur = d
    for ell in range(k + 1):
        norms.append(float(np.max(np.abs(cur[: N - ell]))))
        cur = delta_tilde_diag(cur)
    e = d.copy()
    e[j] -= 1.0
    return {
        "j": j,
        "n": n,
        "norms": norms,
        "ratio": norms[k] / sum(norms[:k]),
        "dist_to_Ej": float(np.max(np.abs(e))),
    }


def counterexample_table(k=1, js=RATIO_JS, n=None, N=GROWTH_N):
    if k < 1:
        raise UsageError("k must be at least 1")
    if max(js) + k + 2 > N:
        raise UsageError(f"need max(j) + k + 2 <= N, got {max(js)} + {k} + 2 > {N}")
    return [counterexample_row(j, k, n, N) for j in js]


# convergence sweeps ----------------------------------------------------------------------


def abs_symbol():
    return Radial(lambda x: np.sqrt(x), sup_bound=1.0, positive=True, name="|z|")


def symbol_sweep(a=None, ns=range(1, 51), rmax=0.995, n_radii=40, quadrature=None):
    """``max_grid |B_n(a) - a|`` for each ``n`` (default ``a = |z|``)."""
    a = a or abs_symbol()
    q = quadrature or build_disk_quadrature(*FIELD_ORDERS)
    _, grid = hyperbolic_grid(rmax, n_radii, 1 if a.radial else 64)
    exact = a.density_at(grid)
    return [float(np.max(np.abs(berezin_symbol(a, n, grid, q) - exact))) for n in ns]


def operator_sweep(mu, k, ns=range(1, 21), N=48, quadrature=None):
    """``||T_{B_n(T_mu^(k))} - T_mu^(k)||`` for each ``n``."""
    q = quadrature or build_disk_quadrature()
    T = toeplitz(mu, k, N, q)
    out = []
    for n in ns:
        S = toeplitz(transform_as_symbol(mu, k, n), 0, N, q)
        out.append(operator_norm(S - T))
    return out


def non_increasing(values, slack=0.0):
    v = np.asarray(values)
    return bool(np.all(np.diff(v) <= slack))


def diag_operator(d):
    return TruncatedOperator(np.diag(np.asarray(d, dtype=float)))
