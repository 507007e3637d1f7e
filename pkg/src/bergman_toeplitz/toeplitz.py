"""Assembly of the generalized Toeplitz operators ``T_mu^(k)``.

``T_mu^(k) = int U_z E_k U_z (1-|z|^2)^{-2} dmu(z)`` has entries

    <T e_q, e_p> = int h_p(z) conj(h_q(z)) dmu(z),

where ``h_p = <U_z e_k, e_p> / (1-|z|^2)`` is the fused kernel column.  The
invariant weight is absorbed by the two kernel factors, so nothing singular
is ever evaluated near the unit circle.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from math import comb

import numpy as np

from .core import TruncatedOperator, fused_kernel_column
from .errors import DomainError, PrecisionError, UsageError
from .measures import ATOM_RADIUS_MAX, Atomic, describe
from .quadrature import build_disk_quadrature

_CHUNK = 8192


@dataclass(frozen=True)
class ToeplitzRequest:
    mu: object
    k: int
    N: int
    quadrature: object = None

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 0:
            raise UsageError(f"k must be a nonnegative integer, got {self.k}")
        if self.N < self.k + 2:
            raise UsageError(f"need N >= k + 2, got N={self.N}, k={self.k}")


def _weighted_gram(nodes, weights, k, N):
    T = np.zeros((N, N), dtype=np.complex128)
    for start in range(0, nodes.size, _CHUNK):
        z = nodes[start:start + _CHUNK]
        w = weights[start:start + _CHUNK]
        H = fused_kernel_column(z, k, N)
        T += H.T @ (w[:, None] * H.conj())
    return T


def assemble_toeplitz(req, radial_shortcut=True):
    """Truncated matrix of ``T_mu^(k)``.

    Radial measures give diagonal operators; with ``radial_shortcut`` the
    diagonal is computed by a one-dimensional rule only.
    """
    mu, k, N = req.mu, req.k, req.N
    q = req.quadrature or build_disk_quadrature()
    if isinstance(mu, Atomic):
        if mu.points.size and np.max(np.abs(mu.points)) > ATOM_RADIUS_MAX:
            raise DomainError(f"atom outside |v| <= {ATOM_RADIUS_MAX}")
        H = fused_kernel_column(mu.points, k, N)
        return TruncatedOperator(H.T @ (mu.masses[:, None] * H.conj()))
    if mu.radial and radial_shortcut:
        x, w = mu.radial_rule(q.radial_order)
        H = fused_kernel_column(np.sqrt(x), k, N)
        return TruncatedOperator(np.diag(w @ np.abs(H) ** 2))
    nodes, weights = mu.rule(q)
    return TruncatedOperator(_weighted_gram(np.asarray(nodes), np.asarray(weights), k, N))


def toeplitz(mu, k, N, quadrature=None, radial_shortcut=True):
    return assemble_toeplitz(ToeplitzRequest(mu, k, N, quadrature), radial_shortcut)


def binomial_combination(mu, n, N, quadrature=None):
    """``(n+1) sum_j C(n,j) (-1)^j/(j+1) T_mu^(j)``."""
    out = np.zeros((N, N), dtype=np.complex128)
    for j in range(n + 1):
        c = (n + 1) * comb(n, j) * (-1) ** j / (j + 1)
        out += c * toeplitz(mu, j, N, quadrature).entries
    return TruncatedOperator(out)


def operator_norm(Q):
    """Largest singular value of the truncated matrix."""
    return float(np.linalg.norm(Q.entries, 2))


def eigen_extremes(Q, atol=1e-10):
    """(min, max) eigenvalue of a self-adjoint truncation."""
    A = Q.entries
    if np.max(np.abs(A - A.conj().T), initial=0.0) > atol * max(1.0, np.max(np.abs(A), initial=0.0)):
        raise UsageError("operator is not self-adjoint within tolerance")
    ev = np.linalg.eigvalsh((A + A.conj().T) / 2)
    return float(ev[0]), float(ev[-1])


def norm_report(mu, k, N, quadrature=None):
    """Truncated norm at N and 2N (truncation monotonicity is observable)."""
    a = operator_norm(toeplitz(mu, k, N, quadrature))
    b = operator_norm(toeplitz(mu, k, 2 * N, quadrature))
    return {"N": N, "norm_N": a, "norm_2N": b, "monotone": b >= a * (1 - 1e-12)}


def englis_bound_check(a, k, N=48, quadrature=None, tol=1e-8):
    """``(||T_a^(k)||, sup|a|)``; raises if the bound is violated."""
    if getattr(a, "sup_bound", None) is None or isinstance(a, Atomic):
        raise UsageError("bounded density symbol with a known sup bound required")
    norm = operator_norm(toeplitz(a, k, N, quadrature))
    bound = float(a.sup_bound)
    if norm > bound + tol:
        raise PrecisionError(f"norm {norm} exceeds sup bound {bound} (k={k}, N={N})")
    return norm, bound


# exports --------------------------------------------------------------------


def to_csv(Q):
    """Row-major ``re,im`` pairs, one matrix row per line."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in Q.entries:
        writer.writerow([f"{v:.17g}" for c in row for v in (c.real, c.imag)])
    return buf.getvalue()


def from_csv(text):
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    vals = np.array([[float(v) for v in r] for r in rows])
    return TruncatedOperator(vals[:, 0::2] + 1j * vals[:, 1::2])


def to_json(Q, k, mu):
    env = {
        "N": Q.N,
        "k": int(k),
        "measure": describe(mu),
        "entries": [[[float(c.real), float(c.imag)] for c in row] for row in Q.entries],
    }
    return json.dumps(env, sort_keys=True, indent=1)


def from_json(text):
    env = json.loads(text)
    arr = np.array(env["entries"], dtype=float)
    return TruncatedOperator(arr[..., 0] + 1j * arr[..., 1]), env
