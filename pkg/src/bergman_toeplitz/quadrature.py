"""Tensor quadrature on the unit disk for the normalized area measure.

Nodes sit at Gauss-Legendre points in ``x = |z|^2`` times uniformly spaced
angles, so ``dA = dx dtheta / (2 pi)`` and radial polynomials in ``|z|^2``
integrate exactly.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi, roots_laguerre

from .errors import EvaluationError, UsageError

ASSEMBLY_ORDERS = (200, 256)
LAGUERRE_SWITCH = 20.0
FIELD_ORDERS = (64, 128)


@lru_cache(maxsize=64)
def gauss_legendre_unit(M):
    """Gauss-Legendre rule on [0, 1]: nodes and weights summing to 1."""
    t, w = np.polynomial.legendre.leggauss(M)
    return (t + 1.0) / 2.0, w / 2.0


@lru_cache(maxsize=64)
def gauss_jacobi_unit(M, beta):
    """Rule on [0, 1] for the weight ``(1 - x)^beta``.

    Weights are renormalized to the exact total ``1/(beta+1)`` so large
    exponents do not overflow.  From ``beta = 20`` on, the substitution
    ``x = 1 - exp(-u/(beta+1))`` with Gauss-Laguerre nodes in ``u`` is used
    instead; it stays accurate for exponents in the tens of thousands.
    """
    if beta == 0:
        return gauss_legendre_unit(M)
    if beta >= LAGUERRE_SWITCH:
        u, w = roots_laguerre(M)
        return -np.expm1(-u / (beta + 1.0)), w / (beta + 1.0)
    t, w = roots_jacobi(M, beta, 0.0)
    w = w / w.sum() / (beta + 1.0)
    return (t + 1.0) / 2.0, w


def angles(L):
    return 2.0 * np.pi * (np.arange(L) + 0.5) / L


@dataclass(frozen=True)
class DiskQuadrature:
    """Tensor rule for ``int_D f dA`` with ``A(D) = 1``."""

    nodes: np.ndarray
    weights: np.ndarray
    radial_order: int
    angular_order: int

    @property
    def size(self):
        return self.nodes.size

    def sum(self, values):
        """Weighted sum in fixed node order."""
        return complex(np.dot(self.weights, values))

    def scaled(self, center, radius):
        """Same rule pushed to the Euclidean disk ``|z - center| <= radius``.

        Weights then sum to ``radius**2`` (its normalized area).
        """
        return DiskQuadrature(
            center + radius * self.nodes,
            self.weights * radius**2,
            self.radial_order,
            self.angular_order,
        )


def build_disk_quadrature(M=ASSEMBLY_ORDERS[0], L=ASSEMBLY_ORDERS[1]):
    if M < 1 or L < 4:
        raise UsageError(f"need M >= 1 and L >= 4, got M={M}, L={L}")
    x, wx = gauss_legendre_unit(M)
    th = angles(L)
    nodes = (np.sqrt(x)[:, None] * np.exp(1j * th)[None, :]).ravel()
    weights = np.repeat(wx / L, L)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return DiskQuadrature(nodes, weights, M, L)


def checked_values(f, points):
    """Evaluate ``f`` on ``points``; raise naming the first non-finite node."""
    vals = np.asarray(f(points), dtype=np.complex128)
    vals = np.broadcast_to(vals, np.shape(points))
    bad = ~np.isfinite(vals)
    if np.any(bad):
        i = int(np.flatnonzero(bad.ravel())[0])
        z = np.ravel(points)[i]
        raise EvaluationError(f"integrand is not finite at node {i} (z = {z:.17g})")
    return vals


def integrate(q, mu, f):
    """``int f dmu`` using ``q`` (or the measure's own rule for radial/atomic)."""
    nodes, weights = mu.rule(q)
    vals = checked_values(f, nodes)
    return complex(np.dot(weights, vals))
