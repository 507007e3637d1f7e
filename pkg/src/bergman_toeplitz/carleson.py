"""Carleson diagnostics and two-sided norm bounds for ``T_mu^(k)``.

Everything here works on finite grids and truncations, so the report gives
evidence (grid sups, decay across shells) and never claims a proof.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .berezin import GRID_RMAX, berezin_toeplitz, hyperbolic_grid, transform_as_symbol
from .core import fused_kernel_column, mobius_eval, one_minus_sq
from .errors import PrecisionError, UsageError
from .measures import Atomic, describe
from .quadrature import FIELD_ORDERS, build_disk_quadrature
from .toeplitz import eigen_extremes, operator_norm, toeplitz

BOX_RADII = (0.1, 0.3, 0.5)
ANNULUS_R = 0.1
REFINE_TOL = 0.02
DECAY_FACTOR = 10.0
BOX_ORDERS = (24, 48)
BOUND_SLACK = 1e-3
LOWER_SLACK = 1e-9
SELF_CONVERGENCE_TOL = 1e-6


# pseudo-hyperbolic disks ---------------------------------------------------------


@dataclass(frozen=True)
class PseudoDisk:
    """``D(v, r) = {z : |phi_v(z)| <= r}``, a Euclidean disk."""

    v: complex
    r: float
    euclidean_center: complex
    euclidean_radius: float
    area: float

    def contains(self, z, rtol=1e-12):
        z = np.asarray(z, dtype=np.complex128)
        return np.abs(z - self.euclidean_center) <= self.euclidean_radius * (1 + rtol)

    def boundary(self, m=20):
        t = 2 * np.pi * np.arange(m) / m
        return self.euclidean_center + self.euclidean_radius * np.exp(1j * t)


def pseudo_disk(v, r):
    v = complex(v)
    if not abs(v) < 1.0:
        raise UsageError(f"center must lie in the open disk, got |v|={abs(v)}")
    if not 0.0 < r < 1.0:
        raise UsageError(f"radius must lie in (0, 1), got {r}")
    s = one_minus_sq(v)
    den = 1.0 - abs(v) ** 2 * r**2
    rad = r * s / den
    D = PseudoDisk(v, float(r), (1 - r**2) * v / den, rad, rad**2)
    err = np.max(np.abs(np.abs(mobius_eval(v, D.boundary())) - r))
    if err > 1e-12:
        raise PrecisionError(f"pseudo-disk boundary check failed by {err:.3g}")
    return D


def _disk_mass(mu, D, weight, q):
    """``int_D weight dmu`` with a rule mapped onto the Euclidean disk."""
    if isinstance(mu, Atomic):
        inside = D.contains(mu.points)
        return float(np.real(np.sum(mu.masses[inside] * weight(mu.points[inside]))))
    sq = q.scaled(D.euclidean_center, D.euclidean_radius)
    return float(np.real(np.dot(sq.weights, mu.density_at(sq.nodes) * weight(sq.nodes))))


def _box_rule(q):
    return q or build_disk_quadrature(*BOX_ORDERS)


def mu_disk(mu, v, r, quadrature=None):
    """``mu(D(v, r))``."""
    return _disk_mass(mu, pseudo_disk(v, r), lambda z: np.ones(np.shape(z)), _box_rule(quadrature))


def mu_tilde_disk(mu, v, r, quadrature=None):
    """``int_{D(v,r)} (1-|z|^2)^{-2} dmu``."""
    return _disk_mass(mu, pseudo_disk(v, r), lambda z: one_minus_sq(z) ** -2.0, _box_rule(quadrature))


def sandwich_constants(r):
    """Constants ``(lo, hi)`` with ``lo * mu(D)/|D| <= mu_tilde(D) <= hi * mu(D)/|D|``."""
    return (r * (1 - r**2) / 4) ** 2, (4 * r / (1 - r**2) ** 2) ** 2


def box_kernel_sup(mu, r, grid, quadrature=None):
    """``max_v mu(D(v,r)) / |D(v,r)|`` over the centers in ``grid``."""
    q = _box_rule(quadrature)
    best = 0.0
    for v in np.ravel(grid):
        D = pseudo_disk(v, r)
        best = max(best, _disk_mass(mu, D, lambda z: np.ones(np.shape(z)), q) / D.area)
    return best


def mu_tilde_sup(mu, r, grid, quadrature=None):
    q = _box_rule(quadrature)
    return max(mu_tilde_disk(mu, v, r, q) for v in np.ravel(grid))


# sup of B_0 on the hyperbolic grid ---------------------------------------------------


def sup_points(mu, rmax=GRID_RMAX, n_radii=40, n_angles=64):
    """Hyperbolic grid, plus the atoms themselves for atomic measures."""
    _, grid = hyperbolic_grid(rmax, n_radii, n_angles)
    pts = grid.ravel()
    if isinstance(mu, Atomic):
        pts = np.concatenate([pts, mu.points])
    return grid, pts


def b0_field(mu, k=0, rmax=GRID_RMAX, n_radii=40, n_angles=64, quadrature=None):
    """``(grid, shell sups, global sup)`` of ``|B_0(T_mu^(k))|``."""
    grid, pts = sup_points(mu, rmax, n_radii, n_angles)
    vals = np.abs(berezin_toeplitz(mu, k, 0, pts, quadrature))
    shells = np.max(vals[: grid.size].reshape(grid.shape), axis=1)
    return grid, shells, float(np.max(vals))


def b0_sup(mu, k=0, rmax=GRID_RMAX, quadrature=None):
    return b0_field(mu, k, rmax, quadrature=quadrature)[2]


# norm bounds ---------------------------------------------------------------------------


def _check_positive(mu):
    if not getattr(mu, "positive", False):
        raise UsageError(f"measure {mu.name!r} is not flagged positive")


def norm_bounds(mu, k, N, b0=None, quadrature=None, rmax=GRID_RMAX):
    """``(lower_diag, norm_trunc, upper)`` for ``||T_mu^(k)||``.

    ``lower_diag`` is the grid sup of ``B_0(T_mu^(k))``, which never exceeds
    the norm; ``upper = 4(k+2) sup|B_0(mu)|``.  The assembled norm is checked
    against a rule of half the order.
    """
    _check_positive(mu)
    q = quadrature or build_disk_quadrature()
    T = toeplitz(mu, k, N, q)
    norm = operator_norm(T)
    if not isinstance(mu, Atomic):
        half = build_disk_quadrature(max(q.radial_order // 2, 1), max(q.angular_order // 2, 4))
        coarse = operator_norm(toeplitz(mu, k, N, half))
        if abs(coarse - norm) > SELF_CONVERGENCE_TOL * max(norm, 1.0):
            raise PrecisionError(f"assembled norm not self-convergent: {norm} vs {coarse} on the halved rule")
    lower = b0_sup(mu, k, rmax)
    b0 = b0_sup(mu, 0, rmax) if b0 is None else b0
    upper = 4 * (k + 2) * b0
    if lower > norm * (1 + LOWER_SLACK) + LOWER_SLACK:
        raise PrecisionError(f"lower bound {lower} exceeds truncated norm {norm} (k={k})")
    if norm > upper * (1 + BOUND_SLACK):
        raise PrecisionError(f"truncated norm {norm} exceeds upper bound {upper} (k={k})")
    return lower, norm, upper


def domination_gap(mu, k, N, quadrature=None):
    """Smallest eigenvalue of ``4(k+2) T^(k)_{B_0(mu)} - T^(k)_mu``."""
    _check_positive(mu)
    q = quadrature or build_disk_quadrature()
    b0 = transform_as_symbol(mu, 0, 0)
    A = 4 * (k + 2) * toeplitz(b0, k, N, q) - toeplitz(mu, k, N, q)
    return eigen_extremes(A, atol=1e-8)[0]


def c_k_quadrature(k, quadrature=None):
    """``int |<e_k, U_z e_k>|^2 dA`` by disk quadrature."""
    q = quadrature or build_disk_quadrature()
    h = fused_kernel_column(q.nodes, k, k + 1)[:, k]
    return float(np.real(q.sum(np.abs(one_minus_sq(q.nodes) * h) ** 2)))


def c_k_closed_form(k):
    return (k + 1) / ((2 * k + 3) * (2 * k + 1))


def annulus_constant_check(k_max, r=ANNULUS_R):
    """``(c1_estimate, r_check)`` for the annulus argument at radius ``r``.

    ``c1_estimate`` is the min over ``1 <= k <= k_max`` of ``(k+2)`` times the
    minimum of ``(k+1) x^k (1-x)^2`` on ``[(k-1/2)/(k+2), (k+1)/(k+2)]``; the
    function is unimodal with its peak at ``k/(k+2)``, so the minimum sits at
    an endpoint.  ``r_check`` asks that ``r`` satisfies both cleared
    inequalities and that ``D(z_k, r)`` lies in the annulus, for every k.
    """
    if k_max < 1:
        raise UsageError(f"k_max must be at least 1, got {k_max}")
    k = np.arange(1, k_max + 1, dtype=float)
    lo, hi = (k - 0.5) / (k + 2), (k + 1) / (k + 2)

    def f(x):
        return np.exp(np.log(k + 1) + k * np.log(x) + 2 * np.log1p(-x))

    c1 = float(np.min((k + 2) * np.minimum(f(lo), f(hi))))
    zk, a, b = np.sqrt(k / (k + 2)), np.sqrt(lo), np.sqrt(hi)
    r1 = (zk - a) / (1 - zk * a)
    r2 = (b - zk) / (1 - zk * b)
    cleared = bool(np.all(r <= r1) and np.all(r <= r2))
    inner = (zk - r) / (1 - r * zk)
    outer = (zk + r) / (1 + r * zk)
    inside = True
    for z0, i0, o0, a0, b0 in zip(zk, inner, outer, a, b):
        D = pseudo_disk(z0, r)
        near, far = abs(D.euclidean_center) - D.euclidean_radius, abs(D.euclidean_center) + D.euclidean_radius
        inside &= bool(a0 <= i0 * (1 + 1e-12) and o0 <= b0 * (1 + 1e-12))
        inside &= bool(abs(near - i0) < 1e-12 and abs(far - o0) < 1e-12)
    return c1, cleared and inside


# the report ------------------------------------------------------------------------------


@dataclass
class CarlesonReport:
    measure: dict
    b0_sup: float
    box_sup: dict
    mu_tilde_sup: float
    classification: str
    bounds_per_k: list = field(default_factory=list)
    b0_refined: float = float("nan")
    outer_shells: list = field(default_factory=list)

    def to_dict(self):
        return {
            "measure": self.measure,
            "b0_sup": self.b0_sup,
            "b0_sup_refined": self.b0_refined,
            "outer_shell_sups": self.outer_shells,
            "box_sup": {f"{r:g}": v for r, v in self.box_sup.items()},
            "mu_tilde_sup": self.mu_tilde_sup,
            "classification": self.classification,
            "bounds": [{"k": k, "lower_diag": lo, "norm_trunc": nt, "upper": up} for k, lo, nt, up in self.bounds_per_k],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=1)


def classify(shells, sup, refined_sup):
    if not np.isfinite(refined_sup) or abs(refined_sup - sup) > REFINE_TOL * max(refined_sup, 1e-300):
        return "inconclusive"
    outer = shells[-3:]
    decays = bool(np.all(np.diff(outer) < 0)) and outer[-1] * DECAY_FACTOR <= np.max(shells)
    return "vanishing_carleson_evidence" if decays else "carleson"


def carleson_classify(mu, ks=(0, 1, 2), N=48, rmax=GRID_RMAX, box_radii=BOX_RADII, n_radii=40, n_angles=64):
    """Grid diagnostics for a positive measure.

    ``b0_sup`` must agree with a twice finer grid (and doubled field rule) to
    within 2%; vanishing evidence needs strictly decreasing sups over the three
    outermost shells with the last one at least 10x below the global sup.
    """
    _check_positive(mu)
    _, shells, sup = b0_field(mu, 0, rmax, n_radii, n_angles)
    fine_q = build_disk_quadrature(2 * FIELD_ORDERS[0], 2 * FIELD_ORDERS[1])
    _, fine_shells, fine_sup = b0_field(mu, 0, rmax, 2 * n_radii - 1, 2 * n_angles, fine_q)
    label = classify(fine_shells, sup, fine_sup)
    _, centers = sup_points(mu, rmax, n_radii // 2, n_angles // 2)
    box = {r: box_kernel_sup(mu, r, centers) for r in box_radii}
    tilde = mu_tilde_sup(mu, ANNULUS_R, centers)
    bounds = [(k,) + norm_bounds(mu, k, N, b0=sup, rmax=rmax) for k in ks]
    return CarlesonReport(describe(mu), sup, box, tilde, label, bounds, fine_sup, [float(s) for s in fine_shells[-3:]])
