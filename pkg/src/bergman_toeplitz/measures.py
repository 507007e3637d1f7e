"""Measures used as Toeplitz symbols.

Three variants: :class:`Density` (bounded function times dA), :class:`Radial`
(profile of ``|z|^2``, optionally with a boundary weight ``(1-|z|^2)^beta``
or compact support) and :class:`Atomic` (finitely many point masses).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError, UsageError
from .quadrature import angles, gauss_jacobi_unit, gauss_legendre_unit

ATOM_RADIUS_MAX = 0.999
FAMILIES = ("constant", "bergman_weight", "power", "indicator")


@dataclass(frozen=True)
class Density:
    """``dmu = a(z) dA(z)`` for a bounded function ``a``.

    ``sup_bound`` is an upper bound for ``|a|`` on the disk (``None`` if the
    symbol is not known to be bounded).
    """

    func: Callable
    sup_bound: float | None = None
    positive: bool = False
    real: bool = False
    name: str = "density"
    descriptor: dict = field(default_factory=dict)

    radial = False

    def density_at(self, z):
        return np.asarray(self.func(np.asarray(z, dtype=np.complex128)), dtype=np.complex128)

    def rule(self, q):
        return q.nodes, q.weights * self.density_at(q.nodes)

    def variation(self):
        return Density(
            lambda z: np.abs(self.density_at(z)),
            self.sup_bound,
            positive=True,
            real=True,
            name=f"|{self.name}|",
        )

    def support_radius(self):
        return 1.0


@dataclass(frozen=True)
class Radial:
    """``dmu = profile(|z|^2) (1-|z|^2)^beta dA`` restricted to ``|z| <= support``.

    ``profile`` should be smooth on ``[0, support^2]``; the boundary factor is
    handled by Gauss-Jacobi nodes, the support by rescaled Gauss-Legendre.
    """

    profile: Callable
    beta: float = 0.0
    support: float = 1.0
    sup_bound: float | None = None
    positive: bool = False
    name: str = "radial"
    descriptor: dict = field(default_factory=dict)

    radial = True
    real = True

    def __post_init__(self):
        if not self.beta > -1.0:
            raise UsageError(f"boundary exponent must exceed -1, got {self.beta}")
        if not 0.0 < self.support <= 1.0:
            raise UsageError(f"support radius must lie in (0, 1], got {self.support}")
        if self.support < 1.0 and self.beta != 0.0:
            raise UsageError("boundary exponent requires full support")

    def profile_at(self, x):
        return np.asarray(self.profile(np.asarray(x, dtype=float)), dtype=np.complex128) * np.ones_like(x)

    def density_at(self, z):
        x = np.abs(np.asarray(z, dtype=np.complex128)) ** 2
        vals = self.profile_at(x) * np.maximum(1.0 - x, 0.0) ** self.beta
        if self.support < 1.0:
            vals = np.where(x <= self.support**2, vals, 0.0)
        return vals

    def radial_rule(self, M):
        """Nodes ``x`` and weights with ``int g(|z|^2) dmu = sum w g(x)``."""
        if self.support < 1.0:
            x, w = gauss_legendre_unit(M)
            s2 = self.support**2
            x, w = x * s2, w * s2
        else:
            x, w = gauss_jacobi_unit(M, float(self.beta))
        return x, w * self.profile_at(x)

    def rule(self, q):
        x, w = self.radial_rule(q.radial_order)
        L = q.angular_order
        th = angles(L)
        nodes = (np.sqrt(x)[:, None] * np.exp(1j * th)[None, :]).ravel()
        return nodes, np.repeat(w / L, L)

    def variation(self):
        return Radial(
            lambda x: np.abs(self.profile_at(x)),
            self.beta,
            self.support,
            self.sup_bound,
            positive=True,
            name=f"|{self.name}|",
        )

    def support_radius(self):
        return self.support


@dataclass(frozen=True)
class Atomic:
    """``mu = sum_i masses[i] delta_{points[i]}``."""

    points: np.ndarray
    masses: np.ndarray
    name: str = "atomic"
    descriptor: dict = field(default_factory=dict)

    radial = False
    sup_bound = None

    def __post_init__(self):
        pts = np.atleast_1d(np.array(self.points, dtype=np.complex128))
        ms = np.atleast_1d(np.array(self.masses, dtype=np.complex128))
        if pts.shape != ms.shape or pts.ndim != 1:
            raise UsageError("points and masses must be 1-D arrays of equal length")
        if not (np.all(np.isfinite(pts)) and np.all(np.isfinite(ms))):
            raise UsageError("atoms must be finite")
        if np.any(np.abs(pts) > ATOM_RADIUS_MAX):
            i = int(np.argmax(np.abs(pts)))
            raise DomainError(f"atom {i} at |v|={abs(pts[i])} exceeds {ATOM_RADIUS_MAX}")
        pts.setflags(write=False)
        ms.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "masses", ms)

    @property
    def positive(self):
        return bool(np.all(self.masses.imag == 0) and np.all(self.masses.real >= 0))

    @property
    def real(self):
        return bool(np.all(self.masses.imag == 0))

    def rule(self, q=None):
        return self.points, self.masses

    def variation(self):
        return Atomic(self.points, np.abs(self.masses), name=f"|{self.name}|")

    def total_variation(self):
        return float(np.sum(np.abs(self.masses)))

    def support_radius(self):
        return float(np.max(np.abs(self.points))) if self.points.size else 0.0


# closed-form families -------------------------------------------------------


def lebesgue():
    return constant(1.0)


def constant(c=1.0):
    c = float(c)
    return Radial(
        lambda x: c * np.ones_like(x),
        sup_bound=abs(c),
        positive=c >= 0,
        name="constant" if c != 1.0 else "lebesgue",
        descriptor={"variant": "density", "family": "constant", "value": c},
    )


def bergman_weight(beta, scale=1.0):
    """``scale * (1-|z|^2)^beta``."""
    beta, scale = float(beta), float(scale)
    if not beta > -1.0:
        raise UsageError(f"beta must exceed -1, got {beta}")
    return Radial(
        lambda x: scale * np.ones_like(x),
        beta=beta,
        sup_bound=abs(scale) if beta >= 0 else None,
        positive=scale >= 0,
        name=f"bergman_weight(beta={beta:g})",
        descriptor={"variant": "density", "family": "bergman_weight", "beta": beta, "scale": scale},
    )


def power(m, scale=1.0):
    """``scale * |z|^{2m}``."""
    if int(m) != m or m < 0:
        raise UsageError(f"power exponent must be a nonnegative integer, got {m}")
    m, scale = int(m), float(scale)
    return Radial(
        lambda x: scale * x**m,
        sup_bound=abs(scale),
        positive=scale >= 0,
        name=f"power(m={m})",
        descriptor={"variant": "density", "family": "power", "m": m, "scale": scale},
    )


def indicator(r, scale=1.0):
    """``scale`` times the indicator of ``|z| <= r``."""
    r, scale = float(r), float(scale)
    if not 0.0 < r < 1.0:
        raise UsageError(f"indicator radius must lie in (0, 1), got {r}")
    return Radial(
        lambda x: scale * np.ones_like(x),
        support=r,
        sup_bound=abs(scale),
        positive=scale >= 0,
        name=f"indicator(r={r:g})",
        descriptor={"variant": "density", "family": "indicator", "r": r, "scale": scale},
    )


def atoms(points, masses, name="atomic"):
    pts = np.atleast_1d(np.asarray(points, dtype=np.complex128))
    ms = np.atleast_1d(np.asarray(masses, dtype=np.complex128))
    desc = {
        "variant": "atomic",
        "atoms": [[float(p.real), float(p.imag), float(m.real), float(m.imag)] for p, m in zip(pts, ms)],
    }
    return Atomic(pts, ms, name=name, descriptor=desc)


def dirac(v=0.0, mass=1.0):
    return atoms([v], [mass], name=f"delta({complex(v):g})")


def function_density(func, sup_bound=None, positive=False, real=False, name="density"):
    return Density(func, sup_bound, positive, real, name, {"variant": "density", "family": name})


def describe(mu):
    return dict(mu.descriptor) if mu.descriptor else {"variant": type(mu).__name__.lower(), "name": mu.name}


# file format ----------------------------------------------------------------


def _field(spec, key, kind=float):
    if key not in spec:
        raise UsageError(f"measure file: missing field '{key}'")
    try:
        return kind(spec[key])
    except (TypeError, ValueError) as exc:
        raise UsageError(f"measure file: field '{key}' is not a valid {kind.__name__}") from exc


def measure_from_dict(spec):
    """Build a measure from the JSON descriptor used on the command line.

    ``{"variant": "density", "family": <name>, ...params}`` for the
    closed-form families, or ``{"variant": "atomic", "atoms": [[re, im,
    mass_re, mass_im], ...]}``.
    """
    if not isinstance(spec, dict):
        raise UsageError("measure file: top level must be an object")
    variant = spec.get("variant")
    if variant == "atomic":
        rows = spec.get("atoms")
        if not isinstance(rows, list) or not rows:
            raise UsageError("measure file: field 'atoms' must be a non-empty list of rows")
        pts, ms = [], []
        for i, row in enumerate(rows):
            if not isinstance(row, (list, tuple)) or len(row) != 4:
                raise UsageError(f"measure file: field 'atoms[{i}]' must have 4 numbers (re, im, mass_re, mass_im)")
            try:
                re, im, mre, mim = (float(v) for v in row)
            except (TypeError, ValueError) as exc:
                raise UsageError(f"measure file: field 'atoms[{i}]' has a non-numeric entry") from exc
            pts.append(complex(re, im))
            ms.append(complex(mre, mim))
        try:
            return atoms(pts, ms, name=str(spec.get("name", "atomic")))
        except DomainError as exc:
            raise UsageError(f"measure file: field 'atoms': {exc}") from exc
    if variant == "density":
        family = spec.get("family")
        scale = _field(spec, "scale") if "scale" in spec else 1.0
        if family == "constant":
            return constant(_field(spec, "value") if "value" in spec else scale)
        if family == "bergman_weight":
            beta = _field(spec, "beta")
            if not beta > -1.0:
                raise UsageError("measure file: field 'beta' must exceed -1")
            return bergman_weight(beta, scale)
        if family == "power":
            m = _field(spec, "m", int)
            if m < 0:
                raise UsageError("measure file: field 'm' must be nonnegative")
            return power(m, scale)
        if family == "indicator":
            r = _field(spec, "r")
            if not 0.0 < r < 1.0:
                raise UsageError("measure file: field 'r' must lie in (0, 1)")
            return indicator(r, scale)
        raise UsageError(f"measure file: field 'family' must be one of {', '.join(FAMILIES)}, got {family!r}")
    raise UsageError(f"measure file: field 'variant' must be 'density' or 'atomic', got {variant!r}")


def load_measure(path):
    try:
        with open(path, encoding="utf-8") as fh:
            spec = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read measure file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"measure file {path} is not valid JSON: {exc}") from exc
    return measure_from_dict(spec)
