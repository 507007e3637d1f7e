"""Bergman-space primitives on truncated monomial expansions.

Functions in the Bergman space A^2 of the unit disk (normalized area measure)
are carried by their first N Taylor coefficients.  Operators are N x N complex
matrices in the orthonormal basis ``e_k = sqrt(k+1) w**k``.

Notes
-----
Every column of the Mobius unitary ``U_z f = (f o phi_z) phi_z'`` is produced by
the recurrence in :mod:`bergman_toeplitz.kernels`; the factor ``1-|z|^2``
carried by ``phi_z'`` is kept separate ("fused" form) so that callers can
cancel it analytically against invariant-measure weights.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DomainError, UsageError

DEFAULT_N = 64
_DENOM_FLOOR = 1e-14


def one_minus_sq(z):
    """``1 - |z|^2`` computed as ``(1-|z|)(1+|z|)``."""
    r = np.abs(z)
    return (1.0 - r) * (1.0 + r)


def _as_coeffs(values):
    arr = np.array(values, dtype=np.complex128)
    if arr.ndim != 1 or arr.size == 0:
        raise UsageError("coefficient vector must be one-dimensional and non-empty")
    if not np.all(np.isfinite(arr)):
        raise UsageError("coefficient vector has non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class CoeffVector:
    """Polynomial ``sum_j coeffs[j] w**j`` truncated at order ``N = len(coeffs)``."""

    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _as_coeffs(self.coeffs))

    @property
    def N(self):
        return self.coeffs.size

    @classmethod
    def monomial(cls, j, N):
        c = np.zeros(N, dtype=np.complex128)
        c[j] = 1.0
        return cls(c)

    @classmethod
    def basis(cls, k, N):
        """The normalized basis vector ``e_k``."""
        c = np.zeros(N, dtype=np.complex128)
        c[k] = np.sqrt(k + 1.0)
        return cls(c)

    @classmethod
    def from_basis_coords(cls, coords):
        coords = np.asarray(coords, dtype=np.complex128)
        return cls(coords * np.sqrt(np.arange(coords.size) + 1.0))

    def basis_coords(self):
        """Coordinates ``<f, e_p>`` in the orthonormal basis."""
        return self.coeffs / np.sqrt(np.arange(self.N) + 1.0)

    def norm(self):
        return float(np.sqrt(np.sum(np.abs(self.coeffs) ** 2 / (np.arange(self.N) + 1.0))))

    def degree(self):
        nz = np.flatnonzero(self.coeffs)
        return int(nz[-1]) if nz.size else 0

    def __call__(self, w):
        return np.polynomial.polynomial.polyval(w, self.coeffs)

    def __add__(self, other):
        return CoeffVector(self.coeffs + other.coeffs)

    def __sub__(self, other):
        return CoeffVector(self.coeffs - other.coeffs)

    def __mul__(self, scalar):
        return CoeffVector(self.coeffs * scalar)

    __rmul__ = __mul__


def _as_matrix(entries):
    arr = np.array(entries, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise UsageError("operator matrix must be square and non-empty")
    if not np.all(np.isfinite(arr)):
        raise UsageError("operator matrix has non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class TruncatedOperator:
    """N x N matrix with entry ``(p, q) = <Q e_q, e_p>``."""

    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "entries", _as_matrix(self.entries))

    @property
    def N(self):
        return self.entries.shape[0]

    @classmethod
    def identity(cls, N):
        return cls(np.eye(N))

    @classmethod
    def projection(cls, k, N):
        """``E_k = e_k (x) e_k``."""
        m = np.zeros((N, N), dtype=np.complex128)
        m[k, k] = 1.0
        return cls(m)

    @classmethod
    def zeros(cls, N):
        return cls(np.zeros((N, N)))

    def adjoint(self):
        return TruncatedOperator(self.entries.conj().T)

    def apply(self, f):
        if f.N != self.N:
            raise UsageError(f"vector order {f.N} does not match operator order {self.N}")
        return CoeffVector.from_basis_coords(self.entries @ f.basis_coords())

    def leading(self, m):
        """Leading ``m x m`` block as a plain array."""
        return np.asarray(self.entries[:m, :m])

    def resized(self, N):
        """Zero-padded or cut copy of order ``N``."""
        out = np.zeros((N, N), dtype=np.complex128)
        m = min(N, self.N)
        out[:m, :m] = self.entries[:m, :m]
        return TruncatedOperator(out)

    def __matmul__(self, other):
        if isinstance(other, CoeffVector):
            return self.apply(other)
        return TruncatedOperator(self.entries @ other.entries)

    def __add__(self, other):
        return TruncatedOperator(self.entries + other.entries)

    def __sub__(self, other):
        return TruncatedOperator(self.entries - other.entries)

    def __mul__(self, scalar):
        return TruncatedOperator(self.entries * scalar)

    __rmul__ = __mul__

    def __neg__(self):
        return TruncatedOperator(-self.entries)


@dataclass(frozen=True)
class MobiusMap:
    """The disk involution ``phi_z(w) = (z - w) / (1 - conj(z) w)``."""

    z: complex

    def __post_init__(self):
        z = complex(self.z)
        if not abs(z) < 1.0:
            raise DomainError(f"Mobius parameter must lie in the open disk, got |z|={abs(z)}")
        object.__setattr__(self, "z", z)

    def __call__(self, w):
        return mobius_eval(self, w)


def mobius_eval(phi, w):
    z = phi.z if isinstance(phi, MobiusMap) else complex(phi)
    w = np.asarray(w, dtype=np.complex128)
    denom = 1.0 - np.conj(z) * w
    if np.any(np.abs(denom) < _DENOM_FLOOR):
        raise DomainError("degenerate Mobius denominator: |1 - conj(z) w| below machine floor")
    out = (z - w) / denom
    return out if out.ndim else complex(out)


def mobius_series(phi, N):
    """Truncated Taylor series of ``phi_z`` and ``phi_z'`` about 0."""
    if N < 1:
        raise UsageError("series order must be at least 1")
    z = phi.z
    zb = np.conj(z)
    n = np.arange(N)
    s = one_minus_sq(z)
    phi_c = np.zeros(N, dtype=np.complex128)
    phi_c[0] = z
    phi_c[1:] = -s * zb ** (n[1:] - 1)
    dphi_c = -s * (n + 1) * zb**n
    return CoeffVector(phi_c), CoeffVector(dphi_c)


def inner_product(f, g):
    if f.N != g.N:
        raise UsageError(f"truncation orders differ: {f.N} vs {g.N}")
    return complex(np.sum(f.coeffs * np.conj(g.coeffs) / (np.arange(f.N) + 1.0)))


def fused_kernel_column(z, k, N):
    """``<U_z e_k, e_p> / (1-|z|^2)`` for ``p < N``; shape ``(len(z), N)``.

    The entries are polynomials in ``z`` and ``conj(z)``, bounded on the closed
    disk, so integrands against ``(1-|z|^2)^{-2} dmu`` never see the weight.
    """
    z = np.atleast_1d(np.asarray(z, dtype=np.complex128)).ravel()
    p = np.arange(N)
    col = kernels.fused_column(z, k, N)
    return col * (np.sqrt(k + 1.0) / np.sqrt(p + 1.0))


def u_columns(z, ncols, N):
    """``<U_z e_j, e_p>`` for ``j < ncols``, ``p < N``; shape ``(len(z), N, ncols)``."""
    z = np.atleast_1d(np.asarray(z, dtype=np.complex128)).ravel()
    raw = kernels.fused_columns(z, ncols, N)
    scale = np.sqrt(np.arange(ncols) + 1.0)[:, None] / np.sqrt(np.arange(N) + 1.0)[None, :]
    cols = raw * scale[None] * one_minus_sq(z)[:, None, None]
    return np.transpose(cols, (0, 2, 1))


def u_matrix(z, N):
    """Compression ``P_N U_z P_N`` as a TruncatedOperator."""
    if not abs(z) < 1.0:
        raise DomainError(f"|z| must be < 1, got {abs(z)}")
    return TruncatedOperator(u_columns(complex(z), N, N)[0])


def u_transform(z, f):
    """Coefficients of ``(f o phi_z) phi_z'`` truncated to the order of ``f``."""
    if not abs(z) < 1.0:
        raise DomainError(f"|z| must be < 1, got {abs(z)}")
    N = f.N
    deg = f.degree() + 1
    raw = kernels.fused_columns(np.array([z]), deg, N)[0]
    coeffs = one_minus_sq(z) * (f.coeffs[:deg] @ raw)
    return CoeffVector(coeffs)


def u_transform_tail(z, f, max_factor=16):
    """Norm of the part of ``U_z f`` lost past the truncation.

    The lost coefficients are computed directly on a longer expansion, doubled
    until its last half is negligible.  Should that not happen by
    ``max_factor * N`` the remainder is bounded through unitarity,
    ``||f||^2 - ||P U_z f||^2``, which is only good to about ``sqrt(eps)``.
    """
    if not abs(z) < 1.0:
        raise DomainError(f"|z| must be < 1, got {abs(z)}")
    N = f.N
    deg = f.degree() + 1
    fn = f.norm()
    M = 2 * N
    while True:
        raw = kernels.fused_columns(np.array([z]), deg, M)[0]
        c = one_minus_sq(z) * (f.coeffs[:deg] @ raw)
        mass = np.abs(c) ** 2 / (np.arange(M) + 1.0)
        lost = float(np.sum(mass[N:]))
        if np.sum(mass[M // 2:]) <= (1e-17 * fn) ** 2 or M >= max_factor * N:
            break
        M *= 2
    if M >= max_factor * N:
        lost += max(fn**2 - float(np.sum(mass)), 0.0)
    return float(np.sqrt(lost))


def rank_one(f, g):
    """Matrix of ``(f (x) g) h = <h, g> f``."""
    if f.N != g.N:
        raise UsageError(f"truncation orders differ: {f.N} vs {g.N}")
    return TruncatedOperator(np.outer(f.basis_coords(), np.conj(g.basis_coords())))


def reproducing_kernel(z, N):
    if not abs(z) < 1.0:
        raise DomainError(f"|z| must be < 1, got {abs(z)}")
    j = np.arange(N)
    return CoeffVector((j + 1.0) * np.conj(z) ** j)


def operator_support(Q, atol=0.0):
    """Smallest m with Q supported on the leading m x m block."""
    nz = np.argwhere(np.abs(Q.entries) > atol)
    return int(nz.max()) + 1 if nz.size else 1
