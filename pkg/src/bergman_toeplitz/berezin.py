"""n-Berezin transforms and the invariant Laplacian.

Operators enter as truncated matrices; symbols enter either as measures or as
:class:`BiPolynomial` objects (finite sums of ``z^a conj(z)^b``).  The
invariant Laplacian acts on operators through its exact action on rank-one
monomial operators, ``z^n (x) z^m``, which is banded.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np

from .core import TruncatedOperator, fused_kernel_column, mobius_eval, one_minus_sq, u_columns
from .errors import PrecisionError, UsageError
from .measures import Atomic, Density, Radial, function_density
from .quadrature import FIELD_ORDERS, angles, build_disk_quadrature, gauss_jacobi_unit, gauss_legendre_unit
from .toeplitz import toeplitz

GRID_RMAX = 0.995
# relative error budget for the alternating binomial sum in berezin_op
CANCELLATION_TOL = 1e-7
# radial transforms are evaluated at few radii, so a finer pullback rule is cheap
RADIAL_PULLBACK_ORDERS = (256, 512)
_CHUNK_PAIRS = 2_000_000


def binomial_weights(n):
    """``(n+1) C(n,j) (-1)^j / (j+1)`` for ``j = 0..n``."""
    return np.array([(n + 1) * comb(n, j) * (-1) ** j / (j + 1) for j in range(n + 1)])


# Berezin transform of matrices ----------------------------------------------


def berezin_op(Q, n, z, tail_tol=None):
    """``B_n(Q)(z)`` for a truncated operator.

    The matrix is read as the finite-rank operator ``P_N Q P_N``, for which
    the value is exact.  With ``tail_tol`` the columns ``U_z e_j`` must keep
    all but ``tail_tol`` of their mass inside the truncation (use this when
    the matrix stands for an operator that does not vanish past N).
    """
    if n < 0:
        raise UsageError(f"n must be nonnegative, got {n}")
    if 2 * n >= Q.N:
        raise PrecisionError(f"n={n} too large for truncation order N={Q.N} (need n < N/2)")
    if (2.0 ** (n + 1) - 1) * np.finfo(float).eps > CANCELLATION_TOL:
        raise PrecisionError(f"n={n}: binomial cancellation exceeds {CANCELLATION_TOL:g}")
    zs = np.asarray(z, dtype=np.complex128)
    flat = np.atleast_1d(zs).ravel()
    if np.any(np.abs(flat) >= 1.0):
        raise UsageError("evaluation points must lie in the open disk")
    c = binomial_weights(n)
    out = np.empty(flat.size, dtype=np.complex128)
    step = max(1, _CHUNK_PAIRS // (Q.N * (n + 1)))
    for s in range(0, flat.size, step):
        cols = u_columns(flat[s:s + step], n + 1, Q.N)
        if tail_tol is not None:
            tail = 1.0 - np.sum(np.abs(cols) ** 2, axis=1)
            if np.max(tail) > tail_tol:
                raise PrecisionError(f"truncation tail {np.max(tail):.3g} exceeds {tail_tol:g} (N={Q.N}, n={n})")
        QU = np.einsum("pq,zqj->zpj", Q.entries, cols)
        out[s:s + step] = np.einsum("zpj,zpj,j->z", cols.conj(), QU, c)
    return out.reshape(zs.shape) if zs.ndim else complex(out[0])


def b0_exact_bound(Q, n):
    """``(n+1) 2^n ||Q||``."""
    return (n + 1) * 2.0**n * float(np.linalg.norm(Q.entries, 2))


def _radial_delta_tilde(c):
    """``delta_tilde`` on ``sum c[a] t^a`` with ``t = |z|^2``: ``t^a -> a^2 t^{a-1} (1-t)^2``."""
    d = [a * a * c[a] for a in range(1, len(c))] or [0]
    out = [Fraction(0)] * (len(d) + 2)
    for i, v in enumerate(d):
        out[i] += v
        out[i + 1] -= 2 * v
        out[i + 2] += v
    return out


@lru_cache(maxsize=256)
def _radial_kernel_coeffs(n, k):
    """Exact coefficients of ``P`` in powers of ``t``.

    Runs ``B_m = B_{m-1} - delta_tilde B_{m-1} / (m(m+1))`` from
    ``B_0(E_k) = (k+1) t^k (1-t)^2`` in rationals, then divides by ``(1-t)^2``.
    """
    B = [Fraction(0)] * k + [Fraction(k + 1), Fraction(-2 * (k + 1)), Fraction(k + 1)]
    for m in range(1, n + 1):
        D = _radial_delta_tilde(B)
        w = Fraction(1, m * (m + 1))
        B = [(B[i] if i < len(B) else 0) - w * D[i] for i in range(len(D))]
    # synthetic division by (1 - t) twice
    for _ in range(2):
        q = [Fraction(0)] * (len(B) - 1)
        acc = Fraction(0)
        for i in range(len(B) - 1):
            acc += B[i]
            q[i] = acc
        B = q
    while len(B) > 1 and B[-1] == 0:
        B.pop()
    return tuple(B)


@lru_cache(maxsize=256)
def radial_kernel(n, k):
    """Polynomial ``P`` with ``B_n(E_k)(zeta) = (1-t)^2 P(t)``, ``t = |zeta|^2``.

    ``P`` has degree ``n + k``.  Its values at Chebyshev points are computed
    in exact arithmetic (the binomial sum defining ``B_n`` cancels badly in
    floating point once ``n`` passes about 20) and interpolated.
    """
    c = _radial_kernel_coeffs(n, k)
    deg = len(c) - 1
    t = (np.cos(np.pi * (np.arange(deg + 1) + 0.5) / (deg + 1)) + 1.0) / 2.0
    vals = []
    for x in t:
        fx = Fraction(float(x))
        acc = Fraction(0)
        for v in reversed(c):
            acc = acc * fx + v
        vals.append(float(acc))
    return np.polynomial.Chebyshev.fit(t, vals, deg, domain=[0.0, 1.0])


def berezin_projection(n, k, z):
    """``B_n(E_k)(z)``, a radial function."""
    t = np.abs(np.asarray(z)) ** 2
    return one_minus_sq(np.sqrt(t)) ** 2 * radial_kernel(n, k)(t)


# Berezin transforms of T_mu^(k) ----------------------------------------------


def _direct(mu, kern, w, q):
    """``int P(|phi_w(zeta)|^2) (1-|w|^2)^2 / |1 - conj(w) zeta|^4 dmu(zeta)``."""
    nodes, weights = mu.rule(q)
    nodes = np.asarray(nodes)
    weights = np.asarray(weights)
    out = np.empty(w.size, dtype=np.complex128)
    s2 = one_minus_sq(w) ** 2
    step = max(1, _CHUNK_PAIRS // max(nodes.size, 1))
    for s in range(0, w.size, step):
        ww = w[s:s + step, None]
        d = 1.0 - np.conj(ww) * nodes[None, :]
        t = np.abs((ww - nodes[None, :]) / d) ** 2
        vals = kern(t) / np.abs(d) ** 4
        out[s:s + step] = s2[s:s + step] * (vals @ weights)
    return out


def _pullback(mu, kern, w, M, L):
    """``int P(|zeta|^2) a(phi_w(zeta)) dA(zeta)`` for a density ``a``.

    A boundary factor ``(1-|.|^2)^beta`` of radial densities is split as
    ``(1-|w|^2)^beta (1-|zeta|^2)^beta |1 - conj(w) zeta|^{-2 beta}`` and the
    middle factor goes into a Gauss-Jacobi weight.
    """
    beta = float(mu.beta) if isinstance(mu, Radial) else 0.0
    x, wx = gauss_jacobi_unit(M, beta)
    th = angles(L)
    zeta = (np.sqrt(x)[:, None] * np.exp(1j * th)[None, :]).ravel()
    wts = np.repeat(wx * kern(x) / L, L)
    out = np.empty(w.size, dtype=np.complex128)
    step = max(1, _CHUNK_PAIRS // zeta.size)
    for s in range(0, w.size, step):
        ww = w[s:s + step, None]
        d = 1.0 - np.conj(ww) * zeta[None, :]
        img = (ww - zeta[None, :]) / d
        if isinstance(mu, Radial):
            vals = mu.profile_at(np.abs(img) ** 2)
            if beta:
                vals = vals * one_minus_sq(ww) ** beta / np.abs(d) ** (2 * beta)
        else:
            vals = mu.density_at(img)
        out[s:s + step] = vals @ wts
    return out


def berezin_toeplitz(mu, k, n, w, quadrature=None, method="auto"):
    """``B_n(T_mu^(k))(w)`` from the measure, without forming the operator.

    ``method`` is ``"direct"`` (integrate against ``mu`` with the invariant
    weight cancelled analytically), ``"pullback"`` (change variables
    ``zeta -> phi_w(zeta)``; densities only) or ``"auto"``: atoms and
    compactly supported measures go direct, full-support densities pull back.
    """
    ws = np.asarray(w, dtype=np.complex128)
    flat = np.atleast_1d(ws).ravel()
    if np.any(np.abs(flat) >= 1.0):
        raise UsageError("evaluation points must lie in the open disk")
    if method == "auto":
        method = "direct" if isinstance(mu, Atomic) or mu.support_radius() < 1.0 else "pullback"
    if method == "pullback" and isinstance(mu, Atomic):
        raise UsageError("pullback route needs a density")
    kern = radial_kernel(n, k)
    q = quadrature or build_disk_quadrature(*FIELD_ORDERS)
    if getattr(mu, "radial", False):
        r, inv = np.unique(np.abs(flat), return_inverse=True)
        pts = r.astype(np.complex128)
    else:
        pts, inv = flat, None
    if method == "direct":
        vals = _direct(mu, kern, pts, q)
    elif method == "pullback":
        vals = _pullback(mu, kern, pts, q.radial_order, q.angular_order)
    else:
        raise UsageError(f"unknown method {method!r}")
    if inv is not None:
        vals = vals[inv.ravel()]
    return vals.reshape(ws.shape) if ws.ndim else complex(vals[0])


def berezin_measure(mu, n, z, quadrature=None, method="auto"):
    """``B_n(mu)(z) = int (n+1) (1-|phi_z(zeta)|^2)^{n+2} (1-|zeta|^2)^{-2} dmu(zeta)``."""
    return berezin_toeplitz(mu, 0, n, z, quadrature, method)


def berezin_symbol(a, n, z, quadrature=None):
    """``B_n(a)(z) = int a(phi_z(zeta)) (n+1)(1-|zeta|^2)^n dA(zeta)`` for a density."""
    if isinstance(a, Atomic):
        raise UsageError("berezin_symbol needs a density symbol")
    return berezin_toeplitz(a, 0, n, z, quadrature, method="pullback")


def transform_as_symbol(mu, k, n, quadrature=None, name=None):
    """``B_n(T_mu^(k))`` packaged as a density measure (radial when ``mu`` is).

    For radial ``mu`` with boundary factor ``(1-|z|^2)^beta`` the transform
    carries the same factor, so it is split off again and handed to the
    Gauss-Jacobi rule of the result.
    """
    label = name or f"B_{n}(T^({k})[{mu.name}])"
    if getattr(mu, "radial", False):
        beta = float(mu.beta) if mu.support == 1.0 else 0.0
        if quadrature is None and mu.support == 1.0:
            quadrature = build_disk_quadrature(*RADIAL_PULLBACK_ORDERS)

        cache = {}

        def profile(x):
            x = np.asarray(x, dtype=float)
            key = x.tobytes()
            if key not in cache:
                vals = berezin_toeplitz(mu, k, n, np.sqrt(x).astype(np.complex128), quadrature)
                cache[key] = vals / (1.0 - x) ** beta if beta else vals
            return cache[key]

        return Radial(profile, beta=beta, positive=bool(getattr(mu, "positive", False)), name=label)
    return Density(
        lambda z: berezin_toeplitz(mu, k, n, z, quadrature),
        positive=bool(getattr(mu, "positive", False)),
        real=bool(getattr(mu, "real", False)),
        name=label,
    )


def operator_as_symbol(S, n, name=None):
    """``B_n(S)`` of a finite-rank matrix as a density measure."""
    N = max(S.N, 2 * n + 2)
    Sx = S.resized(N)
    return function_density(lambda z: berezin_op(Sx, n, z), name=name or f"B_{n}(S)")


# evaluation grids and fields --------------------------------------------------


def hyperbolic_grid(rmax=GRID_RMAX, n_radii=40, n_angles=64):
    """Radii ``tanh`` of a uniform grid in ``[0, atanh(rmax)]`` times uniform angles.

    Returns ``(radii, points)`` with ``points.shape == (n_radii, n_angles)``.
    """
    radii = np.tanh(np.linspace(0.0, np.arctanh(rmax), n_radii))
    th = 2.0 * np.pi * np.arange(n_angles) / n_angles
    return radii, radii[:, None] * np.exp(1j * th)[None, :]


@dataclass(frozen=True)
class BerezinField:
    grid: np.ndarray
    values: np.ndarray
    n: int

    def sup(self):
        return float(np.max(np.abs(self.values)))

    def shell_sup(self):
        """Max of ``|values|`` per radius row (grid from :func:`hyperbolic_grid`)."""
        return np.max(np.abs(self.values), axis=-1)

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["re_z", "im_z", "re_val", "im_val"])
        for z, v in zip(np.ravel(self.grid), np.ravel(self.values)):
            writer.writerow([f"{z.real:.17g}", f"{z.imag:.17g}", f"{v.real:.17g}", f"{v.imag:.17g}"])
        return buf.getvalue()


def operator_field(Q, n, grid, tail_tol=None):
    return BerezinField(grid, berezin_op(Q, n, grid, tail_tol), n)


def measure_field(mu, n, grid, k=0, quadrature=None):
    return BerezinField(grid, berezin_toeplitz(mu, k, n, grid, quadrature), n)


# bi-degree polynomial symbols ----------------------------------------------------


def _square(c):
    c = np.asarray(c)
    D = max(c.shape)
    out = np.zeros((D, D), dtype=c.dtype)
    out[: c.shape[0], : c.shape[1]] = c
    return out


@dataclass(frozen=True)
class BiPolynomial:
    """``sum_{a,b} coeffs[a, b] z^a conj(z)^b``."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs)
        if c.dtype != object:
            c = c.astype(np.complex128)
            if not np.all(np.isfinite(c)):
                raise UsageError("BiPolynomial coefficients must be finite")
        if c.ndim != 2:
            raise UsageError("BiPolynomial coefficients must be a 2-D array")
        c = _square(c)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self):
        return self.coeffs.shape[0] - 1

    @classmethod
    def monomial(cls, a, b, scale=1.0):
        c = np.zeros((max(a, b) + 1,) * 2, dtype=np.complex128)
        c[a, b] = scale
        return cls(c)

    @classmethod
    def one_minus_sq_squared(cls):
        """``(1-|z|^2)^2``."""
        return cls(np.diag([1.0, -2.0, 1.0]))

    @classmethod
    def berezin0(cls, S):
        """``B_0(S)`` of a finite-rank matrix ``S``.

        ``B_0(S)(z) = (1-|z|^2)^2 sum_{p,q} S_pq sqrt((p+1)(q+1)) z^p conj(z)^q``.
        """
        m = S.N
        r = np.sqrt(np.arange(m) + 1.0)
        return cls(S.entries * np.outer(r, r)).times_weight()

    def times_weight(self):
        """Multiply by ``(1-|z|^2)^2``."""
        c = self.coeffs
        D = c.shape[0]
        out = np.zeros((D + 2, D + 2), dtype=c.dtype)
        out[:D, :D] += c
        out[1:D + 1, 1:D + 1] -= 2 * c
        out[2:, 2:] += c
        return BiPolynomial(out)

    def __call__(self, z):
        z = np.asarray(z, dtype=np.complex128)
        flat = np.atleast_1d(z).ravel()
        c = self.coeffs.astype(np.complex128)
        V = flat[:, None] ** np.arange(c.shape[0])[None, :]
        vals = np.einsum("za,ab,zb->z", V, c, V.conj())
        return vals.reshape(z.shape) if z.ndim else complex(vals[0])

    def conj(self):
        c = self.coeffs
        return BiPolynomial(np.conj(c.T) if c.dtype != object else c.T.copy())

    def _binary(self, other, op):
        if isinstance(other, BiPolynomial):
            D = max(self.coeffs.shape[0], other.coeffs.shape[0])
            dtype = object if object in (self.coeffs.dtype, other.coeffs.dtype) else np.complex128
            a = np.zeros((D, D), dtype=dtype)
            b = np.zeros((D, D), dtype=dtype)
            a[: self.coeffs.shape[0], : self.coeffs.shape[0]] = self.coeffs
            b[: other.coeffs.shape[0], : other.coeffs.shape[0]] = other.coeffs
            return BiPolynomial(op(a, b))
        return BiPolynomial(op(self.coeffs, other))

    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a - b)

    def __mul__(self, other):
        if isinstance(other, BiPolynomial):
            a, b = self.coeffs, other.coeffs
            out = np.zeros((a.shape[0] + b.shape[0] - 1,) * 2, dtype=np.result_type(a, b))
            for i, j in zip(*np.nonzero(a)):
                out[i:i + b.shape[0], j:j + b.shape[1]] += a[i, j] * b
            return BiPolynomial(out)
        return BiPolynomial(self.coeffs * other)

    __rmul__ = __mul__

    def laplacian(self):
        """``d dbar`` (a quarter of the Euclidean Laplacian)."""
        c = self.coeffs
        D = c.shape[0]
        if D == 1:
            return BiPolynomial(np.zeros((1, 1), dtype=c.dtype))
        a = np.arange(1, D)
        return BiPolynomial(c[1:, 1:] * np.outer(a, a))

    def delta_tilde(self):
        """Invariant Laplacian ``(1-|z|^2)^2 d dbar``."""
        return self.laplacian().times_weight()

    def berezin_iterate(self, n):
        """Apply ``B -> (1 - delta_tilde / (m(m+1))) B`` for ``m = 1..n``.

        Starting from ``B_0(S)`` this yields ``B_n(S)``.
        """
        out = self
        for m in range(1, n + 1):
            out = out - out.delta_tilde() * (Fraction(1, m * (m + 1)) if out.coeffs.dtype == object else 1.0 / (m * (m + 1)))
        return out

    def trimmed(self, tol=0.0):
        nz = np.argwhere(np.abs(self.coeffs.astype(np.complex128)) > tol)
        D = int(nz.max()) + 1 if nz.size else 1
        return BiPolynomial(self.coeffs[:D, :D])

    def sup_estimate(self, n_radii=64, n_angles=128):
        r = np.linspace(0.0, 1.0, n_radii)
        th = 2 * np.pi * np.arange(n_angles) / n_angles
        z = (r[:, None] * np.exp(1j * th)[None, :]).ravel()
        return float(np.max(np.abs(self(z))))

    def is_real(self, tol=1e-13):
        c = self.coeffs.astype(np.complex128)
        return bool(np.max(np.abs(c - c.T.conj()), initial=0.0) <= tol)

    def as_density(self, name="bipolynomial"):
        return function_density(self, sup_bound=self.sup_estimate() * (1 + 1e-9), real=self.is_real(), name=name)


def delta_tilde_fn(p):
    return p.delta_tilde()


# invariant Laplacian on operators ------------------------------------------------


def _pair_weights(N):
    # sqrt of the integer product keeps diagonal entries exact
    a = np.arange(N) + 1.0
    return np.sqrt(np.outer(a, a))


def to_monomial_rank_one(Q):
    """Coefficients ``R`` with ``Q = sum R_pq z^p (x) z^q``."""
    return Q.entries * _pair_weights(Q.N)


def from_monomial_rank_one(R):
    W = _pair_weights(R.shape[0])
    # real divisor on each part; complex division would round
    return TruncatedOperator(R.real / W + 1j * (R.imag / W))


def delta_tilde_op(Q):
    """Invariant Laplacian of a truncated operator.

    In the monomial rank-one basis
    ``R'_ab = (a+1)(b+1) [R_{a+1,b+1} + R_{a-1,b-1} - 2 R_ab]``.  The last row
    and column need entries past the truncation; only the leading
    ``(N-1) x (N-1)`` block is meaningful unless ``Q`` vanishes there.
    """
    R = to_monomial_rank_one(Q)
    N = Q.N
    S = np.zeros_like(R)
    S[:-1, :-1] += R[1:, 1:]
    S[1:, 1:] += R[:-1, :-1]
    S -= 2 * R
    a = np.arange(N) + 1.0
    return from_monomial_rank_one(S * np.outer(a, a))


def delta_tilde_diag(d):
    """Invariant Laplacian of the diagonal operator ``sum_a d[a] E_a`` (banded, exact)."""
    d = np.asarray(d)
    a = np.arange(d.size)
    lower = np.concatenate([[0], d[:-1]])
    upper = np.concatenate([d[1:], [0]])
    return (a + 1) * (a * lower + (a + 2) * upper - 2 * (a + 1) * d)


def delta_tilde_power_diag(j, ell, N):
    """Diagonal of ``delta_tilde^ell E_j`` on indices ``< N`` (exact when ``j + ell < N``)."""
    if j + ell >= N:
        raise PrecisionError(f"band of delta_tilde^{ell} E_{j} exceeds N={N}")
    d = np.zeros(N)
    d[j] = 1.0
    for _ in range(ell):
        d = delta_tilde_diag(d)
    return d


# identities assembled from the pieces above ------------------------------------------


def decompose_T_Bn(S, n, N, quadrature=None):
    """Both sides of ``T_{B_n(S)} = (n+1) sum_j C(n,j)(-1)^j/(j+1) T^(j)_{B_0(S)}``.

    Returns ``(lhs, rhs)``; the left side is assembled from the density
    ``B_n(S)``, the right side from ``B_0(S)`` with the binomial weights.
    """
    if n < 0:
        raise UsageError("n must be nonnegative")
    q = quadrature or build_disk_quadrature()
    lhs = toeplitz(operator_as_symbol(S, n), 0, N, q)
    b0 = operator_as_symbol(S, 0)
    c = binomial_weights(n)
    rhs = sum(c[j] * toeplitz(b0, j, N, q).entries for j in range(n + 1))
    return lhs, TruncatedOperator(rhs)


def m_difference(x, m, n):
    """``(-1)^m sum_j C(m,j) (-1)^j x[n+j]``."""
    if m < 0 or n < 0:
        raise UsageError("m and n must be nonnegative")
    if n + m >= len(x):
        raise UsageError(f"sequence of length {len(x)} is too short for m={m}, n={n}")
    return (-1) ** m * sum(comb(m, j) * (-1) ** j * x[n + j] for j in range(m + 1))


@lru_cache(maxsize=None)
def lincom_coefficients(ell):
    """Exact ``c_0..c_ell`` with ``T_a^(ell) = sum_i c_i delta_tilde^i T_a``.

    Unrolls ``T^(l) = T^(0) + delta_tilde sum_{m<l} [T^(m)+...+T^(0)] / ((m+1)(m+2))``.
    """
    if ell < 0:
        raise UsageError("ell must be nonnegative")
    polys = [[Fraction(1)]]
    for l in range(1, ell + 1):
        acc = [Fraction(0)] * l
        partial = [Fraction(0)] * l
        for m in range(l):
            for i, v in enumerate(polys[m]):
                partial[i] += v
            w = Fraction(1, (m + 1) * (m + 2))
            for i, v in enumerate(partial):
                acc[i] += w * v
        polys.append([Fraction(1)] + acc)
    return tuple(polys[ell])


def mobius_conjugate(Q, w):
    """Matrix of ``U_w Q U_w`` built from the truncated columns of ``U_w``."""
    U = u_columns(complex(w), Q.N, Q.N)[0]
    return TruncatedOperator(U @ Q.entries @ U)


def conjugation_tail(Q, w):
    """Mass of ``U_w`` applied to the support of ``Q`` that falls past N."""
    from .core import operator_support

    m = operator_support(Q)
    U = u_columns(complex(w), m, Q.N)[0]
    return float(np.max(1.0 - np.sum(np.abs(U) ** 2, axis=0)))


def mobius_point(w, z):
    return mobius_eval(w, z)
