"""Runnable identity checks for the core, Toeplitz and Berezin layers.

Each check returns a measured residual and the tolerance tier it is held to.
Checks whose accuracy depends on mass surviving the truncation raise
:class:`PrecisionError` when ``N`` is too small, and are reported with status
``precision_error`` instead of a misleading residual.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from . import berezin as bz
from .core import (
    CoeffVector,
    TruncatedOperator,
    inner_product,
    mobius_eval,
    rank_one,
    u_columns,
    u_matrix,
    u_transform,
    u_transform_tail,
)
from .errors import PrecisionError, UsageError
from .measures import atoms, bergman_weight, constant, function_density
from .quadrature import build_disk_quadrature
from .toeplitz import eigen_extremes, operator_norm, toeplitz

TIERS = {"exact": 1e-12, "assembled": 1e-6, "field": 1e-7}
TAIL_TOL = 1e-8
TAIL_RADIUS = 0.4
INNER_RMAX = 0.5
MIN_N = 16


@dataclass(frozen=True)
class RunConfig:
    N: int = 64
    M: int = 200
    L: int = 256
    tol_exact: float = TIERS["exact"]
    tol_assembled: float = TIERS["assembled"]
    tol_field: float = TIERS["field"]
    grid_rmax: float = 0.9
    n_radii: int = 6
    n_angles: int = 12
    seed: int = 0

    def __post_init__(self):
        if self.N < MIN_N:
            raise UsageError(f"--n-trunc must be at least {MIN_N}, got {self.N}")
        if min(self.tol_exact, self.tol_assembled, self.tol_field) <= 0:
            raise UsageError("tolerances must be positive")
        if not 0.0 < self.grid_rmax < 1.0:
            raise UsageError(f"--grid-rmax must lie in (0, 1), got {self.grid_rmax}")
        if self.M < 1 or self.L < 4:
            raise UsageError(f"quadrature orders must satisfy M >= 1, L >= 4, got M={self.M}, L={self.L}")

    def tol(self, tier):
        return {"exact": self.tol_exact, "assembled": self.tol_assembled, "field": self.tol_field}[tier]


@dataclass
class CheckResult:
    name: str
    module: str
    anchor: str
    tier: str
    tolerance: float
    residual: float | None = None
    status: str = "pass"
    detail: str = ""


@dataclass
class Context:
    cfg: RunConfig
    rng: np.random.Generator
    quad: object
    grid: np.ndarray = field(default=None)
    inner: np.ndarray = field(default=None)

    def random_points(self, m, rmax):
        r = rmax * np.sqrt(self.rng.uniform(0, 1, m))
        return r * np.exp(2j * np.pi * self.rng.uniform(0, 1, m))

    def random_coeffs(self, deg, N):
        c = np.zeros(N, dtype=np.complex128)
        c[: deg + 1] = self.rng.normal(size=deg + 1) + 1j * self.rng.normal(size=deg + 1)
        return CoeffVector(c)

    def random_atoms(self, m=3, rmax=0.5, complex_mass=False):
        pts = self.random_points(m, rmax)
        ms = self.rng.uniform(0.2, 1.0, m)
        if complex_mass:
            ms = ms * np.exp(2j * np.pi * self.rng.uniform(0, 1, m))
        return atoms(pts, ms, name="random_atoms")

    def random_block(self, m):
        S = np.zeros((self.cfg.N, self.cfg.N), dtype=np.complex128)
        S[:m, :m] = self.rng.normal(size=(m, m)) + 1j * self.rng.normal(size=(m, m))
        return TruncatedOperator(S)


def _max(values):
    return float(max(values)) if len(values) else 0.0


# bergman-core ------------------------------------------------------------------------------


def check_involution(ctx):
    z = ctx.random_points(50, 0.9)
    w = ctx.random_points(50, 0.9)
    return _max([abs(mobius_eval(a, mobius_eval(a, b)) - b) for a, b in zip(z, w)])


def check_isometry_tail(ctx):
    N = ctx.cfg.N
    deg = max(1, N // 8)
    worst = 0.0
    for z in ctx.random_points(8, TAIL_RADIUS):
        f = ctx.random_coeffs(deg, N)
        tail = u_transform_tail(z, f)
        if tail > TAIL_TOL * f.norm():
            raise PrecisionError(f"tail {tail:.3g} at |z|={abs(z):.3f}, deg {deg} exceeds {TAIL_TOL:g}")
        g = CoeffVector(np.concatenate([f.coeffs, np.zeros(N)]))
        if u_transform_tail(z, g) > tail + 1e-15:
            return float("inf")
        worst = max(worst, abs(u_transform(z, f).norm() - f.norm()) - tail)
    return max(worst, 0.0)


def check_u_selfadjoint(ctx):
    h = ctx.cfg.N // 2
    out = []
    for z in ctx.random_points(5, 0.8):
        U = u_matrix(z, ctx.cfg.N).leading(h)
        out.append(np.max(np.abs(U - U.conj().T)))
    return _max(out)


def check_rank_one(ctx):
    N = ctx.cfg.N
    f, g, h = (ctx.random_coeffs(6, N) for _ in range(3))
    lhs = rank_one(f, g).apply(h).coeffs
    rhs = inner_product(h, g) * f.coeffs
    return float(np.max(np.abs(lhs - rhs)) / max(1.0, np.max(np.abs(rhs))))


# toeplitz-ops ----------------------------------------------------------------------------------


def check_identity_symbol(ctx):
    N = ctx.cfg.N
    return _max([operator_norm(toeplitz(constant(1.0), k, N, ctx.quad, radial_shortcut=False) - TruncatedOperator.identity(N)) for k in range(4)])


def _real_symbol(ctx):
    c = ctx.rng.normal(size=(3, 3)) + 1j * ctx.rng.normal(size=(3, 3))
    p = bz.BiPolynomial(c)
    return (p + p.conj()).as_density("random_real_bipolynomial")


def check_selfadjoint(ctx):
    T = toeplitz(_real_symbol(ctx), 1, ctx.cfg.N, ctx.quad).entries
    return float(np.max(np.abs(T - T.conj().T)))


def check_positivity(ctx):
    worst = 0.0
    for mu in (ctx.random_atoms(), bergman_weight(0.5)):
        for k in (0, 2):
            lo, _ = eigen_extremes(toeplitz(mu, k, ctx.cfg.N, ctx.quad))
            worst = max(worst, -lo)
    return worst


def check_modulus_domination(ctx):
    mu = ctx.random_atoms(4, complex_mass=True)
    worst = 0.0
    for k in range(3):
        a = operator_norm(toeplitz(mu, k, ctx.cfg.N))
        b = operator_norm(toeplitz(mu.variation(), k, ctx.cfg.N))
        worst = max(worst, a - b)
    return max(worst, 0.0)


def check_recurrence_closure(ctx):
    N = ctx.cfg.N
    mu = ctx.random_atoms()
    Ts = [toeplitz(mu, k, N) for k in range(4)]
    out = []
    for k in range(3):
        lhs = (k + 1) * (k + 2) * (Ts[k + 1] - Ts[k]).leading(N - 2)
        rhs = bz.delta_tilde_op(TruncatedOperator(sum(T.entries for T in Ts[: k + 1]))).leading(N - 2)
        out.append(np.linalg.norm(lhs - rhs, 2) / max(1.0, np.linalg.norm(rhs, 2)))
    return _max(out)


def check_harmonic(ctx):
    N = ctx.cfg.N
    out = []
    for p in (bz.BiPolynomial([[0, 0.5], [0.5, 0]]), bz.BiPolynomial.monomial(2, 0, -0.5j) + bz.BiPolynomial.monomial(0, 2, 0.5j)):
        a = p.as_density()
        T0 = toeplitz(a, 0, N, ctx.quad)
        out += [operator_norm(toeplitz(a, k, N, ctx.quad) - T0) for k in range(1, 5)]
    return _max(out)


# berezin-laplacian ------------------------------------------------------------------------------


def check_berezin_identity(ctx):
    I = TruncatedOperator.identity(ctx.cfg.N)
    return _max([np.max(np.abs(bz.berezin_op(I, n, ctx.inner, tail_tol=ctx.cfg.tol_exact) - 1.0)) for n in range(4)])


def check_covariance(ctx):
    Q = ctx.random_block(4)
    out = []
    for w in ctx.random_points(3, 0.5):
        if bz.conjugation_tail(Q, w) > ctx.cfg.tol_exact:
            raise PrecisionError(f"U_w moves mass of the support past N={ctx.cfg.N}")
        C = bz.mobius_conjugate(Q, w)
        for n in range(3):
            lhs = bz.berezin_op(Q, n, mobius_eval(w, ctx.inner))
            rhs = bz.berezin_op(C, n, ctx.inner, tail_tol=ctx.cfg.tol_exact)
            out.append(np.max(np.abs(lhs - rhs)))
    return _max(out)


def check_berezin_commutation(ctx):
    mu = ctx.random_atoms(2)
    out = []
    b0 = bz.transform_as_symbol(mu, 0, 0)
    for n in (1, 2):
        lhs = bz.berezin_symbol(b0, n, ctx.inner, ctx.quad)
        rhs = bz.berezin_symbol(bz.transform_as_symbol(mu, 0, n), 0, ctx.inner, ctx.quad)
        out.append(np.max(np.abs(lhs - rhs)))
    return _max(out)


def check_berezin_recurrence(ctx):
    S = ctx.random_block(4)
    B = bz.BiPolynomial.berezin0(S.resized(4))
    out = []
    for n in range(1, 5):
        nxt = B - bz.delta_tilde_fn(B) * (1.0 / (n * (n + 1)))
        out.append(np.max(np.abs(nxt(ctx.grid) - bz.berezin_op(S, n, ctx.grid))))
        B = nxt
    return _max(out)


def check_laplacian_symmetry(ctx):
    N = ctx.cfg.N
    if N < 13:
        raise PrecisionError("need N >= 13 for degree-10 quadruples")
    out = []
    for _ in range(5):
        f, g, h, k = (ctx.random_coeffs(10, N) for _ in range(4))
        a = inner_product(bz.delta_tilde_op(rank_one(f, g)).apply(h), k)
        b = inner_product(bz.delta_tilde_op(rank_one(h, k)).apply(f), g)
        out.append(abs(a - b) / max(1.0, abs(a)))
    return _max(out)


def check_symbol_commutation(ctx):
    N = ctx.cfg.N
    out = []
    for p in (bz.BiPolynomial.monomial(1, 1), bz.BiPolynomial.monomial(1, 2)):
        a, da = p.as_density(), bz.delta_tilde_fn(p).as_density()
        for k in range(4):
            lhs = bz.delta_tilde_op(toeplitz(a, k, N, ctx.quad)).leading(N - 2)
            rhs = toeplitz(da, k, N, ctx.quad).leading(N - 2)
            out.append(np.linalg.norm(lhs - rhs, 2))
    return _max(out)


def check_transform_identity(ctx):
    N = ctx.cfg.N
    out = []
    for mu in (ctx.random_atoms(), bergman_weight(0.5)):
        for n in (1, 2):
            bn = bz.transform_as_symbol(mu, 0, n)
            for k in (1, 2):
                lhs = toeplitz(bz.transform_as_symbol(mu, k, n), 0, N, ctx.quad)
                rhs = toeplitz(bn, k, N, ctx.quad)
                out.append(operator_norm(lhs - rhs))
    return _max(out)


def check_integral_symmetry(ctx):
    q = ctx.quad
    deg = 4
    out = []
    for j in range(3):
        f, h = ctx.random_coeffs(deg, deg + 1), ctx.random_coeffs(deg, deg + 1)
        U = u_columns(q.nodes, j + 1, deg + 1)[:, :, j]
        fu = U @ np.conj(f.basis_coords())
        hu = U @ np.conj(h.basis_coords())
        lhs = q.sum(np.abs(hu) ** 2 * np.abs(f(q.nodes)) ** 2)
        rhs = q.sum(np.abs(fu) ** 2 * np.abs(h(q.nodes)) ** 2)
        out.append(abs(lhs - rhs) / max(1.0, abs(lhs)))
    return _max(out)


def check_berezin_bound(ctx):
    N = ctx.cfg.N
    A = ctx.rng.normal(size=(N, N)) + 1j * ctx.rng.normal(size=(N, N))
    Q = TruncatedOperator(A / np.linalg.norm(A, 2))
    worst = 0.0
    for n in range(4):
        sup = np.max(np.abs(bz.berezin_op(Q, n, ctx.grid)))
        worst = max(worst, sup - bz.b0_exact_bound(Q, n))
    return max(worst, 0.0)


def check_projection_laplacian(ctx):
    N = ctx.cfg.N
    worst = 0.0
    for k in range(min(100, N - 2) + 1):
        D = bz.delta_tilde_op(TruncatedOperator.projection(k, N)).entries
        ref = np.zeros((N, N))
        if k:
            ref[k - 1, k - 1] = k * (k + 1)
        ref[k, k] = -2 * (k + 1) ** 2
        ref[k + 1, k + 1] = (k + 1) * (k + 2)
        worst = max(worst, float(np.max(np.abs(D - ref))))
    return worst


def check_decomposition(ctx):
    N = ctx.cfg.N
    e0, e1 = CoeffVector.basis(0, N), CoeffVector.basis(1, N)
    out = []
    for S in (TruncatedOperator.projection(0, N), TruncatedOperator.projection(1, N), rank_one(e0, e1)):
        for n in range(3):
            lhs, rhs = bz.decompose_T_Bn(S.resized(4), n, N, ctx.quad)
            out.append(operator_norm(lhs - rhs))
    return _max(out)


def check_lincom(ctx):
    N = ctx.cfg.N
    a = function_density(bz.BiPolynomial.monomial(2, 1) + bz.BiPolynomial.monomial(1, 1), name="poly")
    Ta = toeplitz(a, 0, N, ctx.quad)
    powers = [Ta]
    for _ in range(3):
        powers.append(bz.delta_tilde_op(powers[-1]))
    out = []
    # differencing amplifies roundoff like p^(2 ell); compare on the leading half
    m = min(N // 2, 32)
    for ell in range(1, 4):
        c = bz.lincom_coefficients(ell)
        rhs = sum(float(ci) * P.leading(m) for ci, P in zip(c, powers))
        lhs = toeplitz(a, ell, N, ctx.quad).leading(m)
        # the terms grow like p^(2i) and cancel, so measure against the largest
        scale = max(np.linalg.norm(float(ci) * P.leading(m), 2) for ci, P in zip(c, powers))
        out.append(np.linalg.norm(lhs - rhs, 2) / max(1.0, scale))
    return _max(out)


CHECKS = [
    ("mobius-involution", "bergman-core", "phi_z o phi_z = id", "exact", check_involution),
    ("u-isometry-tail", "bergman-core", "U_z unitary, truncation tail bound", "exact", check_isometry_tail),
    ("u-selfadjoint", "bergman-core", "U_z self-adjoint involution", "exact", check_u_selfadjoint),
    ("rank-one-action", "bergman-core", "(f (x) g) h = <h,g> f", "exact", check_rank_one),
    ("identity-symbol", "toeplitz-ops", "T^(k)_1 = I", "assembled", check_identity_symbol),
    ("selfadjoint-real-symbol", "toeplitz-ops", "real symbol gives self-adjoint T^(k)", "exact", check_selfadjoint),
    ("positivity", "toeplitz-ops", "positive measure gives positive T^(k)", "assembled", check_positivity),
    ("modulus-domination", "toeplitz-ops", "||T^(k)_mu|| <= ||T^(k)_|mu|||", "assembled", check_modulus_domination),
    ("recurrence-closure", "toeplitz-ops", "(k+1)(k+2)[T^(k+1)-T^(k)] = Dt[T^(k)+...+T^(0)]", "assembled", check_recurrence_closure),
    ("harmonic-invariance", "toeplitz-ops", "harmonic a: T^(k)_a = T_a", "assembled", check_harmonic),
    ("berezin-of-identity", "berezin-laplacian", "B_n(I) = 1", "exact", check_berezin_identity),
    ("berezin-covariance", "berezin-laplacian", "B_n(U_w Q U_w) = B_n(Q) o phi_w", "exact", check_covariance),
    ("berezin-commutation", "berezin-laplacian", "B_n B_0 = B_0 B_n", "field", check_berezin_commutation),
    ("berezin-recurrence", "berezin-laplacian", "B_n = (1 - Dt/(n(n+1))) B_(n-1)", "field", check_berezin_recurrence),
    ("laplacian-symmetry", "berezin-laplacian", "<Dt(f(x)g)h,k> = <Dt(h(x)k)f,g>", "exact", check_laplacian_symmetry),
    ("symbol-commutation", "berezin-laplacian", "Dt T^(k)_a = T^(k)_(Dt a)", "assembled", check_symbol_commutation),
    ("transform-identity", "berezin-laplacian", "T_(B_n(T^(k)_mu)) = T^(k)_(B_n(mu))", "assembled", check_transform_identity),
    ("integral-symmetry", "berezin-laplacian", "int |<U_w e_j,h>|^2 |f|^2 = int |<U_w e_j,f>|^2 |h|^2", "field", check_integral_symmetry),
    ("berezin-bound", "berezin-laplacian", "||B_n(Q)||_inf <= (n+1) 2^n ||Q||", "exact", check_berezin_bound),
    ("projection-laplacian", "berezin-laplacian", "Dt E_k = (k+1)[k E_(k-1) + (k+2) E_(k+1) - 2(k+1) E_k]", "exact", check_projection_laplacian),
    ("binomial-decomposition", "berezin-laplacian", "T_(B_n(S)) = (n+1) sum C(n,j)(-1)^j/(j+1) T^(j)_(B_0(S))", "assembled", check_decomposition),
    ("laplacian-expansion", "berezin-laplacian", "T^(l)_a = sum c_i Dt^i T_a", "assembled", check_lincom),
]


def run_identities(cfg, names=None):
    """Run the checks (all, or those in ``names``) and return their results."""
    ctx = Context(cfg, np.random.default_rng(cfg.seed), build_disk_quadrature(cfg.M, cfg.L))
    ctx.grid = bz.hyperbolic_grid(cfg.grid_rmax, cfg.n_radii, cfg.n_angles)[1].ravel()
    ctx.inner = bz.hyperbolic_grid(min(INNER_RMAX, cfg.grid_rmax), cfg.n_radii, cfg.n_angles)[1].ravel()
    results = []
    for name, module, anchor, tier, fn in CHECKS:
        if names and name not in names:
            continue
        res = CheckResult(name, module, anchor, tier, cfg.tol(tier))
        try:
            r = float(fn(ctx))
            res.residual = r
            res.status = "pass" if r <= res.tolerance else "fail"
        except PrecisionError as exc:
            res.status = "precision_error"
            res.detail = str(exc)
        results.append(res)
    return results


def summary(cfg, results):
    return {
        "config": asdict(cfg),
        "passed": all(r.status == "pass" for r in results),
        "checks": [asdict(r) for r in results],
    }
