from fractions import Fraction

import numpy as np
import pytest

from bergman_toeplitz.berezin import (
    BiPolynomial,
    b0_exact_bound,
    berezin_measure,
    berezin_op,
    berezin_projection,
    berezin_symbol,
    berezin_toeplitz,
    binomial_weights,
    decompose_T_Bn,
    delta_tilde_diag,
    delta_tilde_fn,
    delta_tilde_op,
    delta_tilde_power_diag,
    from_monomial_rank_one,
    hyperbolic_grid,
    lincom_coefficients,
    m_difference,
    mobius_conjugate,
    mobius_eval,
    operator_as_symbol,
    radial_kernel,
    to_monomial_rank_one,
)
from bergman_toeplitz.core import CoeffVector, TruncatedOperator, rank_one
from bergman_toeplitz.errors import PrecisionError, UsageError
from bergman_toeplitz.measures import bergman_weight, dirac, function_density, lebesgue
from bergman_toeplitz.toeplitz import operator_norm, toeplitz

Z = np.array([0.0, 0.3, -0.2 + 0.4j, 0.6j, -0.7])


def recurrence_rhs(k, N):
    out = np.zeros((N, N))
    if k >= 1:
        out[k - 1, k - 1] = (k + 1) * k
    out[k + 1, k + 1] = (k + 1) * (k + 2)
    out[k, k] = -2 * (k + 1) ** 2
    return out


@pytest.mark.parametrize("n", [0, 1, 5, 12])
def test_binomial_weights_sum(n):
    c = binomial_weights(n)
    assert c.sum() == pytest.approx(1.0)


@pytest.mark.parametrize("n", [0, 3, 10])
def test_berezin_of_identity(n):
    vals = berezin_op(TruncatedOperator.identity(128), n, Z[:4], tail_tol=1e-8)
    assert np.allclose(vals, 1.0, atol=1e-10)


def test_berezin_e0_closed_form():
    vals = berezin_op(TruncatedOperator.projection(0, 16), 0, Z)
    assert np.allclose(vals, (1 - np.abs(Z) ** 2) ** 2, atol=1e-14)


@pytest.mark.parametrize("w,k", [(0.3, 0), (-0.2 + 0.3j, 2), (0.5j, 4)])
def test_berezin_conjugated_projection(w, k):
    N = 96
    Q = mobius_conjugate(TruncatedOperator.projection(k, N), w)
    z = np.array([0.1, -0.2j, 0.25 + 0.1j])
    s = np.abs(mobius_eval(w, z)) ** 2
    expected = (1 - s) ** 2 * (k + 1) * s**k
    assert np.allclose(berezin_op(Q, 0, z), expected, atol=1e-10)


def test_berezin_guards():
    Q = TruncatedOperator.identity(20)
    with pytest.raises(PrecisionError):
        berezin_op(Q, 10, 0.1)
    with pytest.raises(PrecisionError):
        berezin_op(TruncatedOperator.identity(200), 40, 0.1)
    with pytest.raises(PrecisionError):
        berezin_op(TruncatedOperator.identity(16), 2, 0.95, tail_tol=1e-8)
    with pytest.raises(UsageError):
        berezin_op(Q, -1, 0.1)


@pytest.mark.parametrize("n", [0, 2, 5])
def test_berezin_bound(n, rng):
    Q = TruncatedOperator(rng.standard_normal((24, 24)) + 1j * rng.standard_normal((24, 24)))
    grid = hyperbolic_grid(0.9, 5, 8)[1]
    assert np.max(np.abs(berezin_op(Q, n, grid))) <= b0_exact_bound(Q, n)


@pytest.mark.parametrize("n", [0, 1, 4])
def test_berezin_measure_examples(quad, n):
    w = np.array([0.0, 0.5, -0.3 + 0.6j])
    assert np.allclose(berezin_measure(lebesgue(), n, w, quad), 1.0, atol=1e-9)


def test_berezin_dirac():
    w = np.array([0.0, 0.4, 0.2 - 0.7j])
    assert np.allclose(berezin_measure(dirac(0.0), 0, w), (1 - np.abs(w) ** 2) ** 2, atol=1e-14)


@pytest.mark.parametrize("n", [1, 3, 8])
def test_berezin_symbol_harmonic(quad, n):
    a = function_density(lambda z: z.real, sup_bound=1.0, real=True)
    w = np.array([0.0, 0.4, -0.3 + 0.2j])
    assert np.allclose(berezin_symbol(a, n, w, quad), w.real, atol=1e-10)


def test_berezin_symbol_constant(quad):
    one = function_density(lambda z: np.ones_like(z.real), sup_bound=1.0, positive=True, real=True)
    assert np.allclose(berezin_symbol(one, 3, Z[:3], quad), 1.0, atol=1e-12)


@pytest.mark.parametrize("n,k", [(0, 0), (2, 1), (5, 3)])
def test_radial_kernel_matches_matrix(n, k):
    z = np.array([0.0, 0.3, 0.8])
    N = 128
    direct = berezin_op(TruncatedOperator.projection(k, N), n, z, tail_tol=1e-8)
    assert np.allclose(berezin_projection(n, k, z), direct, atol=1e-12)
    P = radial_kernel(n, k)
    assert np.allclose((1 - np.abs(z) ** 2) ** 2 * P(np.abs(z) ** 2), direct, atol=1e-12)


@pytest.mark.parametrize("method", ["direct", "pullback"])
def test_berezin_toeplitz_routes_agree(quad, three_atoms, method):
    w = np.array([0.1, -0.3 + 0.2j])
    ref = berezin_toeplitz(three_atoms, 1, 2, w, quad, method="direct")
    if method == "pullback":
        mu = bergman_weight(0.5)
        a = berezin_toeplitz(mu, 1, 2, w, quad, method="direct")
        b = berezin_toeplitz(mu, 1, 2, w, quad, method="pullback")
        assert np.allclose(a, b, atol=1e-7)
    else:
        T = toeplitz(three_atoms, 1, 128)
        assert np.allclose(ref, berezin_op(T, 2, w), atol=1e-10)


def test_delta_tilde_fn_examples():
    z = np.array([0.0, 0.3, 0.5 - 0.2j])
    assert np.allclose(delta_tilde_fn(BiPolynomial.monomial(1, 0))(z), 0)
    assert np.allclose(delta_tilde_fn(BiPolynomial.monomial(1, 1))(z), (1 - np.abs(z) ** 2) ** 2)
    B0 = BiPolynomial.one_minus_sq_squared()
    B1 = B0.berezin_iterate(1)
    lhs = delta_tilde_fn(B0)(z)
    rhs = 1 * 2 * (B0(z) - B1(z))
    assert np.allclose(lhs, rhs, atol=1e-14)


def test_berezin_iterate_matches_matrix():
    S = rank_one(CoeffVector.basis(0, 64), CoeffVector.basis(1, 64))
    z = np.array([0.1, 0.3 + 0.2j])
    for n in range(4):
        poly = BiPolynomial.berezin0(S.resized(2)).berezin_iterate(n)
        assert np.allclose(poly(z), berezin_op(S, n, z), atol=1e-12)


@pytest.mark.parametrize("k", [0, 1, 17, 63, 100])
def test_delta_tilde_op_projection_exact(k):
    N = 128
    out = delta_tilde_op(TruncatedOperator.projection(k, N)).entries
    assert np.array_equal(out, recurrence_rhs(k, N))


def test_monomial_rank_one_roundtrip(rng):
    Q = TruncatedOperator(rng.standard_normal((12, 12)) + 1j * rng.standard_normal((12, 12)))
    assert np.allclose(from_monomial_rank_one(to_monomial_rank_one(Q)).entries, Q.entries, rtol=1e-15)


def test_delta_tilde_diag_matches_op():
    d = np.zeros(20)
    d[[3, 7]] = [1.0, -2.5]
    full = delta_tilde_op(TruncatedOperator(np.diag(d))).entries
    assert np.allclose(np.diag(full), delta_tilde_diag(d))
    assert np.array_equal(delta_tilde_power_diag(5, 0, 10), np.eye(10)[5])
    with pytest.raises(PrecisionError):
        delta_tilde_power_diag(8, 3, 10)


def test_decomposition_examples(quad):
    lhs, rhs = decompose_T_Bn(TruncatedOperator.projection(0, 2), 0, 32, quad)
    assert np.array_equal(lhs.entries, rhs.entries)
    S = rank_one(CoeffVector.basis(0, 2), CoeffVector.basis(1, 2))
    lhs, rhs = decompose_T_Bn(S, 2, 48, quad)
    assert operator_norm(lhs - rhs) < 1e-6
    lhs, rhs = decompose_T_Bn(TruncatedOperator.projection(1, 2), 1, 48, quad)
    assert operator_norm(lhs - rhs) < 1e-6


def test_operator_as_symbol_values():
    S = TruncatedOperator.projection(1, 2)
    a = operator_as_symbol(S, 1)
    z = np.array([0.2, 0.5j])
    assert np.allclose(a.density_at(z), berezin_op(S.resized(64), 1, z), atol=1e-12)


def test_m_difference_examples():
    x = [float(n) for n in range(10)]
    assert m_difference(x, 0, 4) == 4
    assert m_difference(x, 2, 3) == 0
    assert m_difference([n * n for n in range(10)], 2, 5) == 2
    with pytest.raises(UsageError):
        m_difference(x, 5, 6)


def test_lincom_examples():
    assert lincom_coefficients(0) == (Fraction(1),)
    assert lincom_coefficients(1) == (Fraction(1), Fraction(1, 2))
    assert lincom_coefficients(2) == (Fraction(1), Fraction(5, 6), Fraction(1, 12))
    with pytest.raises(UsageError):
        lincom_coefficients(-1)
