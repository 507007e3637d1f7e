import numpy as np
import pytest

from bergman_toeplitz.core import CoeffVector, TruncatedOperator, rank_one
from bergman_toeplitz.errors import UsageError
from bergman_toeplitz.measures import dirac, function_density, lebesgue, power
from bergman_toeplitz.toeplitz import (
    ToeplitzRequest,
    assemble_toeplitz,
    eigen_extremes,
    englis_bound_check,
    from_csv,
    from_json,
    norm_report,
    operator_norm,
    to_csv,
    to_json,
    toeplitz,
)


def re_z():
    return function_density(lambda z: z.real, sup_bound=1.0, real=True, name="re_z")


@pytest.mark.parametrize("k", range(6))
def test_lebesgue_is_identity(quad, k):
    T = toeplitz(lebesgue(), k, 32, quad)
    assert operator_norm(T - TruncatedOperator.identity(32)) < 1e-8


@pytest.mark.parametrize("k", range(6))
def test_lebesgue_identity_without_radial_shortcut(quad, k):
    T = toeplitz(lebesgue(), k, 24, quad, radial_shortcut=False)
    assert operator_norm(T - TruncatedOperator.identity(24)) < 1e-8


def test_power_density_diagonal(quad):
    N = 32
    T = toeplitz(power(1), 0, N, quad).entries
    p = np.arange(N)
    assert np.allclose(T, np.diag((p + 1) / (p + 2)), atol=1e-12)


def test_harmonic_symbol_independent_of_k(quad):
    T0 = toeplitz(re_z(), 0, 32, quad)
    T3 = toeplitz(re_z(), 3, 32, quad)
    assert operator_norm(T3 - T0) < 1e-7


def test_dirac_at_origin_is_projection(quad):
    T = toeplitz(dirac(0.0), 0, 16, quad)
    assert np.allclose(T.entries, TruncatedOperator.projection(0, 16).entries, atol=1e-15)


@pytest.mark.parametrize("k", [0, 1, 3])
def test_positive_measures_give_psd(quad, three_atoms, k):
    for mu in (three_atoms, power(2)):
        T = toeplitz(mu, k, 24, quad)
        assert np.allclose(T.entries, T.entries.conj().T, atol=1e-13)
        lo, _ = eigen_extremes(T)
        assert lo >= -1e-12


def test_atomic_matches_rank_one_sum(three_atoms):
    # T_{delta_v}^(k) = (1-|v|^2)^{-2} U_v E_k U_v
    from bergman_toeplitz.core import u_matrix

    N, k = 20, 2
    T = toeplitz(three_atoms, k, N).entries
    ref = np.zeros((N, N), dtype=complex)
    M = 80
    for v, m in zip(three_atoms.points, three_atoms.masses):
        U = u_matrix(v, M).entries
        ref += m * np.outer(U[:N, k], U[:N, k].conj()) / (1 - abs(v) ** 2) ** 2
    assert np.allclose(T, ref, atol=1e-12)


def test_operator_norm_examples():
    assert operator_norm(TruncatedOperator.identity(5)) == pytest.approx(1.0)
    assert operator_norm(TruncatedOperator.projection(3, 5)) == pytest.approx(1.0)
    R = rank_one(2 * CoeffVector.basis(0, 5), 3 * CoeffVector.basis(1, 5))
    assert operator_norm(R) == pytest.approx(6.0)


def test_englis_bound(quad):
    ones = function_density(lambda z: np.ones_like(z.real), sup_bound=1.0, positive=True, real=True)
    norm, bound = englis_bound_check(ones, 2, 32, quad)
    assert norm == pytest.approx(1.0, abs=1e-8) and bound == 1.0
    norm, bound = englis_bound_check(power(1), 0, 32, quad)
    assert norm == pytest.approx(32 / 33) and norm < bound
    norm, _ = englis_bound_check(re_z(), 1, 32, quad)
    assert norm <= 1.0
    with pytest.raises(UsageError):
        englis_bound_check(dirac(0.1), 0)


def test_norm_report_monotone(quad, three_atoms):
    rep = norm_report(three_atoms, 1, 16, quad)
    assert rep["monotone"] and rep["norm_2N"] >= rep["norm_N"]


def test_request_validation():
    with pytest.raises(UsageError):
        toeplitz(lebesgue(), -1, 8)
    with pytest.raises(UsageError):
        ToeplitzRequest(lebesgue(), 0, 0)


def test_csv_json_roundtrip(three_atoms):
    T = toeplitz(three_atoms, 1, 10)
    assert np.array_equal(from_csv(to_csv(T)).entries, T.entries)
    back, env = from_json(to_json(T, 1, three_atoms))
    assert np.array_equal(back.entries, T.entries)
    assert env["k"] == 1 and env["measure"]["variant"] == "atomic"


def test_request_object(quad):
    T = assemble_toeplitz(ToeplitzRequest(power(1), 0, 8, quad))
    assert T.N == 8
