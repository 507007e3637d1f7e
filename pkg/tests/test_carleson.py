import numpy as np
import pytest

from bergman_toeplitz.berezin import hyperbolic_grid
from bergman_toeplitz.carleson import (
    annulus_constant_check,
    b0_field,
    b0_sup,
    box_kernel_sup,
    c_k_closed_form,
    c_k_quadrature,
    carleson_classify,
    classify,
    domination_gap,
    mu_disk,
    mu_tilde_disk,
    norm_bounds,
    pseudo_disk,
    sandwich_constants,
)
from bergman_toeplitz.core import mobius_eval
from bergman_toeplitz.errors import PrecisionError, UsageError
from bergman_toeplitz.measures import bergman_weight, dirac, indicator, lebesgue


def test_pseudo_disk_examples():
    D = pseudo_disk(0.0, 0.3)
    assert D.euclidean_center == 0 and D.euclidean_radius == pytest.approx(0.3)
    assert D.area == pytest.approx(0.09)
    assert pseudo_disk(0.5, 0.1).area == pytest.approx((0.075 / 0.9975) ** 2)
    assert pseudo_disk(0.5, 0.1).area == pytest.approx(5.65323e-3, rel=1e-5)


@pytest.mark.parametrize("v,r", [(0.5, 0.1), (-0.3 + 0.6j, 0.3), (0.9j, 0.5)])
def test_pseudo_disk_boundary_is_level_set(v, r):
    D = pseudo_disk(v, r)
    assert np.allclose(np.abs(mobius_eval(v, D.boundary(32))), r, atol=1e-12)
    assert D.contains(v)


def test_pseudo_disk_validation():
    with pytest.raises(UsageError):
        pseudo_disk(0.0, 1.0)


@pytest.mark.parametrize("r", [0.1, 0.3, 0.5])
def test_box_lebesgue(r):
    grid = hyperbolic_grid(0.9, 4, 6)[1]
    assert box_kernel_sup(lebesgue(), r, grid) == pytest.approx(1.0, abs=1e-10)


def test_box_dirac():
    assert box_kernel_sup(dirac(0.0), 0.1, np.array([0.0])) == pytest.approx(100.0)
    assert mu_disk(dirac(0.0), 0.9, 0.1) == 0.0


def test_mu_tilde_examples():
    assert mu_tilde_disk(dirac(0.0), 0.0, 0.1) == pytest.approx(1.0)
    assert mu_tilde_disk(lebesgue(), 0.0, 0.5) == pytest.approx(1 / 3, abs=1e-10)


@pytest.mark.parametrize("v", [0.0, 0.4, -0.5 + 0.5j])
@pytest.mark.parametrize("r", [0.1, 0.3])
def test_sandwich(v, r):
    mu = bergman_weight(0.5)
    lo, hi = sandwich_constants(r)
    D = pseudo_disk(v, r)
    avg = mu_disk(mu, v, r) / D.area
    tilde = mu_tilde_disk(mu, v, r)
    assert lo * avg <= tilde <= hi * avg


@pytest.mark.parametrize("k", range(11))
def test_c_k(quad, k):
    assert c_k_quadrature(k, quad) == pytest.approx(c_k_closed_form(k), abs=1e-8)


def test_c_0_is_one_third():
    assert c_k_closed_form(0) == pytest.approx(1 / 3)


def test_annulus():
    c1, ok = annulus_constant_check(1000)
    assert ok and c1 > 0
    _, ok_big = annulus_constant_check(50, r=0.5)
    assert not ok_big
    with pytest.raises(UsageError):
        annulus_constant_check(0)


def test_b0_lebesgue_is_one():
    assert b0_sup(lebesgue()) == pytest.approx(1.0, abs=1e-9)


def test_b0_dirac_sup_at_atom():
    # B_0(delta_v)(v) = (1-|v|^2)^{-2}
    assert b0_sup(dirac(0.5)) == pytest.approx(1 / 0.75**2, rel=1e-12)


@pytest.mark.parametrize("k", [0, 2, 4])
def test_norm_bounds_lebesgue(quad, k):
    lo, norm, up = norm_bounds(lebesgue(), k, 32, quadrature=quad)
    assert lo == pytest.approx(1.0, abs=1e-8)
    assert norm == pytest.approx(1.0, abs=1e-8)
    assert up == pytest.approx(4 * (k + 2), rel=1e-8)


def test_norm_bounds_dirac_origin():
    lo, norm, up = norm_bounds(dirac(0.0), 0, 16)
    assert norm == pytest.approx(1.0)
    assert up == pytest.approx(8 * b0_sup(dirac(0.0)))


def test_norm_bounds_truncation_guard():
    with pytest.raises(PrecisionError):
        norm_bounds(dirac(0.9), 0, 48)


@pytest.mark.parametrize("k", [0, 3])
def test_domination_gap(quad, three_atoms, k):
    assert domination_gap(three_atoms, k, 32, quad) >= -1e-8


def test_non_positive_rejected():
    with pytest.raises(UsageError):
        norm_bounds(bergman_weight(1.0, -1.0), 0, 16)
    with pytest.raises(UsageError):
        carleson_classify(dirac(0.2, -1.0))


def test_classify_rules():
    assert classify(np.array([1.0, 1.0, 1.0, 1.0]), 1.0, 1.0) == "carleson"
    assert classify(np.array([1.0, 0.5, 0.2, 0.05]), 1.0, 1.0) == "vanishing_carleson_evidence"
    assert classify(np.array([1.0, 1.0, 1.0]), 1.0, 1.5) == "inconclusive"


@pytest.mark.slow
def test_classify_lebesgue():
    rep = carleson_classify(lebesgue(), ks=(0,), N=32)
    assert rep.classification == "carleson"
    assert rep.b0_sup == pytest.approx(1.0, abs=1e-9)


@pytest.mark.slow
def test_classify_compact_support():
    rep = carleson_classify(indicator(0.5), ks=(0,), N=32)
    assert rep.classification == "vanishing_carleson_evidence"
    assert set(rep.to_dict()) >= {"b0_sup", "box_sup", "mu_tilde_sup", "bounds", "classification"}


def test_b0_field_shapes():
    grid, shells, sup = b0_field(dirac(0.0), 0, 0.9, 6, 8)
    assert grid.shape == (6, 8) and shells.shape == (6,)
    assert sup == pytest.approx(1.0)
