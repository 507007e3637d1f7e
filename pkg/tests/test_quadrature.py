import numpy as np
import pytest
from scipy.special import beta as beta_fn

from bergman_toeplitz.errors import EvaluationError
from bergman_toeplitz.measures import bergman_weight, dirac, lebesgue
from bergman_toeplitz.quadrature import (
    LAGUERRE_SWITCH,
    build_disk_quadrature,
    gauss_jacobi_unit,
    gauss_legendre_unit,
    integrate,
)


def test_examples(quad):
    assert integrate(quad, lebesgue(), lambda z: np.ones_like(z)) == pytest.approx(1.0, abs=1e-13)
    assert integrate(quad, dirac(0.0), lambda z: (1 - abs(z) ** 2) ** 2) == pytest.approx(1.0)
    assert integrate(quad, bergman_weight(1.0), lambda z: np.ones_like(z)) == pytest.approx(0.5, abs=1e-13)


@pytest.mark.parametrize("a,b", [(0, 0), (3, 3), (5, 2), (7, 7)])
def test_monomial_moments(quad, a, b):
    val = quad.sum(quad.nodes**a * np.conj(quad.nodes) ** b)
    expected = 1.0 / (a + 1) if a == b else 0.0
    assert abs(val - expected) < 1e-13


def test_legendre_unit_weights():
    x, w = gauss_legendre_unit(20)
    assert np.all((x > 0) & (x < 1))
    assert w.sum() == pytest.approx(1.0)


@pytest.mark.parametrize("beta", [0.0, 0.5, 3.0, LAGUERRE_SWITCH - 1, LAGUERRE_SWITCH, 200.0, 5000.0])
def test_jacobi_unit_moments(beta):
    x, w = gauss_jacobi_unit(120, beta)
    # int_0^1 x^m (1-x)^beta dx = B(m+1, beta+1)
    for m in (0, 1, 3):
        exact = beta_fn(m + 1, beta + 1)
        assert np.dot(w, x**m) == pytest.approx(exact, rel=1e-9)


def test_self_convergence_on_corpus():
    q1 = build_disk_quadrature(200, 256)
    q2 = build_disk_quadrature(400, 512)
    f = lambda z: np.abs(1 - 0.5 * z) ** 2 * (1 - abs(z) ** 2) ** 3
    assert abs(q1.sum(f(q1.nodes)) - q2.sum(f(q2.nodes))) < 1e-10


def test_nonfinite_integrand_names_node(quad):
    with pytest.raises(EvaluationError, match="node"), np.errstate(all="ignore"):
        integrate(quad, lebesgue(), lambda z: 1 / (z - quad.nodes[7]))
