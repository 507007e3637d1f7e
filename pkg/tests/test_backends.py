import subprocess
import sys

import numpy as np
import pytest

from bergman_toeplitz import _kernels_py, kernels

COMPILED = "compiled" in kernels.available_backends()


def sample_points(m=50, seed=3):
    rng = np.random.default_rng(seed)
    r = 0.999 * np.sqrt(rng.uniform(0, 1, m))
    return r * np.exp(2j * np.pi * rng.uniform(0, 1, m))


@pytest.mark.skipif(not COMPILED, reason="compiled kernels not built")
@pytest.mark.parametrize("k,N", [(0, 1), (0, 16), (3, 40), (20, 64)])
def test_fused_column_agrees(k, N):
    z = sample_points()
    a = kernels.get_backend("compiled").fused_column(z, k, N)
    b = _kernels_py.fused_column(z, k, N)
    assert np.allclose(a, b, rtol=1e-13, atol=1e-14)


@pytest.mark.skipif(not COMPILED, reason="compiled kernels not built")
@pytest.mark.parametrize("ncols,N", [(1, 8), (6, 24), (48, 48)])
def test_fused_columns_agrees(ncols, N):
    z = sample_points()
    a = kernels.get_backend("compiled").fused_columns(z, ncols, N)
    b = _kernels_py.fused_columns(z, ncols, N)
    # rounding order differs; compare against each column's scale
    scale = np.max(np.abs(b), axis=2, keepdims=True)
    assert np.max(np.abs(a - b) / scale) < 1e-13


def test_python_backend_matches_series():
    z = np.array([0.3 - 0.2j])
    N = 30
    col = _kernels_py.fused_column(z, 0, N)[0]
    n = np.arange(N)
    # phi_z' / (1-|z|^2) = -(n+1) conj(z)^n
    assert np.allclose(col, -(n + 1) * np.conj(z[0]) ** n)


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.get_backend("fortran")


def test_env_forces_fallback():
    code = "from bergman_toeplitz import kernels; print(kernels.BACKEND)"
    out = subprocess.run(
        [sys.executable, "-c", code],
        env={"BERGMAN_TOEPLITZ_PURE_PYTHON": "1", "PATH": ""},
        capture_output=True,
        text=True,
        check=True,
    )
    assert out.stdout.strip() == "python"
