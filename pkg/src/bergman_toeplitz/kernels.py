"""Backend selection for the hot recurrences.

The compiled extension is used when it imports; set
``BERGMAN_TOEPLITZ_PURE_PYTHON=1`` to force the numpy fallback.
"""
import os

from . import _kernels_py

_impl = _kernels_py
BACKEND = "python"

if not os.environ.get("BERGMAN_TOEPLITZ_PURE_PYTHON"):
    try:
        from . import _kernels as _compiled
    except ImportError:
        _compiled = None
    else:
        _impl = _compiled
        BACKEND = "compiled"
else:
    _compiled = None


def available_backends():
    names = ["python"]
    if _compiled is not None:
        names.append("compiled")
    return names


def get_backend(name):
    if name == "python":
        return _kernels_py
    if name == "compiled":
        if _compiled is None:
            raise ImportError("compiled kernels are not built")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")


def fused_column(z, k, N):
    """Coefficients of ``phi_z**k phi_z' / (1-|z|^2)``, shape ``(len(z), N)``."""
    return _impl.fused_column(z, int(k), int(N))


def fused_columns(z, ncols, N):
    """Same for every power ``j < ncols``, shape ``(len(z), ncols, N)``."""
    return _impl.fused_columns(z, int(ncols), int(N))
