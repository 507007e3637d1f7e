"""Numpy implementation of the Mobius-power recurrences.

Same contract as the compiled ``_kernels`` module; vectorized over the
evaluation points, sequential in the coefficient index.
"""
import numpy as np


def _seed(z, N):
    zb = np.conj(z)[:, None]
    return -(np.arange(N) + 1) * zb ** np.arange(N)


def _times_phi(F, z):
    zb = np.conj(z)
    G = np.empty_like(F)
    G[:, 0] = z * F[:, 0]
    for m in range(1, F.shape[1]):
        G[:, m] = zb * G[:, m - 1] + z * F[:, m] - F[:, m - 1]
    return G


def fused_column(z, k, N):
    z = np.ascontiguousarray(np.ravel(z), dtype=np.complex128)
    F = _seed(z, N)
    for _ in range(k):
        F = _times_phi(F, z)
    return F


def fused_columns(z, ncols, N):
    z = np.ascontiguousarray(np.ravel(z), dtype=np.complex128)
    out = np.empty((z.size, ncols, N), dtype=np.complex128)
    F = _seed(z, N)
    for j in range(ncols):
        if j > 0:
            F = _times_phi(F, z)
        out[:, j, :] = F
    return out
