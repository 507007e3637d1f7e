# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled Mobius-power recurrences.

Both functions return monomial coefficients of ``phi_z**j * phi_z' / (1-|z|^2)``
where ``phi_z(w) = (z - w)/(1 - conj(z) w)``.  Multiplication by ``phi_z`` is
carried out as the first-order recurrence

    G[m] = conj(z) G[m-1] + z F[m] - F[m-1]

which is exact on the first N coefficients and never forms large binomials.
"""
import numpy as np

ctypedef double complex cplx


cdef inline void _seed(cplx[::1] buf, cplx zb, Py_ssize_t N) noexcept nogil:
    cdef Py_ssize_t m
    cdef cplx p = 1.0
    for m in range(N):
        buf[m] = -(m + 1) * p
        p = p * zb


cdef inline void _times_phi(cplx[::1] buf, cplx zi, cplx zb, Py_ssize_t N) noexcept nogil:
    cdef Py_ssize_t m
    cdef cplx g = 0.0
    cdef cplx prev_f = 0.0
    cdef cplx cur_f
    for m in range(N):
        cur_f = buf[m]
        g = zb * g + zi * cur_f - prev_f
        prev_f = cur_f
        buf[m] = g


def fused_column(z, int k, int N):
    cdef const cplx[::1] zz = np.ascontiguousarray(np.ravel(z), dtype=np.complex128)
    cdef Py_ssize_t nz = zz.shape[0]
    out = np.empty((nz, N), dtype=np.complex128)
    cdef cplx[:, ::1] o = out
    cdef cplx[::1] buf = np.empty(N, dtype=np.complex128)
    cdef Py_ssize_t i, m
    cdef int j
    cdef cplx zi, zb
    with nogil:
        for i in range(nz):
            zi = zz[i]
            zb = zi.conjugate()
            _seed(buf, zb, N)
            for j in range(k):
                _times_phi(buf, zi, zb, N)
            for m in range(N):
                o[i, m] = buf[m]
    return out


def fused_columns(z, int ncols, int N):
    cdef const cplx[::1] zz = np.ascontiguousarray(np.ravel(z), dtype=np.complex128)
    cdef Py_ssize_t nz = zz.shape[0]
    out = np.empty((nz, ncols, N), dtype=np.complex128)
    cdef cplx[:, :, ::1] o = out
    cdef cplx[::1] buf = np.empty(N, dtype=np.complex128)
    cdef Py_ssize_t i, m
    cdef int j
    cdef cplx zi, zb
    with nogil:
        for i in range(nz):
            zi = zz[i]
            zb = zi.conjugate()
            _seed(buf, zb, N)
            for j in range(ncols):
                if j > 0:
                    _times_phi(buf, zi, zb, N)
                for m in range(N):
                    o[i, j, m] = buf[m]
    return out
