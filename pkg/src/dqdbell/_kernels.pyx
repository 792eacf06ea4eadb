# cython: language_level=3
"""Compiled versions of the kernels in ``_fallback``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin

cnp.import_array()


def energy_table(const double[:, ::1] J):
    cdef Py_ssize_t n = J.shape[0]
    cdef Py_ssize_t npair = 0, j, k, q
    cdef long long idx, size = 1LL << n
    cdef double e
    out = np.empty(size, dtype=np.float64)
    cdef double[::1] E = out
    if n == 0:
        E[0] = 0.0
        return out
    pj = np.empty(n * n, dtype=np.int64)
    pk = np.empty(n * n, dtype=np.int64)
    pv = np.empty(n * n, dtype=np.float64)
    cdef long long[::1] PJ = pj
    cdef long long[::1] PK = pk
    cdef double[::1] PV = pv
    for j in range(n):
        for k in range(j + 1, n):
            if J[j, k] != 0.0:
                PJ[npair] = j
                PK[npair] = k
                PV[npair] = J[j, k]
                npair += 1
    with nogil:
        for idx in range(size):
            e = 0.0
            for q in range(npair):
                if ((idx >> PJ[q]) ^ (idx >> PK[q])) & 1:
                    e -= PV[q]
                else:
                    e += PV[q]
            E[idx] = e
    return out


def reduced_pair_series(c0, E, times, double hbar):
    cdef const double complex[::1] C = np.ascontiguousarray(c0, dtype=np.complex128)
    cdef const double[::1] En = np.ascontiguousarray(E, dtype=np.float64)
    cdef const double[::1] T = np.ascontiguousarray(times, dtype=np.float64)
    cdef Py_ssize_t nt = T.shape[0], size = C.shape[0], nblk = size // 4
    cdef Py_ssize_t it, p, i, j, l
    # rho row for low-bit index l = m_A + 2 m_B is 2 m_A + m_B
    cdef int order[4]
    order[0] = 0; order[1] = 2; order[2] = 1; order[3] = 3
    cdef double ph
    cdef double complex a[4]
    cdef double complex acc[4][4]
    out = np.empty((nt, 4, 4), dtype=np.complex128)
    cdef double complex[:, :, ::1] R = out
    if size % 4:
        raise ValueError("state length must be a multiple of 4")
    with nogil:
        for it in range(nt):
            for i in range(4):
                for j in range(4):
                    acc[i][j] = 0
            for p in range(nblk):
                for l in range(4):
                    ph = -En[4 * p + l] * T[it] / hbar
                    a[order[l]] = C[4 * p + l] * (cos(ph) + 1j * sin(ph))
                for i in range(4):
                    for j in range(i, 4):
                        acc[i][j] = acc[i][j] + a[i] * a[j].conjugate()
            for i in range(4):
                for j in range(i, 4):
                    R[it, i, j] = acc[i][j]
                    R[it, j, i] = acc[i][j].conjugate()
    return out
