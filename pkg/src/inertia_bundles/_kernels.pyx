# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled batch kernels for small dense symmetric matrices.

Mirrors :mod:`inertia_bundles._kernels_py` operation for operation, so both
backends agree to the last bit on platforms without fused multiply-add.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs, frexp, ldexp, INFINITY

cnp.import_array()


cdef int _jacobi_one(double[:, ::1] a, double[:, ::1] v, double rel_tol,
                     int max_sweeps) noexcept nogil:
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i, j, k, p, q
    cdef double fro2 = 0.0, off2, thresh
    cdef double apq, app, aqq, theta, t, c, s, x, y
    cdef int sweep

    for i in range(n):
        for j in range(n):
            fro2 = fro2 + a[i, j] * a[i, j]
    thresh = rel_tol * sqrt(fro2)

    for i in range(n):
        for j in range(n):
            v[i, j] = 1.0 if i == j else 0.0

    for sweep in range(max_sweeps + 1):
        off2 = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off2 = off2 + a[p, q] * a[p, q]
        off2 = 2.0 * off2
        if off2 == 0.0 or sqrt(off2) < thresh:
            return sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                app = a[p, p]
                aqq = a[q, q]
                theta = (aqq - app) / (2.0 * apq)
                t = 1.0 / (fabs(theta) + sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    x = a[k, p]
                    y = a[k, q]
                    a[k, p] = c * x - s * y
                    a[k, q] = s * x + c * y
                for k in range(n):
                    x = a[p, k]
                    y = a[q, k]
                    a[p, k] = c * x - s * y
                    a[q, k] = s * x + c * y
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(n):
                    x = v[k, p]
                    y = v[k, q]
                    v[k, p] = c * x - s * y
                    v[k, q] = s * x + c * y
    return -1


def jacobi_eigh_batch(a_in, double rel_tol, int max_sweeps):
    cdef double[:, :, ::1] a = np.array(a_in, dtype=np.float64, order="C", copy=True)
    cdef Py_ssize_t m = a.shape[0], n = a.shape[1], b, i, j
    v_arr = np.empty((m, n, n), dtype=np.float64)
    w_arr = np.empty((m, n), dtype=np.float64)
    sweeps_arr = np.empty(m, dtype=np.intc)
    cdef double[:, :, ::1] v = v_arr
    cdef double[:, ::1] w = w_arr
    cdef int[::1] sweeps = sweeps_arr
    cdef double amax
    cdef int e
    with nogil:
        for b in range(m):
            # exact power-of-two rescaling keeps the squared norms clear of
            # underflow and overflow
            amax = 0.0
            for i in range(n):
                for j in range(n):
                    if fabs(a[b, i, j]) > amax:
                        amax = fabs(a[b, i, j])
            e = 0
            if amax > 0.0 and amax < INFINITY:
                frexp(amax, &e)
                for i in range(n):
                    for j in range(n):
                        a[b, i, j] = ldexp(a[b, i, j], -e)
            sweeps[b] = _jacobi_one(a[b], v[b], rel_tol, max_sweeps)
            for i in range(n):
                w[b, i] = ldexp(a[b, i, i], e)
    return w_arr, v_arr, sweeps_arr


def cholesky_batch(a_in):
    cdef double[:, :, ::1] a = np.ascontiguousarray(a_in, dtype=np.float64)
    cdef Py_ssize_t m = a.shape[0], n = a.shape[1], b, i, j, k
    l_arr = np.zeros((m, n, n), dtype=np.float64)
    info_arr = np.full(m, -1, dtype=np.intc)
    cdef double[:, :, ::1] l = l_arr
    cdef int[::1] info = info_arr
    cdef double s
    with nogil:
        for b in range(m):
            for i in range(n):
                if info[b] >= 0:
                    break
                for j in range(i + 1):
                    s = a[b, i, j]
                    for k in range(j):
                        s = s - l[b, i, k] * l[b, j, k]
                    if i == j:
                        if s <= 0.0:
                            info[b] = i
                            break
                        l[b, i, i] = sqrt(s)
                    else:
                        l[b, i, j] = s / l[b, j, j]
    return l_arr, info_arr


def tril_inv_batch(l_in):
    cdef double[:, :, ::1] l = np.ascontiguousarray(l_in, dtype=np.float64)
    cdef Py_ssize_t m = l.shape[0], n = l.shape[1], b, i, j, k
    x_arr = np.zeros((m, n, n), dtype=np.float64)
    cdef double[:, :, ::1] x = x_arr
    cdef double s
    with nogil:
        for b in range(m):
            for i in range(n):
                x[b, i, i] = 1.0 / l[b, i, i]
                for j in range(i):
                    s = 0.0
                    for k in range(j, i):
                        s = s + l[b, i, k] * x[b, k, j]
                    x[b, i, j] = -s / l[b, i, i]
    return x_arr
