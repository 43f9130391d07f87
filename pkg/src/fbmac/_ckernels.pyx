# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot loops in :mod:`fbmac._kernels_py`."""

import numpy as np


def min_dual_bound(const double[:, ::1] b, const double[:, ::1] vertices):
    cdef Py_ssize_t n = b.shape[0], m = b.shape[1], nv = vertices.shape[0]
    cdef Py_ssize_t i, v, k
    cdef double best, acc
    out = np.empty(n)
    cdef double[::1] o = out
    for i in range(n):
        best = 1e308
        for v in range(nv):
            acc = 0.0
            for k in range(m):
                acc += vertices[v, k] * b[i, k]
            if acc < best:
                best = acc
        o[i] = best
    return out


def feedback_loop(const double[:, ::1] xi, const double[:, ::1] z,
                  const double[:, ::1] w1, const double[:, ::1] w2,
                  const double[::1] a1, const double[::1] a2,
                  const double[:, ::1] b1, const double[:, ::1] b2):
    cdef Py_ssize_t n = z.shape[0], eta = z.shape[1]
    cdef Py_ssize_t s, l, j
    cdef double s1, s2
    x1 = np.empty((n, eta))
    x2 = np.empty((n, eta))
    y = np.empty((n, eta))
    cdef double[:, ::1] X1 = x1, X2 = x2, Y = y
    cdef double[::1] v1 = np.empty(eta), v2 = np.empty(eta)
    for s in range(n):
        for l in range(eta):
            s1 = a1[l] * xi[s, 0]
            s2 = a2[l] * xi[s, 1]
            for j in range(l):
                s1 += b1[l, j] * v1[j]
                s2 += b2[l, j] * v2[j]
            X1[s, l] = s1
            X2[s, l] = s2
            Y[s, l] = s1 + s2 + z[s, l]
            v1[l] = Y[s, l] + w1[s, l]
            v2[l] = Y[s, l] + w2[s, l]
    return x1, x2, y
