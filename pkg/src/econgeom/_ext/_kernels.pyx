# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled exchange kernels; see ``_pykernels`` for the reference loops."""

from libc.stdint cimport int64_t


def random_split(int64_t[::1] m, const int64_t[::1] i, const int64_t[::1] j, const double[::1] u):
    cdef Py_ssize_t k, n = i.shape[0]
    cdef int64_t a, b, pool, share
    with nogil:
        for k in range(n):
            a = i[k]
            b = j[k]
            pool = m[a] + m[b]
            share = <int64_t>(u[k] * <double>(pool + 1))
            if share > pool:
                share = pool
            m[a] = share
            m[b] = pool - share


def fixed_delta(int64_t[::1] m, const int64_t[::1] i, const int64_t[::1] j, int64_t delta):
    cdef Py_ssize_t k, n = i.shape[0]
    cdef int64_t a, b
    with nogil:
        for k in range(n):
            a = i[k]
            b = j[k]
            if m[a] >= delta:
                m[a] -= delta
                m[b] += delta
