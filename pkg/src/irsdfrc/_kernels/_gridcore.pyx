# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled grid enumeration kernels.

Odometer enumeration over all k^n phase combinations, last element varying
fastest; ties keep the lowest flat index. Semantics match the pure backend.
"""

import numpy as np

from libc.math cimport INFINITY


def grid_max_objective(object tables_in, object m1_in, object b_in, object u_in,
                       double complex v, double w_r, double w_u):
    cdef const double complex[:, ::1] tables = np.ascontiguousarray(tables_in, dtype=complex)
    cdef const double complex[:, ::1] m1 = np.ascontiguousarray(m1_in, dtype=complex)
    cdef const double complex[::1] b = np.ascontiguousarray(b_in, dtype=complex)
    cdef const double complex[::1] u = np.ascontiguousarray(u_in, dtype=complex)
    cdef Py_ssize_t n = tables.shape[0]
    cdef Py_ssize_t k = tables.shape[1]
    cdef Py_ssize_t n_r = m1.shape[0]
    cdef Py_ssize_t i, j, r
    cdef long long total = 1
    for i in range(n):
        total *= k
    cdef long long[::1] digits = np.zeros(n, dtype=np.int64)
    cdef double complex[::1] phi = np.empty(n, dtype=complex)
    for j in range(n):
        phi[j] = tables[j, 0]
    cdef double best = -INFINITY
    cdef long long best_idx = 0
    cdef long long step = 0
    cdef double complex acc, tb, tu
    cdef double r1, val
    while True:
        r1 = 0.0
        for r in range(n_r):
            acc = 0
            for j in range(n):
                acc = acc + m1[r, j] * phi[j]
            r1 += acc.real * acc.real + acc.imag * acc.imag
        tb = 0
        tu = v
        for j in range(n):
            tb = tb + b[j] * phi[j]
            tu = tu + u[j] * phi[j]
        val = w_r * r1 * (tb.real * tb.real + tb.imag * tb.imag) \
            + w_u * (tu.real * tu.real + tu.imag * tu.imag)
        if val > best:
            best = val
            best_idx = step
        step += 1
        if step >= total:
            break
        j = n - 1
        while True:
            digits[j] += 1
            if digits[j] < k:
                phi[j] = tables[j, digits[j]]
                break
            digits[j] = 0
            phi[j] = tables[j, 0]
            j -= 1
    return int(best_idx), float(best)


def grid_max_surrogate(object tables_in, object q_in, object lin_h_in, object lin_t_in,
                       double const_term):
    cdef const double complex[:, ::1] tables = np.ascontiguousarray(tables_in, dtype=complex)
    cdef const double complex[:, ::1] q = np.ascontiguousarray(q_in, dtype=complex)
    cdef const double complex[::1] lin_h = np.ascontiguousarray(lin_h_in, dtype=complex)
    cdef const double complex[::1] lin_t = np.ascontiguousarray(lin_t_in, dtype=complex)
    cdef Py_ssize_t n = tables.shape[0]
    cdef Py_ssize_t k = tables.shape[1]
    cdef Py_ssize_t i, j
    cdef long long total = 1
    for i in range(n):
        total *= k
    cdef long long[::1] digits = np.zeros(n, dtype=np.int64)
    cdef double complex[::1] phi = np.empty(n, dtype=complex)
    for j in range(n):
        phi[j] = tables[j, 0]
    cdef double best = -INFINITY
    cdef long long best_idx = 0
    cdef long long step = 0
    cdef double complex row, lh, lt
    cdef double val
    while True:
        val = const_term
        lh = 0
        lt = 0
        for i in range(n):
            row = 0
            for j in range(n):
                row = row + q[i, j] * phi[j]
            # Re(conj(phi_i) * row_i)
            val += phi[i].real * row.real + phi[i].imag * row.imag
            lh = lh + phi[i].conjugate() * lin_h[i]
            lt = lt + phi[i] * lin_t[i]
        val += lh.real + lt.real
        if val > best:
            best = val
            best_idx = step
        step += 1
        if step >= total:
            break
        j = n - 1
        while True:
            digits[j] += 1
            if digits[j] < k:
                phi[j] = tables[j, digits[j]]
                break
            digits[j] = 0
            phi[j] = tables[j, 0]
            j -= 1
    return int(best_idx), float(best)
