"""Compiled kernels.

Mirrors _core_py operation for operation; see the note there on why the
accumulation order and the explicit reciprocal formula must not change.
Complex arrays are addressed through their interleaved (re, im) layout.
"""

import numpy as np

cimport cython
cimport numpy as cnp

cnp.import_array()

BACKEND = "cython"


@cython.boundscheck(False)
@cython.wraparound(False)
def pop_step_values(cnp.complex128_t[::1] pool, cnp.int64_t[::1] idx,
                    cnp.float64_t[::1] w, double energy, double eta, int k):
    cdef Py_ssize_t n = w.shape[0]
    out_arr = np.empty(n, dtype=np.complex128)
    cdef cnp.complex128_t[::1] out = out_arr
    cdef double* pf = <double*> &pool[0]
    cdef double* of = <double*> &out[0]
    cdef Py_ssize_t i, j, base, p
    cdef double acc_re, acc_im, dre, dim, a2
    with nogil:
        for i in range(n):
            base = i * k
            p = idx[base]
            acc_re = pf[2 * p]
            acc_im = pf[2 * p + 1]
            for j in range(1, k):
                p = idx[base + j]
                acc_re = acc_re + pf[2 * p]
                acc_im = acc_im + pf[2 * p + 1]
            dre = (w[i] - energy) - acc_re
            dim = (-eta) - acc_im
            a2 = dre * dre + dim * dim
            of[2 * i] = dre / a2
            of[2 * i + 1] = (-dim) / a2
    return out_arr


@cython.boundscheck(False)
@cython.wraparound(False)
def tree_sweep(cnp.float64_t[::1] w, double energy, double eta, int k,
               cnp.int64_t[::1] offsets):
    cdef Py_ssize_t nv = w.shape[0]
    out_arr = np.empty(nv, dtype=np.complex128)
    cdef cnp.complex128_t[::1] out = out_arr
    cdef double* of = <double*> &out[0]
    cdef Py_ssize_t n_levels = offsets.shape[0] - 1
    cdef Py_ssize_t d, i, j, lo, hi, child_lo, base
    cdef double acc_re, acc_im, dre, dim, a2
    with nogil:
        for d in range(n_levels - 1, -1, -1):
            lo = offsets[d]
            hi = offsets[d + 1]
            if d == n_levels - 1:
                for i in range(lo, hi):
                    dre = (w[i] - energy) - 0.0
                    dim = (-eta) - 0.0
                    a2 = dre * dre + dim * dim
                    of[2 * i] = dre / a2
                    of[2 * i + 1] = (-dim) / a2
            else:
                child_lo = offsets[d + 1]
                for i in range(lo, hi):
                    base = child_lo + (i - lo) * k
                    acc_re = of[2 * base]
                    acc_im = of[2 * base + 1]
                    for j in range(1, k):
                        acc_re = acc_re + of[2 * (base + j)]
                        acc_im = acc_im + of[2 * (base + j) + 1]
                    dre = (w[i] - energy) - acc_re
                    dim = (-eta) - acc_im
                    a2 = dre * dre + dim * dim
                    of[2 * i] = dre / a2
                    of[2 * i + 1] = (-dim) / a2
    return out_arr


@cython.boundscheck(False)
@cython.wraparound(False)
def chain_many(cnp.float64_t[:, ::1] w, double energy, double eta, int k):
    cdef Py_ssize_t m = w.shape[0]
    cdef Py_ssize_t r = w.shape[1]
    out_arr = np.empty(r, dtype=np.complex128)
    cdef cnp.complex128_t[::1] out = out_arr
    cdef double* of = <double*> &out[0]
    cdef double kf = <double> k
    cdef Py_ssize_t step, i
    cdef double dre, dim, a2
    # step-outer so both w rows and the state array stream contiguously
    with nogil:
        for i in range(r):
            of[2 * i] = 0.0
            of[2 * i + 1] = 0.0
        for step in range(m):
            for i in range(r):
                dre = (w[step, i] - energy) - (kf * of[2 * i])
                dim = (-eta) - (kf * of[2 * i + 1])
                a2 = dre * dre + dim * dim
                of[2 * i] = dre / a2
                of[2 * i + 1] = (-dim) / a2
    return out_arr
