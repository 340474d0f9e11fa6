# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: batch |.|^p power sums over an affine chart and
batch top-t / tail sparsity-weight ratios. Mirrors _kernels_py exactly;
backend.py selects between the two at import time."""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, fabs, pow

cnp.import_array()

BACKEND_NAME = "compiled"


def affine_power_sums(object origin, object basis, object coeffs,
                      double p, double zero_tol):
    """sum_i |origin_i + (basis @ c)_i|^p per coefficient row; p = 0 counts
    entries with magnitude strictly above the absolute threshold zero_tol,
    and for p > 0 entries at or below zero_tol contribute exactly 0 (pass
    zero_tol = 0.0 for the raw power sum)."""
    cdef const double[::1] org = np.ascontiguousarray(origin, dtype=np.float64)
    cdef const double[:, ::1] bas = np.ascontiguousarray(basis, dtype=np.float64)
    cdef const double[:, ::1] cfs = np.ascontiguousarray(coeffs, dtype=np.float64)
    cdef Py_ssize_t m = org.shape[0]
    cdef Py_ssize_t d = bas.shape[1]
    cdef Py_ssize_t k = cfs.shape[0]
    out_arr = np.empty(k, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, j, r
    cdef double val, acc
    cdef bint count_mode = (p == 0.0)
    for r in range(k):
        acc = 0.0
        for i in range(m):
            val = org[i]
            for j in range(d):
                val += bas[i, j] * cfs[r, j]
            val = fabs(val)
            if count_mode:
                if val > zero_tol:
                    acc += 1.0
            elif val > zero_tol:
                acc += pow(val, p)
        out[r] = acc
    return out_arr


def sparsity_ratio_max(object vectors, double p, int t, double zero_rel):
    """Largest (sum of t largest weights) / (sum of the rest) over rows,
    with weights |v_i|^p (p > 0) or a relative-threshold indicator (p = 0).
    Returns (first argmax row index, max ratio); 0.0 for empty-top rows,
    +inf when a row's tail weight vanishes while its top does not."""
    cdef const double[:, ::1] vec = np.ascontiguousarray(vectors, dtype=np.float64)
    cdef Py_ssize_t k = vec.shape[0]
    cdef Py_ssize_t m = vec.shape[1]
    cdef Py_ssize_t tt = t
    if tt <= 0:
        return 0, 0.0
    if tt > m:
        tt = m
    w_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] w = w_arr
    cdef Py_ssize_t i, r, a, arg
    cdef double av, mx, thresh, total, top, rest, ratio, best, tmp
    cdef Py_ssize_t best_idx = 0
    best = -1.0
    for r in range(k):
        mx = 0.0
        for i in range(m):
            av = fabs(vec[r, i])
            w[i] = av
            if av > mx:
                mx = av
        total = 0.0
        if p == 0.0:
            thresh = zero_rel * mx
            for i in range(m):
                w[i] = 1.0 if w[i] > thresh else 0.0
                total += w[i]
        else:
            for i in range(m):
                w[i] = pow(w[i], p)
                total += w[i]
        top = 0.0
        for a in range(tt):
            arg = a
            for i in range(a + 1, m):
                if w[i] > w[arg]:
                    arg = i
            tmp = w[arg]
            w[arg] = w[a]
            w[a] = tmp
            top += tmp
        rest = total - top
        if rest < 0.0:
            rest = 0.0
        if top <= 0.0:
            ratio = 0.0
        elif rest <= 0.0:
            ratio = INFINITY
        else:
            ratio = top / rest
        if ratio > best:
            best = ratio
            best_idx = r
    return best_idx, best
