# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel for the truncated-Taylor (jet) product.

The product of two jets is a sparse convolution over pairs of multi-indices
whose degrees sum to at most the truncation order.  The pair table is
precomputed once per (nvars, order) and passed in as three flat index arrays.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()

BACKEND = "compiled"


def mul_into(double[::1] a, double[::1] b, double[::1] out,
             int[::1] ti, int[::1] tj, int[::1] tk):
    """out[tk[t]] += a[ti[t]] * b[tj[t]] over the whole pair table.

    ``out`` must be zeroed by the caller.
    """
    cdef Py_ssize_t t, n = ti.shape[0]
    with nogil:
        for t in range(n):
            out[tk[t]] += a[ti[t]] * b[tj[t]]


def mul_many(double[:, ::1] a, double[:, ::1] b, double[:, ::1] out,
             int[::1] ti, int[::1] tj, int[::1] tk):
    """Row-batched variant: out[r] = a[r] * b[r] as jets, for every row r."""
    cdef Py_ssize_t t, r, n = ti.shape[0], m = a.shape[0]
    with nogil:
        for r in range(m):
            for t in range(n):
                out[r, tk[t]] += a[r, ti[t]] * b[r, tj[t]]
