# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Cython implementations of the hot numerical kernels.

Same contracts as creepgp._kernels_py; selected by creepgp.backend when the
extension was built.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, pow

cnp.import_array()


def creep_curve(elapsed, double phi0, double beta_h, double n):
    cdef double[::1] dt = np.ascontiguousarray(elapsed, dtype=np.float64)
    cdef Py_ssize_t i, m = dt.shape[0]
    out_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] out = out_arr
    for i in range(m):
        out[i] = phi0 * pow(dt[i] / (beta_h + dt[i]), n)
    return out_arr


def se_kernel_from_sqdist(sqdist, double signal_var, double inv_two_l2):
    cdef double[:, ::1] d2 = np.ascontiguousarray(sqdist, dtype=np.float64)
    cdef Py_ssize_t i, j, rows = d2.shape[0], cols = d2.shape[1]
    out_arr = np.empty((rows, cols), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    for i in range(rows):
        for j in range(cols):
            out[i, j] = signal_var * exp(-d2[i, j] * inv_two_l2)
    return out_arr
