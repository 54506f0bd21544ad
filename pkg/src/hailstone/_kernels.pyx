# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled per-seed orbit scan.

Same contract as ``hailstone._pykernels.orbit_stats_range``; seeds whose
iterates would overflow int64 are reported with status 2 and recomputed
by the caller with Python integers.
"""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t, int8_t

cnp.import_array()

cdef int64_t INT64_MAX = 9223372036854775807


def orbit_stats_range(int64_t start, int64_t stop, int64_t a, int64_t budget,
                      int64_t min_steps=0):
    cdef Py_ssize_t size = stop - start
    cdef cnp.ndarray[cnp.int64_t, ndim=1] sigma = np.full(size, -1, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] ones = np.zeros(size, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] tmax = np.zeros(size, dtype=np.int64)
    cdef cnp.ndarray[cnp.int8_t, ndim=1] status = np.zeros(size, dtype=np.int8)
    cdef int64_t[::1] sv = sigma
    cdef int64_t[::1] ov = ones
    cdef int64_t[::1] tv = tmax
    cdef int8_t[::1] stv = status
    cdef int64_t limit = (INT64_MAX - 1) // a
    cdef int64_t v, k, o, mx
    cdef Py_ssize_t i
    cdef int8_t st
    with nogil:
        for i in range(size):
            v = start + i
            k = 0
            o = 0
            mx = v
            st = 0
            while True:
                if v == 1 and k >= min_steps:
                    break
                if k >= budget:
                    st = 1
                    break
                if v & 1:
                    if v > limit:
                        st = 2
                        break
                    o += 1
                    v = (a * v + 1) >> 1
                else:
                    v >>= 1
                k += 1
                if v > mx:
                    mx = v
            stv[i] = st
            if st == 0:
                sv[i] = k
                ov[i] = o
            tv[i] = mx
    return sigma, ones, tmax, status
