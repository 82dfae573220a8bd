# cython: language_level=3
"""Compiled exact k-nearest-neighbour search.

Brute force over all reference rows, keeping a sorted buffer of the k best
candidates per query. Equal distances keep the lower reference index first,
which matches the stable ordering of the numpy fallback.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, INFINITY

cnp.import_array()


def knn_search(const double[:, ::1] Q, const double[:, ::1] R, Py_ssize_t k,
               const long long[::1] q_ids, const long long[::1] r_ids):
    cdef Py_ssize_t nq = Q.shape[0]
    cdef Py_ssize_t nr = R.shape[0]
    cdef Py_ssize_t p = Q.shape[1]
    cdef Py_ssize_t i, j, h, pos
    cdef double acc, diff, qv

    dist_arr = np.empty((nq, k), dtype=np.float64)
    idx_arr = np.empty((nq, k), dtype=np.int64)
    cdef double[:, ::1] dist = dist_arr
    cdef long long[:, ::1] idx = idx_arr
    cdef double[::1] bd = np.empty(k, dtype=np.float64)
    cdef long long[::1] bi = np.empty(k, dtype=np.int64)
    cdef Py_ssize_t filled

    with nogil:
        for i in range(nq):
            filled = 0
            for j in range(k):
                bd[j] = INFINITY
                bi[j] = -1
            for j in range(nr):
                if r_ids[j] == q_ids[i]:
                    continue
                acc = 0.0
                for h in range(p):
                    diff = Q[i, h] - R[j, h]
                    acc = acc + diff * diff
                if filled == k and acc >= bd[k - 1]:
                    continue
                # insertion keeps (distance, index) order; strict < keeps ties stable
                pos = filled if filled < k else k - 1
                while pos > 0 and acc < bd[pos - 1]:
                    bd[pos] = bd[pos - 1]
                    bi[pos] = bi[pos - 1]
                    pos -= 1
                bd[pos] = acc
                bi[pos] = j
                if filled < k:
                    filled += 1
            for j in range(k):
                dist[i, j] = sqrt(bd[j])
                idx[i, j] = bi[j]
    return dist_arr, idx_arr
