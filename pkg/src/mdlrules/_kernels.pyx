# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the bitset kernels in :mod:`mdlrules._fallback`."""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t

cnp.import_array()

cdef extern from *:
    """
    static inline int mdl_popcount(unsigned long long x) { return __builtin_popcountll(x); }
    """
    int mdl_popcount(unsigned long long x) nogil


def class_counts(const uint64_t[:, ::1] covers, const uint64_t[:, ::1] class_masks):
    cdef Py_ssize_t n_cand = covers.shape[0], n_words = covers.shape[1]
    cdef Py_ssize_t n_cls = class_masks.shape[0]
    cdef cnp.ndarray[int64_t, ndim=2] out = np.zeros((n_cand, n_cls), dtype=np.int64)
    cdef int64_t[:, ::1] o = out
    cdef Py_ssize_t c, k, w
    cdef int64_t acc
    with nogil:
        for c in range(n_cand):
            for k in range(n_cls):
                acc = 0
                for w in range(n_words):
                    acc += mdl_popcount(covers[c, w] & class_masks[k, w])
                o[c, k] = acc
    return out


def subtract_and_count(uint64_t[:, ::1] covers, const uint64_t[::1] mask,
                       const uint64_t[:, ::1] class_masks, int64_t[:, ::1] counts):
    """covers[c] &= ~mask for every row, then refresh counts in place.

    Returns a uint8 flag per row telling whether the row changed.
    """
    cdef Py_ssize_t n_cand = covers.shape[0], n_words = covers.shape[1]
    cdef Py_ssize_t n_cls = class_masks.shape[0]
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] changed = np.zeros(n_cand, dtype=np.uint8)
    cdef cnp.uint8_t[::1] ch = changed
    cdef Py_ssize_t c, k, w
    cdef uint64_t hit, v
    cdef int64_t acc
    with nogil:
        for c in range(n_cand):
            hit = 0
            for w in range(n_words):
                hit |= covers[c, w] & mask[w]
            if hit == 0:
                continue
            ch[c] = 1
            for w in range(n_words):
                covers[c, w] = covers[c, w] & ~mask[w]
            for k in range(n_cls):
                acc = 0
                for w in range(n_words):
                    acc += mdl_popcount(covers[c, w] & class_masks[k, w])
                counts[c, k] = acc
    return changed


def block_lengths(const int64_t[:, ::1] counts, const double[::1] per_class,
                  const double[::1] total):
    cdef Py_ssize_t n = counts.shape[0], n_cls = counts.shape[1]
    cdef cnp.ndarray[double, ndim=1] out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t i, k
    cdef int64_t u
    cdef double s
    with nogil:
        for i in range(n):
            u = 0
            s = 0.0
            for k in range(n_cls):
                u += counts[i, k]
                s += per_class[counts[i, k]]
            o[i] = total[u] - s
    return out
