# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops.  Same signatures as ``_kernels_py``."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t, int32_t

cnp.import_array()

BACKEND = "cython"


cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil
    int __builtin_ctzll(unsigned long long) nogil


cdef inline int _popcount(uint64_t x) nogil:
    return __builtin_popcountll(x)


def _binom_table(int v, int t):
    from math import comb
    return np.array([[comb(n, j) for j in range(t + 1)] for n in range(v + 1)], dtype=np.int64)


def translate_images(const int64_t[:, ::1] vals, const int32_t[:, ::1] add, int nwords):
    """Bitsets of ``{vals[i, x] + c}`` for every row ``i`` and every shift ``c``.

    Output row ``i * q + c``.
    """
    cdef Py_ssize_t r = vals.shape[0], q = vals.shape[1]
    out_arr = np.zeros((r * q, nwords), dtype=np.uint64)
    cdef uint64_t[:, ::1] out = out_arr
    cdef Py_ssize_t i, c, x, row
    cdef int32_t y
    with nogil:
        for i in range(r):
            for c in range(q):
                row = i * q + c
                for x in range(q):
                    y = add[vals[i, x], c]
                    out[row, y >> 6] |= (<uint64_t>1) << (y & 63)
    return out_arr


def tsubset_counts(const uint64_t[:, ::1] bits, int v, int t):
    """Counter per t-subset (colex rank) of blocks containing it."""
    cdef Py_ssize_t nb = bits.shape[0], nw = bits.shape[1]
    binom_arr = _binom_table(v, t)
    cdef int64_t[:, ::1] C = binom_arr
    counts_arr = np.zeros(binom_arr[v, t], dtype=np.int64)
    cdef int64_t[::1] counts = counts_arr
    members_arr = np.zeros(v, dtype=np.int64)
    cdef int64_t[::1] mem = members_arr
    idx_arr = np.zeros(t + 1, dtype=np.int64)
    cdef int64_t[::1] idx = idx_arr
    cdef Py_ssize_t b, w, k, a0, a1, a2, j
    cdef uint64_t word
    cdef int64_t r0, r1, r2, rank
    with nogil:
        for b in range(nb):
            k = 0
            for w in range(nw):
                word = bits[b, w]
                while word:
                    mem[k] = w * 64 + __builtin_ctzll(word)
                    k += 1
                    word &= word - 1
            if k < t:
                continue
            if t == 1:
                for a0 in range(k):
                    counts[mem[a0]] += 1
            elif t == 2:
                for a1 in range(1, k):
                    r1 = C[mem[a1], 2]
                    for a0 in range(a1):
                        counts[r1 + mem[a0]] += 1
            elif t == 3:
                for a2 in range(2, k):
                    r2 = C[mem[a2], 3]
                    for a1 in range(1, a2):
                        r1 = r2 + C[mem[a1], 2]
                        for a0 in range(a1):
                            counts[r1 + mem[a0]] += 1
            else:
                # generic odometer over index tuples idx[0] < ... < idx[t-1]
                for j in range(t):
                    idx[j] = j
                while True:
                    rank = 0
                    for j in range(t):
                        rank += C[mem[idx[j]], j + 1]
                    counts[rank] += 1
                    j = 0
                    while j < t - 1 and idx[j] + 1 == idx[j + 1]:
                        idx[j] = j
                        j += 1
                    if j == t - 1 and idx[j] + 1 == k:
                        break
                    idx[j] += 1
    return counts_arr


def intersection_profile(const uint64_t[:, ::1] bits, int kmax):
    """Row ``i`` is the histogram of ``|B_i & B_j|`` over ``j != i``."""
    cdef Py_ssize_t nb = bits.shape[0], nw = bits.shape[1]
    prof_arr = np.zeros((nb, kmax + 1), dtype=np.int64)
    cdef int64_t[:, ::1] prof = prof_arr
    cdef Py_ssize_t i, j, w
    cdef int s
    with nogil:
        for i in range(nb):
            for j in range(i + 1, nb):
                s = 0
                for w in range(nw):
                    s += _popcount(bits[i, w] & bits[j, w])
                prof[i, s] += 1
                prof[j, s] += 1
    return prof_arr


def count_supersets(const uint64_t[:, ::1] bits, const uint64_t[:, ::1] masks):
    """For each mask, the number of rows of ``bits`` containing it."""
    cdef Py_ssize_t nb = bits.shape[0], nw = bits.shape[1], nm = masks.shape[0]
    out_arr = np.zeros(nm, dtype=np.int64)
    cdef int64_t[::1] out = out_arr
    cdef Py_ssize_t i, b, w
    cdef int64_t n
    cdef bint ok
    with nogil:
        for i in range(nm):
            n = 0
            for b in range(nb):
                ok = True
                for w in range(nw):
                    if bits[b, w] & masks[i, w] != masks[i, w]:
                        ok = False
                        break
                if ok:
                    n += 1
            out[i] = n
    return out_arr


def fwht(a):
    """Unnormalised Walsh-Hadamard transform of a length-2^n integer vector."""
    out_arr = np.array(a, dtype=np.int64, copy=True)
    cdef int64_t[::1] x = out_arr
    cdef Py_ssize_t n = x.shape[0], h = 1, i, j
    cdef int64_t u, w
    if n & (n - 1):
        raise ValueError("length must be a power of two")
    with nogil:
        while h < n:
            i = 0
            while i < n:
                for j in range(i, i + h):
                    u = x[j]
                    w = x[j + h]
                    x[j] = u + w
                    x[j + h] = u - w
                i += 2 * h
            h *= 2
    return out_arr


def permute_points(const uint64_t[:, ::1] bits, const int64_t[::1] perm):
    """Image of every row under the point map ``x -> perm[x]``."""
    cdef Py_ssize_t nb = bits.shape[0], nw = bits.shape[1], b, w
    out_arr = np.zeros((nb, nw), dtype=np.uint64)
    cdef uint64_t[:, ::1] out = out_arr
    cdef uint64_t word
    cdef int64_t y
    with nogil:
        for b in range(nb):
            for w in range(nw):
                word = bits[b, w]
                while word:
                    y = perm[w * 64 + __builtin_ctzll(word)]
                    out[b, y >> 6] |= (<uint64_t>1) << (y & 63)
                    word &= word - 1
    return out_arr
