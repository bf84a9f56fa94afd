# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the functions in ``_pykernels``."""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t, uint8_t

cnp.import_array()

BACKEND = "cython"


cdef inline uint64_t _mix64(uint64_t z) nogil:
    z = z + <uint64_t>0x9E3779B97F4A7C15ULL
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EBULL
    return z ^ (z >> 31)


def mix2(keys, indices):
    cdef const uint64_t[::1] k = np.ascontiguousarray(keys, dtype=np.uint64)
    cdef const uint64_t[::1] ix = np.ascontiguousarray(indices, dtype=np.int64).view(np.uint64)
    cdef Py_ssize_t n = k.shape[0], i
    if ix.shape[0] != n:
        raise ValueError("keys and indices differ in length")
    out = np.empty(n, dtype=np.uint64)
    cdef uint64_t[::1] o = out
    with nogil:
        for i in range(n):
            o[i] = _mix64(k[i] ^ _mix64(ix[i]))
    return out


def uniform_below(words, m):
    cdef const uint64_t[::1] w = np.ascontiguousarray(words, dtype=np.uint64)
    cdef const int64_t[::1] mm = np.ascontiguousarray(m, dtype=np.int64)
    cdef Py_ssize_t n = w.shape[0], i
    if mm.shape[0] != n:
        raise ValueError("words and m differ in length")
    for i in range(n):
        if mm[i] < 1 or mm[i] >= (<int64_t>1 << 32):
            raise ValueError("m must lie in [1, 2**32)")
    out = np.empty(n, dtype=np.int64)
    cdef int64_t[::1] o = out
    with nogil:
        for i in range(n):
            o[i] = <int64_t>(((w[i] >> 32) * <uint64_t>mm[i]) >> 32)
    return out


def sumset_shift_or(a_offsets, b_words, Py_ssize_t nbits):
    cdef const int64_t[::1] a = np.ascontiguousarray(a_offsets, dtype=np.int64)
    cdef const uint64_t[::1] b = np.ascontiguousarray(b_words, dtype=np.uint64)
    cdef Py_ssize_t nw = (nbits + 63) // 64, nb = b.shape[0]
    out = np.zeros(nw, dtype=np.uint64)
    cdef uint64_t[::1] o = out
    cdef Py_ssize_t i, j, q, dst
    cdef int r
    cdef uint64_t x
    with nogil:
        for i in range(a.shape[0]):
            q = a[i] >> 6
            r = a[i] & 63
            for j in range(nb):
                x = b[j]
                if x == 0:
                    continue
                dst = j + q
                if dst < nw:
                    o[dst] |= x << r
                if r and dst + 1 < nw:
                    o[dst + 1] |= x >> (64 - r)
        if nbits & 63:
            o[nw - 1] &= (<uint64_t>1 << (nbits & 63)) - 1
    return out


def sumset_naive(a_in, b_in):
    cdef const int64_t[::1] a = np.ascontiguousarray(a_in, dtype=np.int64)
    cdef const int64_t[::1] b = np.ascontiguousarray(b_in, dtype=np.int64)
    cdef Py_ssize_t na = a.shape[0], nb = b.shape[0], i, j
    if na == 0 or nb == 0:
        return np.empty(0, dtype=np.int64)
    cdef int64_t amin = a[0], amax = a[0], bmin = b[0], bmax = b[0]
    for i in range(na):
        if a[i] < amin: amin = a[i]
        if a[i] > amax: amax = a[i]
    for j in range(nb):
        if b[j] < bmin: bmin = b[j]
        if b[j] > bmax: bmax = b[j]
    cdef int64_t base = amin + bmin
    marks = np.zeros(amax + bmax - base + 1, dtype=np.uint8)
    cdef uint8_t[::1] mk = marks
    with nogil:
        for i in range(na):
            for j in range(nb):
                mk[a[i] + b[j] - base] = 1
    return np.nonzero(marks)[0].astype(np.int64) + base


def translate_hits(dense_in, offsets_in, Py_ssize_t start, Py_ssize_t stop):
    cdef const uint8_t[::1] d = np.ascontiguousarray(dense_in, dtype=np.uint8)
    cdef const int64_t[::1] off = np.ascontiguousarray(offsets_in, dtype=np.int64)
    cdef Py_ssize_t no = off.shape[0], i, p, n
    cdef int64_t omax = 0
    for i in range(no):
        if off[i] > omax:
            omax = off[i]
    if stop > d.shape[0] - omax:
        stop = d.shape[0] - omax
    if stop <= start:
        return np.empty(0, dtype=np.int64)
    n = stop - start
    acc = np.ones(n, dtype=np.uint8)
    cdef uint8_t[::1] ac = acc
    cdef uint8_t* dst = &ac[0]
    cdef const uint8_t* src
    hits = np.empty(n, dtype=np.int64)
    cdef int64_t[::1] h = hits
    cdef Py_ssize_t nh = 0
    # one branch-free pass per offset; random data defeats early exits
    with nogil:
        for i in range(no):
            src = &d[start + off[i]]
            for p in range(n):
                dst[p] &= src[p]
        for p in range(n):
            h[nh] = start + p
            nh += dst[p]
    return hits[:nh].copy()


def cover_counts(a_dense, b_dense, Py_ssize_t n):
    cdef const uint8_t[::1] a = np.ascontiguousarray(a_dense, dtype=np.uint8)
    cdef const uint8_t[::1] b = np.ascontiguousarray(b_dense, dtype=np.uint8)
    out = np.zeros(n, dtype=np.int64)
    cdef int64_t[::1] o = out
    cdef Py_ssize_t i, j, top, na = a.shape[0], nb = b.shape[0]
    with nogil:
        for i in range(min(na, n)):
            if not a[i]:
                continue
            top = min(nb, n - i)
            for j in range(top):
                o[i + j] += b[j]
    return out
