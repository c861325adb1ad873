# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled twin of ``_pykernels``; int64 time, uint64 words (width <= 63)."""

import numpy as np
cimport numpy as cnp

ctypedef long long i64
ctypedef unsigned long long u64


cdef inline Py_ssize_t _right(const i64[:] a, i64 x) noexcept nogil:
    cdef Py_ssize_t lo = 0, hi = a.shape[0], mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if x < a[mid]:
            hi = mid
        else:
            lo = mid + 1
    return lo


cdef inline Py_ssize_t _left(const i64[:] a, i64 x) noexcept nogil:
    cdef Py_ssize_t lo = 0, hi = a.shape[0], mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if a[mid] < x:
            lo = mid + 1
        else:
            hi = mid
    return lo


def eval_many(const i64[:] times, const u64[:] words, u64 init, const i64[:] probes, bint left):
    cdef Py_ssize_t n = probes.shape[0], k, i
    out = np.empty(n, dtype=np.uint64)
    cdef u64[:] o = out
    with nogil:
        for k in range(n):
            i = _left(times, probes[k]) if left else _right(times, probes[k])
            o[k] = words[i - 1] if i else init
    return out


def fold_many(const i64[:] times, const u64[:] words, u64 init,
              const i64[:] lo, const i64[:] hi, bint hi_closed, u64 mask):
    cdef Py_ssize_t n = lo.shape[0], k, i, j, m
    cdef u64 meet, join
    meets = np.empty(n, dtype=np.uint64)
    joins = np.empty(n, dtype=np.uint64)
    cdef u64[:] mo = meets
    cdef u64[:] jo = joins
    with nogil:
        for k in range(n):
            if hi[k] < lo[k] or (hi[k] == lo[k] and not hi_closed):
                mo[k] = mask
                jo[k] = 0
                continue
            i = _right(times, lo[k])
            meet = words[i - 1] if i else init
            join = meet
            j = _right(times, hi[k]) if hi_closed else _left(times, hi[k])
            for m in range(i, j):
                meet &= words[m]
                join |= words[m]
            mo[k] = meet
            jo[k] = join
    return meets, joins


def filter_candidates(const i64[:] piece, const u64[:] lowers, const u64[:] uppers,
                      const u64[:, :] candidates):
    cdef Py_ssize_t c = candidates.shape[0], p = piece.shape[0], r, k
    cdef u64 x
    keep = np.ones(c, dtype=np.bool_)
    cdef cnp.npy_bool[:] kp = keep
    with nogil:
        for r in range(c):
            for k in range(p):
                x = candidates[r, piece[k]]
                if (lowers[k] & ~x) or (x & ~uppers[k]):
                    kp[r] = 0
                    break
    return keep


def disagreement_gaps(const i64[:] times, const u64[:] words, u64 init, const i64[:] probes):
    cdef Py_ssize_t n = probes.shape[0], k, i, m
    cdef u64 cur, prev
    cdef i64 gap
    out = np.empty(n, dtype=np.int64)
    cdef i64[:] o = out
    with nogil:
        for k in range(n):
            i = _left(times, probes[k])
            cur = words[i - 1] if i else init
            if cur:
                o[k] = 0
                continue
            gap = -1
            m = i - 1
            while m >= 0:
                prev = words[m - 1] if m else init
                if prev:
                    gap = probes[k] - times[m]
                    break
                m -= 1
            o[k] = gap
    return out
