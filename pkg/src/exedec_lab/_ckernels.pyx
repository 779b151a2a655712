# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled versions of the kernels in ``_pykernels``."""

from libc.stdlib cimport malloc, free


cdef long long SAT = 2147483648


cdef inline long long _sat(long long v):
    if v > SAT:
        return SAT
    if v < -SAT:
        return -SAT
    return v


cdef inline long long _pair(int code, long long a, long long b):
    a = _sat(a)
    b = _sat(b)
    if code == 0:
        return _sat(a + b)
    if code == 1:
        return _sat(a - b)
    if code == 2:
        return _sat(a * b)
    if code == 3:
        return a if a < b else b
    return a if a > b else b


def scanl1(int code, xs):
    cdef Py_ssize_t n = len(xs), i
    cdef long long acc
    out = []
    if n == 0:
        return out
    acc = _sat(xs[0])
    out.append(acc)
    for i in range(1, n):
        acc = _pair(code, acc, xs[i])
        out.append(acc)
    return out


def zip_with(int code, xs, ys):
    cdef Py_ssize_t n = min(len(xs), len(ys)), i
    return [_pair(code, xs[i], ys[i]) for i in range(n)]


def lcs_length(a, b):
    cdef Py_ssize_t n = len(a), m = len(b), i, j
    if n == 0 or m == 0:
        return 0
    cdef long *prev = <long *> malloc((m + 1) * sizeof(long))
    cdef long *cur = <long *> malloc((m + 1) * sizeof(long))
    cdef long *tmp
    cdef long result
    bl = list(b)
    try:
        for j in range(m + 1):
            prev[j] = 0
        for i in range(n):
            x = a[i]
            cur[0] = 0
            for j in range(m):
                if x == bl[j]:
                    cur[j + 1] = prev[j] + 1
                elif cur[j] > prev[j + 1]:
                    cur[j + 1] = cur[j]
                else:
                    cur[j + 1] = prev[j + 1]
            tmp = prev
            prev = cur
            cur = tmp
        result = prev[m]
    finally:
        free(prev)
        free(cur)
    return result


def levenshtein(str a, str b):
    cdef Py_ssize_t n = len(a), m = len(b), i, j
    if n == 0:
        return m
    if m == 0:
        return n
    cdef long *prev = <long *> malloc((m + 1) * sizeof(long))
    cdef long *cur = <long *> malloc((m + 1) * sizeof(long))
    cdef long *tmp
    cdef long best, c
    cdef Py_UCS4 x
    cdef long result
    try:
        for j in range(m + 1):
            prev[j] = j
        for i in range(n):
            x = a[i]
            cur[0] = i + 1
            for j in range(m):
                best = prev[j] + (0 if x == b[j] else 1)
                c = cur[j] + 1
                if c < best:
                    best = c
                c = prev[j + 1] + 1
                if c < best:
                    best = c
                cur[j + 1] = best
            tmp = prev
            prev = cur
            cur = tmp
        result = prev[m]
    finally:
        free(prev)
        free(cur)
    return result


def common_prefix(a, b):
    cdef Py_ssize_t n = min(len(a), len(b)), i = 0
    while i < n and a[i] == b[i]:
        i += 1
    return i
