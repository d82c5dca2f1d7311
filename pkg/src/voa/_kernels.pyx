# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: int64 fast paths with overflow detection.

Every entry point falls back to the exact pure-Python implementation in
``voa._kernels_py`` as soon as an intermediate value leaves int64 range, so
results are always identical to the reference kernels.
"""

from libc.stdlib cimport malloc, free

from voa import _kernels_py

cdef extern from *:
    """
    static inline int voa_mul_ovf(long long a, long long b, long long *r) {
        return __builtin_mul_overflow(a, b, r);
    }
    static inline int voa_sub_ovf(long long a, long long b, long long *r) {
        return __builtin_sub_overflow(a, b, r);
    }
    static inline int voa_add_ovf(long long a, long long b, long long *r) {
        return __builtin_add_overflow(a, b, r);
    }
    """
    int voa_mul_ovf(long long a, long long b, long long *r) nogil
    int voa_sub_ovf(long long a, long long b, long long *r) nogil
    int voa_add_ovf(long long a, long long b, long long *r) nogil

LIMIT = 1 << 62


cdef inline long long _gcd(long long a, long long b) nogil:
    if a < 0:
        a = -a
    if b < 0:
        b = -b
    while b:
        a, b = b, a % b
    return a


cdef inline void _make_primitive(long long *row, Py_ssize_t n) nogil:
    cdef long long g = 0
    cdef Py_ssize_t j
    for j in range(n):
        if row[j]:
            g = _gcd(g, row[j])
            if g == 1:
                return
    if g > 1:
        for j in range(n):
            row[j] //= g


cdef int _combine(long long *dst, long long *src, long long a, long long b,
                  Py_ssize_t n) nogil:
    """dst <- a*dst - b*src; returns 1 on overflow."""
    cdef Py_ssize_t j
    cdef long long x, y
    for j in range(n):
        if voa_mul_ovf(a, dst[j], &x):
            return 1
        if src[j]:
            if voa_mul_ovf(b, src[j], &y):
                return 1
            if voa_sub_ovf(x, y, &x):
                return 1
        dst[j] = x
    return 0


cdef object _rref_c(rows, Py_ssize_t ncols):
    cdef Py_ssize_t nrows = len(rows)
    cdef Py_ssize_t i, j, k, c, sel, rank = 0
    cdef long long v, a, best, pc, f, g
    cdef long long *buf
    cdef long long *tmp
    cdef long long **ptr
    if nrows == 0 or ncols == 0:
        return [], []
    buf = <long long *> malloc(nrows * ncols * sizeof(long long))
    ptr = <long long **> malloc(nrows * sizeof(long long *))
    if buf == NULL or ptr == NULL:
        free(buf)
        free(ptr)
        raise MemoryError()
    pivots = []
    try:
        for i in range(nrows):
            ptr[i] = buf + i * ncols
            row = rows[i]
            for j in range(ncols):
                x = row[j]
                if x >= LIMIT or x <= -LIMIT:
                    return None
                ptr[i][j] = x
        for c in range(ncols):
            if rank == nrows:
                break
            sel = -1
            best = 0
            for i in range(rank, nrows):
                v = ptr[i][c]
                if v:
                    a = v if v > 0 else -v
                    if sel < 0 or a < best:
                        sel = i
                        best = a
                        if a == 1:
                            break
            if sel < 0:
                continue
            tmp = ptr[rank]
            ptr[rank] = ptr[sel]
            ptr[sel] = tmp
            if ptr[rank][c] < 0:
                for j in range(ncols):
                    ptr[rank][j] = -ptr[rank][j]
            pc = ptr[rank][c]
            for i in range(rank + 1, nrows):
                f = ptr[i][c]
                if f:
                    g = _gcd(pc, f)
                    if _combine(ptr[i], ptr[rank], pc // g, f // g, ncols):
                        return None
                    _make_primitive(ptr[i], ncols)
            pivots.append(c)
            rank += 1
        for k in range(rank - 1, -1, -1):
            c = pivots[k]
            pc = ptr[k][c]
            for i in range(k):
                f = ptr[i][c]
                if f:
                    g = _gcd(pc, f)
                    if _combine(ptr[i], ptr[k], pc // g, f // g, ncols):
                        return None
                    _make_primitive(ptr[i], ncols)
        out = []
        for k in range(rank):
            _make_primitive(ptr[k], ncols)
            if ptr[k][pivots[k]] < 0:
                for j in range(ncols):
                    ptr[k][j] = -ptr[k][j]
            out.append([ptr[k][j] for j in range(ncols)])
        return out, pivots
    finally:
        free(buf)
        free(ptr)


def rref_int(rows, ncols):
    """Same contract as ``voa._kernels_py.rref_int``."""
    work = [r for r in rows if any(r)]
    res = _rref_c(work, ncols)
    if res is None:
        return _kernels_py.rref_int(work, ncols)
    return res


cdef object _matmul_c(a, b):
    cdef Py_ssize_t n = len(a), inner = len(b), m = len(b[0]) if b else 0
    cdef Py_ssize_t i, j, k
    cdef long long x, y, acc
    cdef long long *A
    cdef long long *B
    A = <long long *> malloc((n * inner + 1) * sizeof(long long))
    B = <long long *> malloc((inner * m + 1) * sizeof(long long))
    if A == NULL or B == NULL:
        free(A)
        free(B)
        raise MemoryError()
    try:
        for i in range(n):
            row = a[i]
            for k in range(inner):
                v = row[k]
                if v >= LIMIT or v <= -LIMIT:
                    return None
                A[i * inner + k] = v
        for k in range(inner):
            row = b[k]
            for j in range(m):
                v = row[j]
                if v >= LIMIT or v <= -LIMIT:
                    return None
                B[k * m + j] = v
        out = []
        for i in range(n):
            orow = []
            for j in range(m):
                acc = 0
                for k in range(inner):
                    x = A[i * inner + k]
                    if x:
                        y = B[k * m + j]
                        if y:
                            if voa_mul_ovf(x, y, &y):
                                return None
                            if voa_add_ovf(acc, y, &acc):
                                return None
                orow.append(acc)
            out.append(orow)
        return out
    finally:
        free(A)
        free(B)


def int_matmul(a, b):
    """Same contract as ``voa._kernels_py.int_matmul``."""
    if not a:
        return []
    res = _matmul_c(a, b)
    if res is None:
        return _kernels_py.int_matmul(a, b)
    return res
