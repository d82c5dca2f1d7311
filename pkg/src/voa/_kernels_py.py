"""Pure-Python reference kernels.

These are the fallbacks used when the compiled ``voa._kernels`` extension is
unavailable. Both implementations must return identical results.
"""

from math import gcd


def _primitive(row):
    g = gcd(*row)
    if g > 1:
        return [x // g for x in row]
    return row


def rref_int(rows, ncols):
    """Fraction-free Gauss-Jordan elimination on integer rows.

    Returns ``(reduced, pivots)`` where ``reduced`` holds the nonzero rows of
    the reduced echelon form, each scaled to a primitive integer row with a
    positive pivot, and every pivot column is zero outside its pivot row.
    """
    work = [list(r) for r in rows if any(r)]
    pivots = []
    rank = 0
    nrows = len(work)
    for c in range(ncols):
        if rank == nrows:
            break
        sel = -1
        best = 0
        for i in range(rank, nrows):
            v = work[i][c]
            if v:
                a = v if v > 0 else -v
                if sel < 0 or a < best:
                    sel, best = i, a
                    if a == 1:
                        break
        if sel < 0:
            continue
        work[rank], work[sel] = work[sel], work[rank]
        prow = work[rank]
        if prow[c] < 0:
            prow = [-x for x in prow]
            work[rank] = prow
        pc = prow[c]
        for i in range(rank + 1, nrows):
            row = work[i]
            f = row[c]
            if f:
                g = gcd(pc, f)
                a, b = pc // g, f // g
                work[i] = _primitive([a * x - b * y for x, y in zip(row, prow)])
        pivots.append(c)
        rank += 1
    work = work[:rank]
    # back substitution, bottom up
    for k in range(rank - 1, -1, -1):
        c = pivots[k]
        prow = work[k]
        pc = prow[c]
        for i in range(k):
            row = work[i]
            f = row[c]
            if f:
                g = gcd(pc, f)
                a, b = pc // g, f // g
                work[i] = _primitive([a * x - b * y for x, y in zip(row, prow)])
    out = []
    for k, row in enumerate(work):
        row = _primitive(row)
        if row[pivots[k]] < 0:
            row = [-x for x in row]
        out.append(row)
    return out, pivots


def int_matmul(a, b):
    """Exact product of integer matrices given as lists of lists."""
    if not a:
        return []
    inner = len(b)
    ncols = len(b[0]) if b else 0
    out = []
    for row in a:
        acc = [0] * ncols
        for k in range(inner):
            x = row[k]
            if x:
                bk = b[k]
                for j in range(ncols):
                    y = bk[j]
                    if y:
                        acc[j] += x * y
        out.append(acc)
    return out
