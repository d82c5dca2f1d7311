"""Exact linear algebra over the rationals.

Scalars are :class:`fractions.Fraction`. Row reduction runs on integer rows
(denominators cleared per row) through :mod:`voa._kernels` when the compiled
extension is importable and through :mod:`voa._kernels_py` otherwise.
"""

from __future__ import annotations

import os
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

from .errors import AmbientMismatch

def _select_kernels():
    # VOA_KERNEL=python forces the reference kernels even when the extension is built
    if os.environ.get("VOA_KERNEL", "").lower() != "python":
        try:
            from . import _kernels as mod

            return mod, "compiled"
        except ImportError:  # the extension is optional
            pass
    from . import _kernels_py as mod

    return mod, "python"


_k, KERNEL = _select_kernels()

from . import _kernels_py

Rational = Fraction

__all__ = [
    "KERNEL",
    "Matrix",
    "Rational",
    "SubspaceBasis",
    "algebra_closure",
    "as_rational",
    "format_rational",
    "int_matmul",
    "kernel",
    "parse_rational",
    "rank",
    "rref",
    "subspace_intersect",
    "subspace_sum",
]


def as_rational(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return parse_rational(x)
    if isinstance(x, float):
        raise TypeError("floats are not accepted as exact scalars")
    return Fraction(x)


def format_rational(q) -> str:
    """Serialize as ``"p/q"``, or ``"p"`` when the denominator is 1."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(s: str) -> Fraction:
    s = s.strip()
    if "." in s or "e" in s.lower():
        raise ValueError(f"not an exact rational: {s!r}")
    return Fraction(s)


def _int_row(row: Sequence) -> list[int]:
    """Scale a rational row to an integer row (positive factor)."""
    den = 1
    for x in row:
        if type(x) is not int:
            d = x.denominator
            if d != 1:
                den = lcm(den, d)
    if den == 1:
        return [int(x) for x in row]
    return [int(x * den) for x in row]


def _frac_rows(int_rows, pivots) -> tuple[tuple[Fraction, ...], ...]:
    out = []
    for row, p in zip(int_rows, pivots):
        pv = row[p]
        if pv == 1:
            out.append(tuple(Fraction(x) for x in row))
        else:
            out.append(tuple(Fraction(x, pv) for x in row))
    return tuple(out)


class Matrix:
    """Dense immutable matrix of rationals."""

    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows: Iterable[Iterable], ncols: int | None = None):
        self.rows = tuple(tuple(as_rational(x) for x in r) for r in rows)
        self.nrows = len(self.rows)
        if ncols is None:
            ncols = len(self.rows[0]) if self.rows else 0
        self.ncols = ncols
        for r in self.rows:
            if len(r) != ncols:
                raise ValueError("ragged matrix rows")

    @classmethod
    def _raw(cls, rows, ncols):
        m = cls.__new__(cls)
        m.rows = rows
        m.nrows = len(rows)
        m.ncols = ncols
        return m

    @classmethod
    def identity(cls, n: int) -> Matrix:
        one, zero = Fraction(1), Fraction(0)
        return cls._raw(tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n)), n)

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> Matrix:
        zero = Fraction(0)
        return cls._raw(tuple((zero,) * ncols for _ in range(nrows)), ncols)

    @classmethod
    def scalar(cls, n: int, value) -> Matrix:
        return cls.identity(n) * as_rational(value)

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    def __hash__(self):
        return hash((self.shape, self.rows))

    def __repr__(self):
        body = "; ".join(" ".join(format_rational(x) for x in r) for r in self.rows)
        return f"Matrix[{self.nrows}x{self.ncols}]({body})"

    def __add__(self, other: Matrix) -> Matrix:
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return Matrix._raw(
            tuple(tuple(x + y for x, y in zip(r, s)) for r, s in zip(self.rows, other.rows)), self.ncols
        )

    def __sub__(self, other: Matrix) -> Matrix:
        return self + other * -1

    def __neg__(self) -> Matrix:
        return self * -1

    def __mul__(self, c) -> Matrix:
        c = as_rational(c)
        return Matrix._raw(tuple(tuple(x * c for x in r) for r in self.rows), self.ncols)

    __rmul__ = __mul__

    def __matmul__(self, other: Matrix) -> Matrix:
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        cols = list(zip(*other.rows)) if other.nrows else [()] * other.ncols
        zero = Fraction(0)
        out = []
        for r in self.rows:
            out.append(tuple(sum((x * y for x, y in zip(r, c) if x and y), zero) for c in cols))
        return Matrix._raw(tuple(out), other.ncols)

    @property
    def T(self) -> Matrix:
        if self.nrows == 0:
            return Matrix.zeros(self.ncols, 0)
        return Matrix._raw(tuple(zip(*self.rows)), self.nrows)

    def is_zero(self) -> bool:
        return not any(any(r) for r in self.rows)

    def is_scalar(self) -> bool:
        if self.nrows != self.ncols:
            return False
        if self.nrows == 0:
            return True
        c = self.rows[0][0]
        return self == Matrix.scalar(self.nrows, c)

    def flat(self) -> tuple[Fraction, ...]:
        return tuple(x for r in self.rows for x in r)

    def apply(self, vec: Sequence) -> tuple[Fraction, ...]:
        zero = Fraction(0)
        return tuple(sum((x * y for x, y in zip(r, vec) if x and y), zero) for r in self.rows)


def rref(m: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns; zero rows kept at the bottom."""
    ints, pivots = _k.rref_int([_int_row(r) for r in m.rows], m.ncols)
    rows = list(_frac_rows(ints, pivots))
    zero = (Fraction(0),) * m.ncols
    rows.extend([zero] * (m.nrows - len(rows)))
    return Matrix._raw(tuple(rows), m.ncols), list(pivots)


def rank(m: Matrix) -> int:
    return len(rref(m)[1])


class SubspaceBasis:
    """A subspace of Q^n stored by its canonical RREF basis.

    Two instances are equal exactly when they describe the same subspace.
    """

    __slots__ = ("ambient_dim", "vectors", "pivots", "_int")

    def __init__(self, ambient_dim: int, vectors=(), *, _reduced=None):
        self.ambient_dim = ambient_dim
        if _reduced is not None:
            ints, pivots = _reduced
        else:
            rows = []
            for v in vectors:
                if len(v) != ambient_dim:
                    raise AmbientMismatch(f"vector of length {len(v)} in ambient {ambient_dim}")
                rows.append(_int_row(v))
            ints, pivots = _k.rref_int(rows, ambient_dim)
        self._int = [list(r) for r in ints]
        self.pivots = tuple(pivots)
        self.vectors = _frac_rows(ints, pivots)

    @classmethod
    def zero(cls, n: int) -> SubspaceBasis:
        return cls(n, _reduced=([], []))

    @classmethod
    def full(cls, n: int) -> SubspaceBasis:
        return cls(n, _reduced=([[int(i == j) for j in range(n)] for i in range(n)], list(range(n))))

    @property
    def dim(self) -> int:
        return len(self.vectors)

    def __len__(self):
        return self.dim

    def __eq__(self, other):
        if not isinstance(other, SubspaceBasis):
            return NotImplemented
        return self.ambient_dim == other.ambient_dim and self.vectors == other.vectors

    def __hash__(self):
        return hash((self.ambient_dim, self.vectors))

    def __repr__(self):
        return f"SubspaceBasis(dim={self.dim}, ambient={self.ambient_dim})"

    def reduce(self, vec: Sequence) -> tuple[Fraction, ...]:
        """Canonical coset representative of ``vec`` modulo this subspace.

        The result has zero entries at every pivot column.
        """
        if len(vec) != self.ambient_dim:
            raise AmbientMismatch("vector length does not match ambient dimension")
        out = [as_rational(x) for x in vec]
        for row, p in zip(self.vectors, self.pivots):
            c = out[p]
            if c:
                for j, x in enumerate(row):
                    if x:
                        out[j] -= c * x
        return tuple(out)

    def contains(self, vec: Sequence) -> bool:
        return not any(self.reduce(vec))

    __contains__ = contains

    def issubset(self, other: SubspaceBasis) -> bool:
        if self.ambient_dim != other.ambient_dim:
            raise AmbientMismatch("ambient mismatch")
        return all(other.contains(v) for v in self.vectors)

    def int_rows(self) -> list[list[int]]:
        return [list(r) for r in self._int]


def _check_ambient(a: SubspaceBasis, b: SubspaceBasis) -> None:
    if a.ambient_dim != b.ambient_dim:
        raise AmbientMismatch(f"ambient dimensions differ: {a.ambient_dim} vs {b.ambient_dim}")


def kernel(m: Matrix) -> SubspaceBasis:
    """Right kernel ``{x : m x = 0}``."""
    ints, pivots = _k.rref_int([_int_row(r) for r in m.rows], m.ncols)
    pivset = set(pivots)
    basis = []
    for f in range(m.ncols):
        if f in pivset:
            continue
        # x_f = 1, x_p = -R[k][f] / R[k][p]
        v = [Fraction(0)] * m.ncols
        v[f] = Fraction(1)
        for row, p in zip(ints, pivots):
            if row[f]:
                v[p] = Fraction(-row[f], row[p])
        basis.append(v)
    return SubspaceBasis(m.ncols, basis)


def subspace_sum(a: SubspaceBasis, b: SubspaceBasis) -> SubspaceBasis:
    _check_ambient(a, b)
    ints, pivots = _k.rref_int(a.int_rows() + b.int_rows(), a.ambient_dim)
    return SubspaceBasis(a.ambient_dim, _reduced=(ints, pivots))


def subspace_intersect(a: SubspaceBasis, b: SubspaceBasis) -> SubspaceBasis:
    """Intersection via the kernel of the stacked system ``sum x_i a_i - sum y_j b_j``."""
    _check_ambient(a, b)
    n = a.ambient_dim
    if a.dim == 0 or b.dim == 0:
        return SubspaceBasis.zero(n)
    cols = [list(v) for v in a.vectors] + [[-x for x in v] for v in b.vectors]
    system = Matrix._raw(tuple(tuple(c[i] for c in cols) for i in range(n)), len(cols))
    ker = kernel(system)
    vecs = []
    for coeffs in ker.vectors:
        v = [Fraction(0)] * n
        for ci, av in zip(coeffs[: a.dim], a.vectors):
            if ci:
                for j, x in enumerate(av):
                    if x:
                        v[j] += ci * x
        vecs.append(v)
    return SubspaceBasis(n, vecs)


def _int_matrix(m: Matrix) -> list[list[int]]:
    den = 1
    for r in m.rows:
        for x in r:
            if x.denominator != 1:
                den = lcm(den, x.denominator)
    return [[int(x * den) for x in r] for r in m.rows]


def algebra_closure(gens: Sequence[Matrix], include_identity: bool = True, d: int | None = None) -> SubspaceBasis:
    """Span (in the d*d-dimensional space of matrices) of the algebra generated by ``gens``.

    Generators are rescaled to integer matrices first; rescaling by nonzero
    scalars does not change the generated algebra.
    """
    if d is None:
        if not gens:
            raise ValueError("matrix size required when there are no generators")
        d = gens[0].nrows
    for g in gens:
        if g.shape != (d, d):
            raise ValueError("generators must all be d x d")
    int_gens = [_int_matrix(g) for g in gens if not g.is_zero()]
    seed = [[x for r in g for x in r] for g in int_gens]
    if include_identity:
        seed.append([int(i == j) for i in range(d) for j in range(d)])
    ints, pivots = _k.rref_int(seed, d * d)
    while True:
        products = []
        for row in ints:
            mat = [row[i * d:(i + 1) * d] for i in range(d)]
            for g in int_gens:
                prod = _k.int_matmul(mat, g)
                products.append([x for r in prod for x in r])
        new_ints, new_piv = _k.rref_int(ints + products, d * d)
        if len(new_piv) == len(pivots):
            break
        ints, pivots = new_ints, new_piv
    return SubspaceBasis(d * d, _reduced=(ints, pivots))


def matrix_in_span(span: SubspaceBasis, m: Matrix) -> bool:
    return span.contains(m.flat())


def int_matmul(a: list[list[int]], b: list[list[int]]) -> list[list[int]]:
    """Integer matrix product through the selected kernel."""
    return _k.int_matmul(a, b)


def python_kernels():
    """The reference kernel module, for benchmarks and cross-checks."""
    return _kernels_py
