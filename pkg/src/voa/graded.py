"""Partition-indexed bases, truncation windows, graded vectors and degree maps."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

from .errors import WindowExceeded
from .qlinalg import Matrix, as_rational, format_rational

HALF = Fraction(1, 2)


@lru_cache(maxsize=None)
def _partitions_int(n: int, largest: int) -> tuple[tuple[int, ...], ...]:
    # descending lexicographic order
    if n == 0:
        return ((),)
    out = []
    for first in range(min(n, largest), 0, -1):
        for rest in _partitions_int(n - first, first):
            out.append((first,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def _partitions_odd(n2: int, largest: int) -> tuple[tuple[int, ...], ...]:
    # partitions of n2 into odd parts (doubled units)
    if n2 == 0:
        return ((),)
    out = []
    top = min(n2, largest)
    if top % 2 == 0:
        top -= 1
    for first in range(top, 0, -2):
        for rest in _partitions_odd(n2 - first, first):
            out.append((first,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def integer_partitions(n: int) -> tuple[tuple[int, ...], ...]:
    """Partitions of ``n`` into positive integers, lexicographically descending."""
    if n < 0:
        return ()
    return _partitions_int(n, n)


@lru_cache(maxsize=None)
def half_odd_partitions(n) -> tuple[tuple[Fraction, ...], ...]:
    """Partitions of ``n`` (in (1/2)Z) into parts 1/2, 3/2, 5/2, ..."""
    n = Fraction(n)
    if n < 0 or (2 * n).denominator != 1:
        return ()
    n2 = int(2 * n)
    return tuple(tuple(Fraction(p, 2) for p in part) for part in _partitions_odd(n2, n2))


def partition_weight(parts) -> Fraction | int:
    return sum(parts)


def format_partition(parts) -> list[str]:
    return [format_rational(p) for p in parts]


def parse_partition(items) -> tuple:
    parts = [as_rational(x) for x in items]
    if all(p.denominator == 1 for p in parts):
        return tuple(sorted((int(p) for p in parts), reverse=True))
    return tuple(sorted(parts, reverse=True))


def minus_one_power(parts) -> int:
    """Eigenvalue of the automorphism alpha -> -alpha on a monomial basis vector."""
    return -1 if len(parts) % 2 else 1


@dataclass(frozen=True)
class TruncationWindow:
    """Bounds (D, N, P) that finitize every infinite-dimensional object.

    ``D`` is the maximal V-weight retained, ``N`` the maximal module degree,
    and ``P`` the weight bound on generators used in span computations.
    """

    D: int = 4
    N: Fraction = Fraction(6)
    P: int = 4

    def __post_init__(self):
        object.__setattr__(self, "N", as_rational(self.N))
        if self.D < 0:
            raise ValueError("D must be nonnegative")
        if self.N < 0:
            raise ValueError("N must be nonnegative")
        if not 0 <= self.P <= self.D:
            raise ValueError(f"need 0 <= P <= D, got P={self.P}, D={self.D}")

    def to_json(self) -> dict:
        return {"D": self.D, "N": format_rational(self.N), "P": self.P}


class GradedSpace:
    """Interface for graded spaces with a finite basis in each degree.

    Subclasses implement :meth:`basis` and :meth:`degree_of`; ``T`` fixes the
    degree lattice (1/T)Z.
    """

    name = "space"
    T = 1

    def basis(self, degree) -> tuple:
        raise NotImplementedError

    def degree_of(self, label):
        raise NotImplementedError

    def degrees_upto(self, top) -> list:
        top = Fraction(top)
        out = []
        k = 0
        while Fraction(k, self.T) <= top:
            d = Fraction(k, self.T)
            out.append(int(d) if d.denominator == 1 else d)
            k += 1
        return out

    def dim(self, degree) -> int:
        return len(self.basis(degree))

    def index(self, degree) -> dict:
        return {lab: i for i, lab in enumerate(self.basis(degree))}

    def label_json(self, label):
        return format_partition(label)


def enumerate_basis(space: GradedSpace, degree) -> list:
    """Deterministic basis labels of ``space`` in the given degree."""
    if Fraction(degree) < 0:
        raise ValueError("degree must be nonnegative")
    return list(space.basis(degree))


class GradedVector:
    """Finitely supported vector of a graded space, stored as label -> coefficient."""

    __slots__ = ("space", "terms")

    def __init__(self, space: GradedSpace, terms: Mapping | Iterable = ()):
        self.space = space
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean = {}
        for lab, c in items:
            c = as_rational(c)
            if c:
                clean[lab] = clean.get(lab, 0) + c
                if not clean[lab]:
                    del clean[lab]
        self.terms = clean

    @classmethod
    def basis_vector(cls, space: GradedSpace, label) -> GradedVector:
        return cls(space, {label: 1})

    def components(self) -> dict:
        out: dict = {}
        for lab, c in self.terms.items():
            out.setdefault(self.space.degree_of(lab), {})[lab] = c
        return dict(sorted(out.items()))

    def degrees(self) -> list:
        return sorted({self.space.degree_of(lab) for lab in self.terms})

    def homogeneous_parts(self) -> list[GradedVector]:
        return [GradedVector(self.space, comp) for comp in self.components().values()]

    @property
    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    @property
    def weight(self):
        ds = self.degrees()
        if len(ds) != 1:
            raise ValueError("weight is defined only for nonzero homogeneous vectors")
        return ds[0]

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def _check(self, other):
        if other.space is not self.space:
            raise ValueError("vectors belong to different spaces")

    def __add__(self, other: GradedVector) -> GradedVector:
        self._check(other)
        out = dict(self.terms)
        for lab, c in other.terms.items():
            out[lab] = out.get(lab, 0) + c
        return GradedVector(self.space, out)

    def __sub__(self, other: GradedVector) -> GradedVector:
        return self + other * -1

    def __neg__(self):
        return self * -1

    def __mul__(self, c) -> GradedVector:
        c = as_rational(c)
        return GradedVector(self.space, {lab: x * c for lab, x in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, GradedVector):
            return NotImplemented
        return self.space is other.space and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for lab, c in sorted(self.terms.items(), key=lambda t: (self.space.degree_of(t[0]), str(t[0]))):
            parts.append(f"{format_rational(c)}*{lab}")
        return " + ".join(parts)

    def to_json(self) -> dict:
        out = {}
        for deg, comp in self.components().items():
            out[format_rational(deg)] = {
                ",".join(map(str, self.space.label_json(lab))) or "vac": format_rational(c)
                for lab, c in sorted(comp.items(), key=lambda t: self.space.basis(deg).index(t[0]))
            }
        return out


class FlatBasis:
    """Concatenated coordinates of the pieces of ``space`` in the given degrees.

    Coordinates are ordered by increasing degree, then basis order.
    """

    def __init__(self, space: GradedSpace, degrees: Iterable, label_filter=None):
        self.space = space
        self.degrees = sorted(Fraction(d) for d in degrees)
        self.labels = []
        for d in self.degrees:
            for lab in space.basis(d):
                if label_filter is None or label_filter(lab):
                    self.labels.append(lab)
        self.position = {lab: i for i, lab in enumerate(self.labels)}
        self._degset = set(self.degrees)

    @classmethod
    def upto(cls, space: GradedSpace, top, label_filter=None) -> FlatBasis:
        return cls(space, space.degrees_upto(top), label_filter)

    @property
    def dim(self) -> int:
        return len(self.labels)

    def degree_slice(self, degree) -> list[int]:
        return [i for i, lab in enumerate(self.labels) if self.space.degree_of(lab) == degree]

    def flatten(self, v: GradedVector | Mapping) -> tuple[Fraction, ...]:
        terms = v.terms if isinstance(v, GradedVector) else v
        row = [Fraction(0)] * len(self.labels)
        for lab, c in terms.items():
            i = self.position.get(lab)
            if i is None:
                raise WindowExceeded(
                    f"component {lab!r} of degree {self.space.degree_of(lab)} lies outside the window"
                )
            row[i] += c
        return tuple(row)

    def unflatten(self, row) -> GradedVector:
        if len(row) != len(self.labels):
            raise ValueError("coordinate row has the wrong length")
        return GradedVector(self.space, {lab: c for lab, c in zip(self.labels, row) if c})


def flatten(v: GradedVector, window: TruncationWindow | int, label_filter=None) -> tuple[Fraction, ...]:
    top = window.D if isinstance(window, TruncationWindow) else window
    return FlatBasis.upto(v.space, top, label_filter).flatten(v)


class DegreeMap:
    """Graded linear map given blockwise: ``blocks[d]`` sends degree d to d + shift.

    Block matrices have rows indexed by the target basis and columns by the
    source basis; a missing block is the zero map.
    """

    __slots__ = ("source", "target", "shift", "blocks")

    def __init__(self, source: GradedSpace, target: GradedSpace, shift, blocks: Mapping):
        self.source = source
        self.target = target
        self.shift = Fraction(shift)
        self.blocks = {Fraction(d): m for d, m in blocks.items()}

    def block(self, degree) -> Matrix:
        d = Fraction(degree)
        m = self.blocks.get(d)
        if m is None:
            return Matrix.zeros(self.target.dim(d + self.shift), self.source.dim(d))
        return m

    def is_zero(self) -> bool:
        return all(m.is_zero() for m in self.blocks.values())

    def flat(self) -> tuple[Fraction, ...]:
        out = []
        for d in sorted(self.blocks):
            out.extend(self.blocks[d].flat())
        return tuple(out)

    def __eq__(self, other):
        if not isinstance(other, DegreeMap):
            return NotImplemented
        if self.shift != other.shift:
            return False
        keys = set(self.blocks) | set(other.blocks)
        return all(self.block(d) == other.block(d) for d in keys)

    def __repr__(self):
        return f"DegreeMap(shift={format_rational(self.shift)}, degrees={[format_rational(d) for d in sorted(self.blocks)]})"


def apply(dmap: DegreeMap, v: GradedVector) -> GradedVector:
    """Blockwise matrix-vector product."""
    out: dict = {}
    for deg, comp in v.components().items():
        blk = dmap.blocks.get(Fraction(deg))
        if blk is None:
            continue
        src = dmap.source.basis(deg)
        tgt = dmap.target.basis(Fraction(deg) + dmap.shift)
        col = [comp.get(lab, 0) for lab in src]
        for lab, x in zip(tgt, blk.apply(col)):
            if x:
                out[lab] = out.get(lab, 0) + x
    return GradedVector(dmap.target, out)
