"""The Lie algebra V-hat, its degree-zero part V/(L(-1)+L(0))V, and zero-mode generators.

Both the normal form of V-hat elements and the quotient by (L(-1)+L(0))V rest
on one graded split: in each weight k choose the RREF complement C_k of
L(-1)V_{k-1} in V_k and write x = L(-1)y + c. Then

    (L(-1)y)(m) = -m y(m-1)          in V-hat,
    L(-1)y = -(k-1) y                modulo (L(-1)+L(0))V,

so both reductions walk down the weights and terminate at weight 0.
"""

from __future__ import annotations

from fractions import Fraction

from .boson import o as zero_mode
from .errors import WindowExceeded
from .graded import FlatBasis, GradedVector, TruncationWindow
from .qlinalg import Matrix, SubspaceBasis, rref
from .series import binom


def _add(acc: dict, vec: dict, c=1) -> None:
    for lab, x in vec.items():
        y = acc.get(lab, 0) + c * x
        if y:
            acc[lab] = y
        else:
            acc.pop(lab, None)


def L_minus_one(V, x: dict) -> dict:
    return V.product_terms(V.omega.terms, 0, x)


def L_zero_plus_minus_one(V, x: dict) -> dict:
    out = dict(V.product_terms(V.omega.terms, 1, x))
    _add(out, V.product_terms(V.omega.terms, 0, x))
    return out


class TranslationSplit:
    """Per-weight decomposition x = L(-1)y + c with c in a fixed complement."""

    def __init__(self, V):
        self.V = V
        self._weights: dict = {}
        self._g: dict = {}

    def _data(self, k: int):
        hit = self._weights.get(k)
        if hit is not None:
            return hit
        V = self.V
        tgt = V.basis(k)
        src = V.basis(k - 1) if k >= 1 else ()
        pos = {lab: i for i, lab in enumerate(tgt)}
        rows = []
        for j, u in enumerate(src):
            img = L_minus_one(V, {u: 1})
            row = [0] * (len(tgt) + len(src))
            for lab, c in img.items():
                row[pos[lab]] = c
            row[len(tgt) + j] = 1
            rows.append(row)
        red, piv = rref(Matrix(rows, len(tgt) + len(src))) if rows else (None, [])
        kept = []
        for i, p in enumerate(piv):
            if p < len(tgt):
                r = red.rows[i]
                kept.append((p, r[: len(tgt)], r[len(tgt):]))
        pivset = {p for p, _, _ in kept}
        complement = tuple(lab for i, lab in enumerate(tgt) if i not in pivset)
        data = (tgt, src, pos, kept, complement)
        self._weights[k] = data
        return data

    def complement(self, k: int) -> tuple:
        """Labels spanning the complement C_k of L(-1)V_{k-1} in V_k."""
        return self._data(k)[4]

    def split(self, k: int, x: dict) -> tuple[dict, dict]:
        """(y, c) with x = L(-1)y + c, for x homogeneous of weight k."""
        tgt, src, pos, kept, _ = self._data(k)
        vec = [Fraction(0)] * len(tgt)
        for lab, c in x.items():
            vec[pos[lab]] += c
        y = [Fraction(0)] * len(src)
        for p, img, coef in kept:
            c = vec[p]
            if c:
                for i, a in enumerate(img):
                    if a:
                        vec[i] -= c * a
                for i, a in enumerate(coef):
                    if a:
                        y[i] += c * a
        return (
            {lab: a for lab, a in zip(src, y) if a},
            {lab: a for lab, a in zip(tgt, vec) if a},
        )

    def reduce_basis(self, lab) -> dict:
        """Graded canonical form of a basis vector modulo (L(-1)+L(0))V, keyed by (weight, label)."""
        hit = self._g.get(lab)
        if hit is not None:
            return hit
        k = self.V.degree_of(lab)
        y, c = self.split(k, {lab: 1})
        out = {(k, l2): a for l2, a in c.items()}
        for l2, a in y.items():
            _add(out, self.reduce_basis(l2), -(k - 1) * a)
        self._g[lab] = out
        return out

    def reduce(self, x: dict) -> dict:
        out: dict = {}
        for lab, c in x.items():
            _add(out, self.reduce_basis(lab), c)
        return out


class GradedQuotient:
    """Coordinates of V/(L(-1)+L(0))V on the complements C_0, ..., C_top."""

    def __init__(self, V, top: int, split: TranslationSplit | None = None):
        self.V = V
        self.top = top
        self.split = split or TranslationSplit(V)
        self.labels = [(k, lab) for k in range(top + 1) for lab in self.split.complement(k)]
        self.position = {key: i for i, key in enumerate(self.labels)}

    @property
    def dim(self) -> int:
        return len(self.labels)

    def coords(self, x: dict) -> tuple:
        row = [Fraction(0)] * len(self.labels)
        for lab in x:
            if self.V.degree_of(lab) > self.top:
                raise WindowExceeded(f"weight {self.V.degree_of(lab)} beyond the quotient window {self.top}")
        for key, c in self.split.reduce(x).items():
            row[self.position[key]] += c
        return tuple(row)

    def representative(self, x: dict) -> GradedVector:
        return GradedVector(self.V, {lab: c for (k, lab), c in self.split.reduce(x).items()})


class Canonicalizer:
    """Reduces vectors of V_{<=D} to canonical coset representatives by RREF."""

    def __init__(self, flat: FlatBasis, image: SubspaceBasis):
        self.flat = flat
        self.image = image

    def __call__(self, v: GradedVector) -> GradedVector:
        return self.flat.unflatten(self.image.reduce(self.flat.flatten(v)))

    def equivalent(self, a: GradedVector, b: GradedVector) -> bool:
        return self.image.contains(self.flat.flatten(a - b))


def quotient_V0hat(V, window) -> tuple[SubspaceBasis, Canonicalizer]:
    """RREF basis of (L(-1)+L(0))V_{<=D-1} inside flattened V_{<=D}, with its canonicalizer."""
    D = window.D if isinstance(window, TruncationWindow) else int(window)
    if D < 1:
        raise ValueError("the quotient needs D >= 1")
    flat = FlatBasis.upto(V, D)
    rows = []
    for k in range(D):
        for u in V.basis(k):
            rows.append(flat.flatten(L_zero_plus_minus_one(V, {u: 1})))
    image = SubspaceBasis(flat.dim, rows)
    return image, Canonicalizer(flat, image)


# --- V-hat -----------------------------------------------------------------


class HatElement:
    """Finite sum of v(m) in V-hat, kept in translation-reduced normal form.

    Terms are stored as {(label, m): coeff} with every label in the chosen
    complement of L(-1)V in its weight; the vacuum appears only as 1(-1).
    """

    __slots__ = ("V", "terms")

    def __init__(self, V, terms: dict):
        self.V = V
        self.terms = {k: c for k, c in terms.items() if c}

    @classmethod
    def from_terms(cls, V, pairs, split: TranslationSplit | None = None) -> HatElement:
        split = split or _split_for(V)
        out: dict = {}
        for v, m, c in pairs:
            for lab, a in v.items():
                _hat_reduce(split, lab, m, a * c, out)
        return cls(V, out)

    def __eq__(self, other):
        return isinstance(other, HatElement) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        out = dict(self.terms)
        _add(out, other.terms)
        return HatElement(self.V, out)

    def __sub__(self, other):
        out = dict(self.terms)
        _add(out, other.terms, -1)
        return HatElement(self.V, out)

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self):
        """Degree wt v - m - 1, when all terms agree."""
        ds = {self.V.degree_of(lab) - m - 1 for lab, m in self.terms}
        return ds.pop() if len(ds) == 1 else None

    def act(self, module, w: dict) -> dict:
        """Evaluate as the operator sum c * v_m on a module vector."""
        out: dict = {}
        by_mode: dict = {}
        for (lab, m), c in self.terms.items():
            by_mode.setdefault(m, {})[lab] = c
        for m, vec in sorted(by_mode.items()):
            _add(out, module.mode(vec, m, w))
        return out

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*{lab}({m})" for (lab, m), c in sorted(self.terms.items(), key=str))


_SPLITS: dict = {}


def _split_for(V) -> TranslationSplit:
    s = _SPLITS.get(id(V))
    if s is None or s.V is not V:
        s = TranslationSplit(V)
        _SPLITS[id(V)] = s
    return s


def _hat_reduce(split: TranslationSplit, lab, m, c, out: dict) -> None:
    k = split.V.degree_of(lab)
    if k == 0 and m != -1:
        # (L(-1)1)(m+1) = 0 = -(m+1) 1(m); ker L(-1) is V_0 on CFT-type fixtures
        return
    y, rest = split.split(k, {lab: 1})
    for l2, a in rest.items():
        key = (l2, m)
        val = out.get(key, 0) + c * a
        if val:
            out[key] = val
        else:
            out.pop(key, None)
    if m:
        for l2, a in y.items():
            _hat_reduce(split, l2, m - 1, -m * c * a, out)


def hat_bracket(V, a: GradedVector, m: int, b: GradedVector, n: int) -> HatElement:
    """[a(m), b(n)] = sum_i binom(m, i) (a_i b)(m + n - i), a and b homogeneous."""
    wa, wb = a.weight, b.weight
    pairs = []
    for i in range(0, wa + wb):
        c = binom(m, i)
        if c:
            prod = V.product_terms(a.terms, i, b.terms)
            if prod:
                pairs.append((prod, m + n - i, c))
    return HatElement.from_terms(V, pairs)


def zero_bracket(V, a: GradedVector, b: GradedVector, window=None) -> GradedVector:
    """[a, b] = sum_{n=0}^{wt a - 1} binom(wt a - 1, n) a_n b on V-hat(0), bilinear in a."""
    out: dict = {}
    for comp in a.homogeneous_parts():
        wa = comp.weight
        for n in range(0, wa):
            _add(out, V.product_terms(comp.terms, n, b.terms), binom(wa - 1, n))
    res = GradedVector(V, out)
    if window is not None:
        top = window.D if isinstance(window, TruncationWindow) else int(window)
        if any(d > top for d in res.degrees()):
            raise WindowExceeded("bracket leaves the V window")
    return res


def s_m_generators(fixture, window: TruncationWindow) -> list:
    """Zero modes o(v) on M_{<=N}, v over the basis of V_{<=P}, deduplicated modulo J_M.

    For twisted modules only the fixed-point subalgebra contributes. Returns
    a list of (label, DegreeMap) pairs.
    """
    V, M = fixture.voa, fixture.module
    degrees = M.degrees_upto(window.N)
    twisted = M.T > 1
    kept = []
    rows: list = []
    span = None
    for k in range(window.P + 1):
        for lab in V.basis(k):
            if twisted and V.parity(lab):
                continue
            v = GradedVector(V, {lab: 1})
            dm = zero_mode(M, v, degrees)
            row = dm.flat()
            if not any(row):
                continue
            if span is not None and span.contains(row):
                continue
            rows.append(row)
            span = SubspaceBasis(len(row), rows)
            kept.append((lab, dm))
    return kept


def operator_on(module, hat: HatElement, degrees) -> dict:
    """Blocks of a V-hat element acting on the given source degrees: {degree: {label: image}}."""
    return {d: {e: hat.act(module, {e: 1}) for e in module.basis(d)} for d in degrees}


__all__ = [
    "Canonicalizer",
    "GradedQuotient",
    "HatElement",
    "TranslationSplit",
    "hat_bracket",
    "quotient_V0hat",
    "s_m_generators",
    "zero_bracket",
]
