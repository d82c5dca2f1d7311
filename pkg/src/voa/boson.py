"""Free-boson fixtures and the exact mode engine.

The rank-one Heisenberg vertex operator algebra M(1) has basis vectors
``a(-n1)...a(-nk)1`` labelled by partitions ``(n1, ..., nk)`` (weakly
decreasing). The pairing is normalized by ``[a(m), a(n)] = m delta_{m+n,0}``.

Vertex operators of monomials are computed with the iterate formula

    Y(a(-n)u, z) = :d^(n-1)a(z)/(n-1)! Y(u, z):

coefficient by coefficient. On the order-two twisted module (modes in
1/2 + Z) the twisted operator is ``W(exp(Delta_z) v, z)`` where ``W`` is the
same naive normal ordering with half-integer modes and Delta_z is the
quadratic correction with coefficients taken from the expansion of
``-log(((1+x)^(1/2) + (1+y)^(1/2)) / 2)``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import LatticeMismatch, WindowExceeded
from .graded import (
    DegreeMap,
    GradedSpace,
    GradedVector,
    TruncationWindow,
    half_odd_partitions,
    integer_partitions,
)
from .qlinalg import Matrix, as_rational, format_rational
from .series import Binomial, TruncatedSeries, binom, expand_power, log_one_plus

HALF = Fraction(1, 2)


def _num(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x


def cache_default() -> bool:
    """Memoization mode from ``VOA_CACHE`` (``private`` by default, ``off`` disables)."""
    mode = os.environ.get("VOA_CACHE", "private").strip().lower()
    if mode not in ("off", "private"):
        raise ValueError(f"VOA_CACHE must be 'off' or 'private', not {mode!r}")
    return mode == "private"


def _add_part(lab: tuple, part) -> tuple:
    # descending order: insert via negated bisect
    out = list(lab)
    i = 0
    while i < len(out) and out[i] >= part:
        i += 1
    out.insert(i, part)
    return tuple(out)


def _remove_part(lab: tuple, part) -> tuple:
    i = lab.index(part)
    return lab[:i] + lab[i + 1:]


def _addto(acc: dict, vec: dict, c) -> None:
    for lab, x in vec.items():
        y = acc.get(lab, 0) + c * x
        if y:
            acc[lab] = y
        else:
            acc.pop(lab, None)


# --- Delta correction coefficients ---------------------------------------

_DELTA_CACHE: dict = {}


def delta_coefficients(order: int) -> dict:
    """Coefficients c(m, n), 0 <= m, n <= order, of -log(((1+x)^(1/2)+(1+y)^(1/2))/2)."""
    if order in _DELTA_CACHE:
        return _DELTA_CACHE[order]
    variables = ("x", "y")
    window = [(0, order), (0, order)]
    one = TruncatedSeries(variables, {(0, 0): 1}, window)
    sx = expand_power(Binomial(None, "x"), HALF, variables, window) - one
    sy = expand_power(Binomial(None, "y"), HALF, variables, window) - one
    t = (sx + sy) * HALF
    series = log_one_plus(t, 2 * order) * -1
    coeffs = {(int(m), int(n)): Fraction(c) for (m, n), c in series.coeffs.items()}
    _DELTA_CACHE[order] = coeffs
    return coeffs


# --- the vertex operator algebra ------------------------------------------


class HeisenbergVOA(GradedSpace):
    """The rank-one Heisenberg VOA M(1) with central charge 1."""

    name = "M(1)"
    T = 1
    kind = "heisenberg"
    central_charge = Fraction(1)

    def __init__(self, cache: bool | None = None):
        self.cache = cache_default() if cache is None else cache
        self._adjoint = None

    @property
    def adjoint(self) -> FockModule:
        if self._adjoint is None:
            self._adjoint = FockModule(self, Fraction(0), cache=self.cache)
        return self._adjoint

    def basis(self, degree):
        d = Fraction(degree)
        if d.denominator != 1 or d < 0:
            return ()
        return integer_partitions(int(d))

    def degree_of(self, label):
        return sum(label)

    weight_of = degree_of

    @property
    def vacuum(self) -> GradedVector:
        return GradedVector(self, {(): 1})

    @property
    def omega(self) -> GradedVector:
        return GradedVector(self, {(1, 1): HALF})

    def h(self) -> GradedVector:
        return GradedVector(self, {(1,): 1})

    def vector(self, terms) -> GradedVector:
        return GradedVector(self, terms)

    def parity(self, label) -> int:
        return len(label) % 2

    def product_terms(self, u: dict, n, v: dict) -> dict:
        """u_n v inside V, on plain coefficient dicts."""
        return self.adjoint.mode(u, n, v)

    def annihilate(self, m: int, label: tuple):
        """a(m) label for m >= 1 inside V: (coefficient, label) or None."""
        k = label.count(m)
        if not k:
            return None
        return m * k, _remove_part(label, m)


class TrivialVOA(GradedSpace):
    """One-dimensional VOA spanned by the vacuum, with omega = 0."""

    name = "C"
    T = 1
    kind = "trivial"
    central_charge = Fraction(0)

    def __init__(self, cache: bool | None = None):
        self.cache = cache_default() if cache is None else cache

    def basis(self, degree):
        return ((),) if Fraction(degree) == 0 else ()

    def degree_of(self, label):
        return 0

    weight_of = degree_of

    @property
    def vacuum(self) -> GradedVector:
        return GradedVector(self, {(): 1})

    @property
    def omega(self) -> GradedVector:
        return GradedVector(self, {})

    def parity(self, label) -> int:
        return 0

    def product_terms(self, u: dict, n, v: dict) -> dict:
        if n != -1:
            return {}
        c = u.get((), 0)
        return {lab: c * x for lab, x in v.items() if c * x}


# --- modules --------------------------------------------------------------


class Module(GradedSpace):
    """Common surface of module fixtures."""

    voa: GradedSpace
    kind = "module"

    def sector(self, v: GradedVector) -> int:
        """The index r with v in V^r (order-two automorphism a -> -a)."""
        pars = {self.voa.parity(lab) for lab in v.terms}
        if len(pars) > 1:
            raise LatticeMismatch("vector mixes the two eigenspaces of g")
        return pars.pop() if pars else 0

    def mode(self, v: dict, p, w: dict) -> dict:
        raise NotImplementedError

    def label_json(self, label):
        return [format_rational(x) for x in label]


class FockModule(Module):
    """Fock module M(1, lam), or the g-twisted Fock module when ``twisted``.

    ``parity`` optionally restricts the basis to partitions with an even (0)
    or odd (1) number of parts; the even part of the adjoint module is the
    adjoint module of the fixed-point subalgebra.
    """

    def __init__(self, voa: HeisenbergVOA, lam=0, twisted: bool = False, cache: bool | None = None,
                 parity: int | None = None):
        self.voa = voa
        self.twisted = twisted
        self.T = 2 if twisted else 1
        self.lam = None if twisted else _num(as_rational(lam))
        self.parity = parity
        self.cache = voa.cache if cache is None else cache
        self._memo: dict = {}
        self._exp_memo: dict = {}
        if twisted:
            self.kind = "twisted_fock"
            self.name = "M(1)^tw"
        elif parity is not None:
            self.kind = "even_adjoint" if parity == 0 else "odd_adjoint"
            self.name = f"M(1)^{parity}"
        else:
            self.kind = "fock"
            self.name = f"M(1,{format_rational(self.lam)})"

    def clear_cache(self) -> None:
        self._memo.clear()
        self._exp_memo.clear()

    def basis(self, degree):
        d = Fraction(degree)
        if d < 0:
            return ()
        if self.twisted:
            out = half_odd_partitions(d)
        elif d.denominator != 1:
            return ()
        else:
            out = integer_partitions(int(d))
        if self.parity is not None:
            out = tuple(lab for lab in out if len(lab) % 2 == self.parity)
        return out

    def degree_of(self, label):
        return sum(label)

    @property
    def vacuum(self) -> GradedVector:
        return GradedVector(self, {(): 1})

    # -- the engine ----------------------------------------------------

    def _alpha_annihilate(self, j, label):
        if j == 0:
            return (self.lam, label) if self.lam else None
        k = label.count(j)
        if not k:
            return None
        return j * k, _remove_part(label, j)

    def _w(self, x: tuple, q, e: tuple) -> dict:
        """Coefficient of z^(-q-1) of the normal-ordered product W(x, z), applied to e."""
        if self.cache:
            key = (x, q, e)
            hit = self._memo.get(key)
            if hit is not None:
                return hit
        if not x:
            res = {e: 1} if q == -1 else {}
        else:
            n = x[0]
            rest = x[1:]
            out_deg = sum(e) + sum(x) - q - 1
            res = {}
            if out_deg >= 0:
                half = self.twisted
                # creation modes a(j), j < 0, with -j <= out_deg
                j = -HALF if half else -1
                while -j <= out_deg:
                    c = binom(_num(-j - 1), n - 1)
                    if c:
                        inner = self._w(rest, _num(q - j - n), e)
                        part = -j
                        for lab, coef in inner.items():
                            lab2 = _add_part(lab, part)
                            y = res.get(lab2, 0) + c * coef
                            if y:
                                res[lab2] = y
                            else:
                                del res[lab2]
                    j -= 1
                # annihilation modes a(j), j >= 0
                js = sorted(set(e))
                if not half and self.lam:
                    js = [0] + js
                for j in js:
                    got = self._alpha_annihilate(j, e)
                    if got is None:
                        continue
                    coef0, e2 = got
                    c = binom(_num(-j - 1), n - 1)
                    if c:
                        inner = self._w(rest, _num(q - j - n), e2)
                        _addto(res, inner, c * coef0)
        if self.cache:
            self._memo[key] = res
        return res

    def exp_delta(self, x: tuple) -> dict:
        """exp(Delta_z) applied to the monomial x: {r: {label: coeff}} meaning sum_r z^-r (...)."""
        hit = self._exp_memo.get(x)
        if hit is not None:
            return hit
        wt = sum(x)
        cmn = delta_coefficients(max(wt, 1))
        out = {0: {x: 1}}
        current = {0: {x: Fraction(1)}}
        k = 1
        while current:
            nxt: dict = {}
            for r, vec in current.items():
                for lab, coef in vec.items():
                    for (m, n), c in cmn.items():
                        if m < 1 or n < 1 or m + n > sum(lab):
                            continue
                        g1 = self.voa.annihilate(n, lab)
                        if g1 is None:
                            continue
                        g2 = self.voa.annihilate(m, g1[1])
                        if g2 is None:
                            continue
                        slot = nxt.setdefault(r + m + n, {})
                        slot[g2[1]] = slot.get(g2[1], 0) + coef * c * g1[0] * g2[0]
            current = {}
            for r, vec in nxt.items():
                vec = {lab: y / k for lab, y in vec.items() if y}
                if vec:
                    current[r] = vec
                    _addto(out.setdefault(r, {}), vec, 1)
            k += 1
        out = {r: vec for r, vec in out.items() if vec}
        if self.cache:
            self._exp_memo[x] = out
        return out

    def mode_basis(self, x: tuple, p, e: tuple) -> dict:
        """(x)_p e for a monomial x of V and a basis label e."""
        if not self.twisted:
            return self._w(x, p, e)
        res: dict = {}
        for r, vec in self.exp_delta(x).items():
            q = _num(p - r)
            for y, c in vec.items():
                _addto(res, self._w(y, q, e), c)
        return res

    def check_lattice(self, x: tuple, p) -> bool:
        if type(p) is int:
            return not (self.twisted and len(x) % 2)
        p = Fraction(p)
        if not self.twisted:
            return p.denominator == 1
        return (p - Fraction(len(x) % 2, 2)).denominator == 1

    def mode(self, v: dict, p, w: dict) -> dict:
        """v_p w on plain coefficient dicts; raises LatticeMismatch off the mode lattice."""
        if type(p) is not int:
            p = _num(Fraction(p))
        res: dict = {}
        for x, cx in v.items():
            if not self.check_lattice(x, p):
                raise LatticeMismatch(f"mode index {p} is not on the lattice of {x}")
            for e, ce in w.items():
                if self.parity is not None and (len(x) % 2):
                    raise LatticeMismatch("odd vectors do not act on a single-parity sector")
                _addto(res, self.mode_basis(x, p, e), cx * ce)
        return res


class DirectSumModule(Module):
    """Direct sum of Fock modules; labels are (summand index, partition)."""

    def __init__(self, voa: HeisenbergVOA, summands):
        self.voa = voa
        self.summands = list(summands)
        self.T = self.summands[0].T
        self.kind = "direct_sum"
        self.name = " + ".join(m.name for m in self.summands)

    def basis(self, degree):
        return tuple((k, lab) for k, m in enumerate(self.summands) for lab in m.basis(degree))

    def degree_of(self, label):
        return self.summands[label[0]].degree_of(label[1])

    def label_json(self, label):
        return [str(label[0])] + self.summands[label[0]].label_json(label[1])

    def mode(self, v: dict, p, w: dict) -> dict:
        by: dict = {}
        for (k, lab), c in w.items():
            by.setdefault(k, {})[lab] = c
        res = {}
        for k, part in by.items():
            for lab, c in self.summands[k].mode(v, p, part).items():
                res[(k, lab)] = c
        return res


class TrivialModule(Module):
    """M = sum_n M(n) with every M(n) a copy of the trivial VOA; labels are the degrees."""

    kind = "trivial"
    name = "C[t]"
    T = 1

    def __init__(self, voa: TrivialVOA):
        self.voa = voa

    def basis(self, degree):
        d = Fraction(degree)
        if d < 0 or d.denominator != 1:
            return ()
        return (int(d),)

    def degree_of(self, label):
        return label

    def label_json(self, label):
        return [str(label)]

    def sector(self, v):
        return 0

    def mode(self, v: dict, p, w: dict) -> dict:
        if p != -1:
            return {}
        c = v.get((), 0)
        return {lab: c * x for lab, x in w.items() if c * x}


# --- fixtures -------------------------------------------------------------


@dataclass
class Fixture:
    """A VOA with a chosen module (or the trivial pair for the counterexample)."""

    voa: GradedSpace
    module: Module
    descriptor: dict = field(default_factory=dict)

    @property
    def T(self) -> int:
        return self.module.T

    @property
    def name(self) -> str:
        return self.module.name

    @property
    def twisted(self) -> bool:
        return self.module.T > 1

    @property
    def irreducible(self) -> bool | None:
        """Known irreducibility of the fixture module (None when not known)."""
        return self.module.kind in ("fock", "twisted_fock")


def heisenberg(cache: bool | None = None) -> HeisenbergVOA:
    return HeisenbergVOA(cache=cache)


def build_trivial_voa(cache: bool | None = None) -> tuple[TrivialVOA, TrivialModule]:
    voa = TrivialVOA(cache=cache)
    return voa, TrivialModule(voa)


def parse_fixture(desc, cache: bool | None = None) -> Fixture:
    """Build a fixture from a CLI string or a JSON-style descriptor dict.

    Strings: ``heisenberg`` (adjoint), ``fock:<lam>``, ``twisted``,
    ``sum:<lam1>,<lam2>``, ``trivial``.
    """
    if isinstance(desc, dict):
        if desc.get("voa") == "trivial":
            desc = "trivial"
        else:
            mod = desc.get("module", {"kind": "adjoint"})
            kind = mod.get("kind", "adjoint")
            if kind == "fock":
                desc = f"fock:{mod.get('lambda', '0')}"
            elif kind == "twisted_fock":
                desc = "twisted"
            elif kind == "direct_sum":
                desc = "sum:" + ",".join(str(x) for x in mod.get("lambdas", []))
            else:
                desc = "heisenberg"
    s = str(desc).strip()
    if s in ("trivial",):
        voa, mod = build_trivial_voa(cache)
        return Fixture(voa, mod, {"voa": "trivial"})
    V = HeisenbergVOA(cache=cache)
    if s in ("heisenberg", "adjoint"):
        return Fixture(V, V.adjoint, {"voa": "heisenberg", "module": {"kind": "adjoint"}, "T": 1})
    if s == "twisted":
        return Fixture(V, FockModule(V, twisted=True), {"voa": "heisenberg", "module": {"kind": "twisted_fock"}, "T": 2})
    if s.startswith("fock:"):
        lam = as_rational(s.split(":", 1)[1])
        return Fixture(V, FockModule(V, lam), {"voa": "heisenberg", "module": {"kind": "fock", "lambda": format_rational(lam)}, "T": 1})
    if s.startswith("sum:"):
        lams = [as_rational(x) for x in s.split(":", 1)[1].split(",")]
        mod = DirectSumModule(V, [FockModule(V, lam) for lam in lams])
        return Fixture(V, mod, {"voa": "heisenberg", "module": {"kind": "direct_sum", "lambdas": [format_rational(x) for x in lams]}, "T": 1})
    raise ValueError(f"unknown fixture {desc!r}")


# --- public operations ----------------------------------------------------


def _check_window(module, degree, window) -> None:
    if window is None:
        return
    top = window.N if isinstance(window, TruncationWindow) else Fraction(window)
    if Fraction(degree) > top:
        raise WindowExceeded(f"result degree {degree} exceeds the module window N={top}")


def mode_action(module: Module, v: GradedVector, m, w: GradedVector, window=None) -> GradedVector:
    """v_m w, checked against the module window when one is given."""
    if window is not None:
        limit = window.D if isinstance(window, TruncationWindow) else None
        if limit is not None and any(module.voa.degree_of(x) > limit for x in v.terms):
            raise WindowExceeded("v has components beyond the V window")
        for x in v.terms:
            for e in w.terms:
                _check_window(module, module.degree_of(e), window)
                _check_window(module, module.degree_of(e) + module.voa.degree_of(x) - Fraction(m) - 1, window)
    return GradedVector(module, module.mode(v.terms, m, w.terms))


def product_in_V(V, u: GradedVector, n: int, v: GradedVector, window=None) -> GradedVector:
    if window is not None:
        top = window.D if isinstance(window, TruncationWindow) else int(window)
        for x in u.terms:
            for y in v.terms:
                if V.degree_of(x) + V.degree_of(y) - n - 1 > top:
                    raise WindowExceeded("product leaves the V window")
    return GradedVector(V, V.product_terms(u.terms, n, v.terms))


def mode_map(module: Module, v: GradedVector, m, degrees) -> DegreeMap:
    """The map v_m as a DegreeMap on the given source degrees."""
    wt = None
    comps = v.components()
    if len(comps) > 1:
        raise ValueError("mode_map needs a homogeneous vector")
    for d in comps:
        wt = d
    shift = (wt if wt is not None else 0) - Fraction(m) - 1
    blocks = {}
    for d in degrees:
        src = module.basis(d)
        tgt_deg = Fraction(d) + shift
        tgt = module.basis(tgt_deg)
        pos = {lab: i for i, lab in enumerate(tgt)}
        cols = []
        for e in src:
            img = module.mode(v.terms, m, {e: 1}) if v.terms else {}
            col = [0] * len(tgt)
            for lab, c in img.items():
                col[pos[lab]] = c
            cols.append(col)
        blocks[d] = Matrix([[cols[j][i] for j in range(len(src))] for i in range(len(tgt))], len(src))
    return DegreeMap(module, module, shift, blocks)


def zero_mode_block(module: Module, v: GradedVector, degree) -> Matrix:
    """o(v) restricted to the degree piece M(degree) as a matrix."""
    src = module.basis(degree)
    pos = {lab: i for i, lab in enumerate(src)}
    n = len(src)
    cols = [[0] * n for _ in range(n)]
    for deg, comp in v.components().items():
        if module.T > 1:
            # o(v) = 0 for v in the odd eigenspace; those modes are off the lattice
            comp = {x: c for x, c in comp.items() if module.voa.parity(x) == 0}
            if not comp:
                continue
        m = deg - 1
        for j, e in enumerate(src):
            for lab, c in module.mode(comp, m, {e: 1}).items():
                cols[j][pos[lab]] += c
    return Matrix([[cols[j][i] for j in range(n)] for i in range(n)], n)


def o(module: Module, v: GradedVector, degrees) -> DegreeMap:
    """Zero mode o(v) = v_{wt v - 1}, extended additively, on the given degrees."""
    return DegreeMap(module, module, 0, {d: zero_mode_block(module, v, d) for d in degrees})


def L(module: Module, k: int, degrees) -> DegreeMap:
    """L(k) = omega_{k+1} on the given source degrees."""
    return mode_map(module, module.voa.omega, k + 1, degrees)


def lowest_weight(module: Module):
    """L(0)-eigenvalue on M(0), computed by the mode engine."""
    blk = zero_mode_block(module, module.voa.omega, 0)
    if not blk.is_scalar():
        raise ValueError("L(0) is not scalar on M(0)")
    return blk[0, 0] if blk.nrows else None


def L_on_V(V: HeisenbergVOA, k: int, v: dict) -> dict:
    """L(k) v inside V on coefficient dicts."""
    return V.product_terms(V.omega.terms, k + 1, v)
