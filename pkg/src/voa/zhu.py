"""Zhu-type algebras A_n(V) and A_{g,n}(V) at truncation.

O is generated by u o v for basis vectors u, v of weight <= P together with
all of (L(-1)+L(0))V. The second family is handled exactly: work in the
coordinates of V/(L(-1)+L(0))V (see :mod:`voa.liehat`), where O becomes the
span of the images of the finitely many circle products. Canonical coset
forms are those coordinates reduced modulo that span.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import floor

from .errors import WindowExceeded
from .graded import FlatBasis, GradedVector, TruncationWindow
from .liehat import GradedQuotient, L_zero_plus_minus_one, TranslationSplit
from .boson import zero_mode_block
from .qlinalg import Matrix, SubspaceBasis, format_rational, kernel, rref
from .series import binom

HOLDS, FAILS, INCONCLUSIVE = "holds", "fails", "inconclusive"


@dataclass(frozen=True)
class ZhuIndex:
    """n = l + i/T with l >= 0 an integer and 0 <= i < T."""

    n: Fraction
    T: int = 1

    def __post_init__(self):
        n = Fraction(self.n)
        object.__setattr__(self, "n", n)
        if n < 0 or (n * self.T).denominator != 1:
            raise ValueError(f"index {n} is not in (1/{self.T})Z_+")

    @property
    def l(self) -> int:
        return floor(self.n)

    @property
    def i(self) -> int:
        return int((self.n - self.l) * self.T)

    def __str__(self):
        return format_rational(self.n)


def delta_i(i: int, r: int, T: int) -> int:
    if r == T:
        return 1
    return 1 if i >= r else 0


def _add(acc: dict, vec: dict, c=1) -> None:
    for lab, x in vec.items():
        y = acc.get(lab, 0) + c * x
        if y:
            acc[lab] = y
        else:
            acc.pop(lab, None)


def _res_sum(V, u: dict, wt_u, v: dict, wt_v, e, k) -> dict:
    """Res_z Y(u,z) v (1+z)^e / z^k = sum_j binom(e, j) u_{j-k} v."""
    out: dict = {}
    for j in range(0, k + wt_u + wt_v):
        c = binom(e, j)
        if c:
            _add(out, V.product_terms(u, j - k, v), c)
    return out


def _parts(V, x: GradedVector):
    """Homogeneous, sector-pure pieces (weight, sector, terms)."""
    groups: dict = {}
    for lab, c in x.terms.items():
        key = (V.degree_of(lab), V.parity(lab))
        groups.setdefault(key, {})[lab] = c
    return [(w, r, t) for (w, r), t in sorted(groups.items())]


def twisted_exponents(wt_u, r: int, idx: ZhuIndex, literal: bool = False) -> tuple:
    """(e, k) in Res_z Y(u,z)v (1+z)^e / z^k for u in V^r.

    e = wt u - 1 + d_i(r) + l + r/T and k = 2l + d_i(r) + d_i(T-r), plus 1 when
    r > 0 unless ``literal``. Without that extra power the odd-sector products
    fail to act by zero on M(n) (at n = 0, 1 lies in the span) and the n = 0
    case is not the classical twisted product with z^(1 + delta_{r,0}).
    """
    T, l, i = idx.T, idx.l, idx.i
    dr = delta_i(i, r, T)
    e = wt_u - 1 + dr + l + Fraction(r, T)
    k = 2 * l + dr + delta_i(i, T - r, T)
    if r and not literal:
        k += 1
    return e, k


def circ(V, u: GradedVector, v: GradedVector, idx: ZhuIndex, twisted: bool = False,
         literal: bool = False) -> GradedVector:
    """u o_n v (twisted: u o_{g,n} v), extended bilinearly over homogeneous sector pieces."""
    out: dict = {}
    T = idx.T
    for wu, r, ut in _parts(V, u):
        for wv, _, vt in _parts(V, v):
            if twisted:
                e, k = twisted_exponents(wu, r if T > 1 else 0, idx, literal)
            else:
                e = wu + idx.n
                k = 2 * int(idx.n) + 2
            e = e.numerator if isinstance(e, Fraction) and e.denominator == 1 else e
            _add(out, _res_sum(V, ut, wu, vt, wv, e, k))
    return GradedVector(V, out)


def star(V, u: GradedVector, v: GradedVector, idx: ZhuIndex, twisted: bool = False) -> GradedVector:
    """u *_n v (twisted: r = 0 uses l; r > 0 gives 0)."""
    out: dict = {}
    n = idx.l if twisted else int(idx.n)
    for wu, r, ut in _parts(V, u):
        if twisted and idx.T > 1 and r:
            continue
        for wv, _, vt in _parts(V, v):
            for m in range(0, n + 1):
                c = (-1) ** m * binom(m + n, n)
                _add(out, _res_sum(V, ut, wu, vt, wv, wu + n, n + m + 1), c)
    return GradedVector(V, out)


def classical_product(V, u: GradedVector, v: GradedVector) -> GradedVector:
    """sum_j binom(wt u, j) u_{j-1} v, the original degree-zero product."""
    out: dict = {}
    for comp in u.homogeneous_parts():
        wu = comp.weight
        for j in range(0, wu + 1 + max(v.degrees(), default=0) + 1):
            c = binom(wu, j)
            if c:
                _add(out, V.product_terms(comp.terms, j - 1, v.terms), c)
    return GradedVector(V, out)


# --- the truncated algebra -----------------------------------------------


@dataclass
class TruncatedZhuAlgebra:
    V: object
    idx: ZhuIndex
    twisted: bool
    window: TruncationWindow
    quotient: GradedQuotient
    O_span: SubspaceBasis
    O_D: SubspaceBasis
    flat_D: FlatBasis
    generators: list
    P_used: int
    stabilized_at_P: int | None
    sweep: list = field(default_factory=list)
    certified: bool = False
    reps: list = field(default_factory=list)

    @property
    def stabilized(self) -> bool:
        return self.stabilized_at_P is not None

    def coords(self, x: GradedVector) -> tuple:
        return self.O_span.reduce(self.quotient.coords(x.terms))

    def in_O(self, x: GradedVector) -> bool:
        return not any(self.coords(x))

    def equivalent(self, a: GradedVector, b: GradedVector) -> bool:
        return self.in_O(a - b)

    def mul(self, a: GradedVector, b: GradedVector) -> GradedVector:
        return star(self.V, a, b, self.idx, self.twisted)

    @property
    def class_count(self) -> int:
        return len(self.reps)

    def express(self, x: GradedVector):
        """Coordinates of the class of x on the class representatives, or None outside their span."""
        target = self.coords(x)
        rows = [self.coords(r) for r in self.reps]
        n = len(rows)
        if not n:
            return [] if not any(target) else None
        width = len(target)
        aug = Matrix([[rows[j][t] for j in range(n)] + [target[t]] for t in range(width)], n + 1)
        red, piv = rref(aug)
        if n in piv:
            return None
        sol = [Fraction(0)] * n
        for rowi, p in enumerate(piv):
            sol[p] = red.rows[rowi][n]
        return sol

    def table(self) -> list:
        out = []
        for a in self.reps:
            row = []
            for b in self.reps:
                try:
                    prod = self.mul(a, b)
                    sol = self.express(prod)
                    if sol is None:
                        row.append({"outside_classes": [format_rational(x) for x in self.coords(prod)]})
                    else:
                        row.append([format_rational(x) for x in sol])
                except WindowExceeded:
                    row.append("WindowExceeded")
            out.append(row)
        return out

    def to_json(self, with_table: bool = True) -> dict:
        out = {
            "n": str(self.idx),
            "T": self.idx.T,
            "twisted": self.twisted,
            "window": self.window.to_json(),
            "quotient_window": self.quotient.top,
            "O_dim_in_window": self.O_D.dim,
            "O_span_dim": self.O_span.dim,
            "class_count": self.class_count,
            "classes": [r.to_json() for r in self.reps],
            "P_used": self.P_used,
            "stabilized_at_P": self.stabilized_at_P,
            "sweep": [[p, d] for p, d in self.sweep],
            "certified": self.certified,
        }
        if with_table:
            out["table"] = self.table()
        return out


def quotient_top(idx: ZhuIndex, p_max: int, D: int) -> int:
    """Largest weight ever reduced: generators (2P+2l+1, one more when twisted), products and triples."""
    l = idx.l
    gen = 2 * p_max + 2 * l + (2 if idx.T > 1 else 1)
    return max(gen, 2 * D + 2 * l, 6 + 4 * l)


def _generator_pairs(V, P: int):
    labs = [lab for k in range(P + 1) for lab in V.basis(k)]
    return [(a, b) for a in labs for b in labs]


def build_zhu(V, idx: ZhuIndex, twisted: bool, window: TruncationWindow, p_max: int | None = None,
              split: TranslationSplit | None = None, literal: bool = False) -> TruncatedZhuAlgebra:
    """O_n(V) (or O_{g,n}(V)) from generators of weight <= P, swept over P until O cap V_{<=D} is stable."""
    D = window.D
    P0 = window.P
    p_max = max(P0, p_max if p_max is not None else P0 + 1)
    top = quotient_top(idx, p_max, D)
    Q = GradedQuotient(V, top, split)
    flat_D = FlatBasis.upto(V, D)
    # quotient coordinates of the V_{<=D} basis
    base_cols = [Q.coords({lab: 1}) for lab in flat_D.labels]
    gens_done: set = set()
    gens: list = []
    span_rows: list = []
    span = SubspaceBasis.zero(Q.dim)
    sweep = []
    previous = None
    stabilized = None
    O_D = None
    P_used = P0
    for P in range(P0, p_max + 1):
        for a, b in _generator_pairs(V, P):
            if (a, b) in gens_done:
                continue
            gens_done.add((a, b))
            x = circ(V, GradedVector(V, {a: 1}), GradedVector(V, {b: 1}), idx, twisted, literal)
            if x.terms:
                gens.append(((a, b), x))
                span_rows.append(Q.coords(x.terms))
        span = SubspaceBasis(Q.dim, span_rows) if span_rows else SubspaceBasis.zero(Q.dim)
        # O cap V_{<=D}: kernel of the reduced quotient map on V_{<=D}
        red = [span.reduce(c) for c in base_cols]
        mat = Matrix([[red[j][t] for j in range(len(red))] for t in range(Q.dim)], len(red))
        O_D = kernel(mat)
        sweep.append((P, O_D.dim))
        P_used = P
        if previous is not None and O_D == previous:
            stabilized = P - 1
            break
        previous = O_D
    A = TruncatedZhuAlgebra(
        V=V, idx=idx, twisted=twisted, window=window, quotient=Q, O_span=span, O_D=O_D,
        flat_D=flat_D, generators=gens, P_used=P_used, stabilized_at_P=stabilized, sweep=sweep,
    )
    # class representatives: greedy over the V_{<=D} basis
    chosen: list = []
    reps = []
    for lab, c in zip(flat_D.labels, base_cols):
        r = span.reduce(c)
        if not any(r):
            continue
        trial = SubspaceBasis(Q.dim, chosen + [r])
        if trial.dim > len(chosen):
            chosen.append(r)
            reps.append(GradedVector(V, {lab: 1}))
    A.reps = reps
    return A


def O_generators_in_V(A: TruncatedZhuAlgebra) -> list:
    """Explicit O-generators: the circle products and (L(-1)+L(0))u, u of weight <= P_used - 1."""
    V = A.V
    out = [x for _, x in A.generators]
    for k in range(A.P_used):
        for lab in V.basis(k):
            y = GradedVector(V, L_zero_plus_minus_one(V, {lab: 1}))
            if y.terms:
                out.append(y)
    return out


def _basis_upto(V, k: int) -> list:
    return [GradedVector(V, {lab: 1}) for d in range(k + 1) for lab in V.basis(d)]


def verify_zhu_properties(A: TruncatedZhuAlgebra, modules=(), smaller=(), assoc_weight: int = 2,
                          hom_weight: int = 3) -> dict:
    """Associativity, identity, centrality, O_n within O_m, and the o-representation on M(i), i <= n."""
    V = A.V
    checks: dict = {}
    failures: list = []
    counts: dict = {}

    def record(name, ok, detail=None):
        counts[name] = counts.get(name, 0) + 1
        if not ok:
            checks[name] = False
            if detail is not None and len(failures) < 20:
                failures.append({"check": name, **detail})
        else:
            checks.setdefault(name, True)

    small = _basis_upto(V, assoc_weight)
    for a in small:
        for b in small:
            ab = A.mul(a, b)
            for c in small:
                lhs = A.mul(ab, c)
                rhs = A.mul(a, A.mul(b, c))
                ok = A.equivalent(lhs, rhs)
                record("associativity", ok, None if ok else {"a": a.to_json(), "b": b.to_json(), "c": c.to_json()})
    one = V.vacuum
    omega = V.omega
    for x in _basis_upto(V, A.window.D):
        ok = A.equivalent(A.mul(one, x), x) and A.equivalent(A.mul(x, one), x)
        record("identity", ok, None if ok else {"x": x.to_json()})
        ok = A.equivalent(A.mul(omega, x), A.mul(x, omega))
        record("omega_central", ok, None if ok else {"x": x.to_json()})
    for B in smaller:
        ok = A.O_D.issubset(B.O_D)
        record("O_containment", ok, None if ok else {"n": str(A.idx), "m": str(B.idx)})
    if not A.twisted:
        if A.idx.n == 0:
            for a in _basis_upto(V, 4):
                for b in _basis_upto(V, 4):
                    ok = star(V, a, b, A.idx) == classical_product(V, a, b)
                    record("classical_oracle", ok, None if ok else {"u": a.to_json(), "v": b.to_json()})
    gens = O_generators_in_V(A)
    hom = _basis_upto(V, hom_weight)
    for M in modules:
        degrees = M.degrees_upto(A.idx.n)
        for x in gens:
            for d in degrees:
                ok = zero_mode_block(M, x, d).is_zero()
                record("O_acts_by_zero", ok, None if ok else {"module": M.name, "degree": format_rational(d), "x": x.to_json()})
        for u in hom:
            for v in hom:
                prod = A.mul(u, v)
                for d in degrees:
                    lhs = zero_mode_block(M, prod, d)
                    rhs = zero_mode_block(M, u, d) @ zero_mode_block(M, v, d)
                    ok = lhs == rhs
                    record("representation", ok, None if ok else {"module": M.name, "degree": format_rational(d),
                                                                   "u": u.to_json(), "v": v.to_json()})
    names = ["associativity", "identity", "omega_central", "O_containment", "classical_oracle", "O_acts_by_zero",
             "representation"]
    ordered = {k: checks[k] for k in names if k in checks}
    if all(ordered.values()):
        verdict = HOLDS if A.stabilized else INCONCLUSIVE
    else:
        verdict = FAILS
    return {
        "verdict": verdict,
        "checks": ordered,
        "counts": {k: counts[k] for k in names if k in counts},
        "assertions": sum(counts.values()),
        "failures": failures,
        "stabilized_at_P": A.stabilized_at_P,
        "certified": False,
    }
