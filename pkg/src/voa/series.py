"""Truncated formal Laurent series with rational exponents, and the Jacobi checker.

Binomial powers ``(x + s*y)**e`` are always expanded in nonnegative powers of
the second variable ``y``; the :class:`Binomial` type makes this structural.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import ceil, floor, lcm
from typing import Mapping, Sequence

from .errors import LatticeMismatch, WindowExceeded
from .qlinalg import as_rational, format_rational, int_matmul


@lru_cache(maxsize=65536)
def binom(e, j: int):
    """Generalized binomial coefficient e(e-1)...(e-j+1)/j!."""
    if j < 0:
        raise ValueError("j must be nonnegative")
    if j == 0:
        return 1
    if type(e) is int or (isinstance(e, Fraction) and e.denominator == 1):
        n = int(e)
        num = 1
        for t in range(j):
            num *= n - t
        den = 1
        for t in range(2, j + 1):
            den *= t
        return num // den
    e = Fraction(e)
    out = Fraction(1)
    for t in range(j):
        out *= (e - t) / (t + 1)
    return out


def _num(x):
    """Collapse integral Fractions to int so integer-only paths stay fast."""
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x


def _on_lattice(x, offset) -> bool:
    return (Fraction(x) - Fraction(offset)).denominator == 1


class TruncatedSeries:
    """Finitely many coefficients of a formal series in several variables.

    ``window[k] = (lo, hi)`` bounds the exponent of variable ``k``; only
    exponents inside the window are represented, and ``offsets[k]`` fixes the
    coset (mod 1) the exponents of that variable live on.
    """

    __slots__ = ("variables", "coeffs", "window", "offsets")

    def __init__(self, variables: Sequence[str], coeffs: Mapping, window: Sequence, offsets=None):
        self.variables = tuple(variables)
        self.window = tuple((Fraction(lo), Fraction(hi)) for lo, hi in window)
        self.offsets = tuple(Fraction(o) for o in (offsets or [0] * len(self.variables)))
        if len(self.window) != len(self.variables) or len(self.offsets) != len(self.variables):
            raise ValueError("window/offsets must match the variables")
        clean = {}
        for exps, c in coeffs.items():
            exps = tuple(_num(Fraction(x)) for x in exps)
            if not self._inside(exps):
                continue
            for x, o in zip(exps, self.offsets):
                if not _on_lattice(x, o):
                    raise LatticeMismatch(f"exponent {x} not on lattice {o}+Z")
            if c:
                clean[exps] = clean.get(exps, 0) + c
        self.coeffs = {k: v for k, v in clean.items() if v}

    def _inside(self, exps) -> bool:
        return all(lo <= x <= hi for x, (lo, hi) in zip(exps, self.window))

    def _like(self, coeffs, window=None, offsets=None):
        return TruncatedSeries(self.variables, coeffs, window or self.window, offsets or self.offsets)

    def _compatible(self, other):
        if other.variables != self.variables:
            raise ValueError("series in different variables")

    def coefficient(self, exps):
        exps = tuple(_num(Fraction(x)) for x in exps)
        if not self._inside(exps):
            raise WindowExceeded(f"exponent {exps} outside the series window")
        return self.coeffs.get(exps, 0)

    def __add__(self, other):
        self._compatible(other)
        if tuple(o % 1 for o in other.offsets) != tuple(o % 1 for o in self.offsets):
            raise LatticeMismatch("adding series on different exponent lattices")
        window = tuple((max(a[0], b[0]), min(a[1], b[1])) for a, b in zip(self.window, other.window))
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        return self._like(out, window)

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            c = other
            return self._like({k: v * c for k, v in self.coeffs.items()})
        self._compatible(other)
        offsets = tuple(a + b for a, b in zip(self.offsets, other.offsets))
        # the product lives on the common window; it is exact there when
        # neither factor had terms cut off below its window (power series)
        window = tuple((max(a[0], b[0]), min(a[1], b[1])) for a, b in zip(self.window, other.window))
        out: dict = {}
        for k1, v1 in self.coeffs.items():
            for k2, v2 in other.coeffs.items():
                k = tuple(x + y for x, y in zip(k1, k2))
                out[k] = out.get(k, 0) + v1 * v2
        return TruncatedSeries(self.variables, out, window, offsets)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.variables == other.variables and self.coeffs == other.coeffs

    def __repr__(self):
        return f"TruncatedSeries({self.variables}, {len(self.coeffs)} terms)"

    def residue(self, var: str):
        """Coefficient of ``var**-1``, as a series in the remaining variables (or a scalar)."""
        k = self.variables.index(var)
        lo, hi = self.window[k]
        if not lo <= -1 <= hi:
            raise WindowExceeded(f"exponent -1 of {var} was truncated away")
        if not _on_lattice(-1, self.offsets[k]):
            return 0 if len(self.variables) == 1 else self._drop(k, {})
        picked = {e[:k] + e[k + 1:]: c for e, c in self.coeffs.items() if e[k] == -1}
        if len(self.variables) == 1:
            return picked.get((), 0)
        return self._drop(k, picked)

    def _drop(self, k, coeffs):
        return TruncatedSeries(
            self.variables[:k] + self.variables[k + 1:],
            coeffs,
            self.window[:k] + self.window[k + 1:],
            self.offsets[:k] + self.offsets[k + 1:],
        )


def monomial(variables, exps, window, coeff=1, offsets=None) -> TruncatedSeries:
    return TruncatedSeries(variables, {tuple(exps): coeff}, window, offsets)


@dataclass(frozen=True)
class Binomial:
    """The base ``first + sign*second``; ``first`` may be None for the constant 1."""

    first: str | None
    second: str
    sign: int = 1


def expand_power(base: Binomial, e, variables: Sequence[str], window: Sequence) -> TruncatedSeries:
    """Expand ``base**e`` in nonnegative powers of ``base.second`` inside ``window``."""
    e = as_rational(e)
    variables = tuple(variables)
    win = tuple((Fraction(lo), Fraction(hi)) for lo, hi in window)
    j_idx = variables.index(base.second)
    i_idx = variables.index(base.first) if base.first is not None else None
    offsets = [Fraction(0)] * len(variables)
    if i_idx is not None:
        offsets[i_idx] = e - floor(e)
    hi_j = win[j_idx][1]
    coeffs = {}
    j = 0
    while j <= hi_j:
        c = binom(_num(e), j) * base.sign ** j
        exps = [0] * len(variables)
        exps[j_idx] = j
        if i_idx is not None:
            exps[i_idx] = e - j
            if exps[i_idx] < win[i_idx][0]:
                break
        coeffs[tuple(exps)] = c
        j += 1
    return TruncatedSeries(variables, coeffs, win, offsets)


def delta_series(num: Binomial, den: str, variables, window, offset=0, den_sign: int = 1) -> TruncatedSeries:
    """Truncation of ``sum_{k in offset+Z} den_sign**k * den**(-k-1) * num**k``.

    With ``num = z1 - z2``, ``den = z0`` this is z0^-1 delta((z1-z2)/z0); with
    ``num = z2 - z1``, ``den_sign = -1`` it is z0^-1 delta((z2-z1)/(-z0)); with
    ``num = z1 - z0``, ``den = z2``, ``offset = -r/T`` it is the twisted factor
    z2^-1 ((z1-z0)/z2)^(-r/T) delta((z1-z0)/z2).
    """
    variables = tuple(variables)
    win = tuple((Fraction(lo), Fraction(hi)) for lo, hi in window)
    d = variables.index(den)
    lo, hi = win[d]
    offset = Fraction(offset)
    out = None
    # den exponent -k-1 must lie in [lo, hi]
    k = Fraction(floor(-hi - 1 - offset)) + offset
    while -k - 1 >= lo:
        if -k - 1 <= hi:
            part = expand_power(num, k, variables, win)
            coeffs = {}
            for exps, c in part.coeffs.items():
                exps = list(exps)
                exps[d] += -k - 1
                sgn = 1
                if den_sign == -1:
                    if k.denominator != 1:
                        raise LatticeMismatch("sign power needs an integral exponent")
                    sgn = -1 if int(k) % 2 else 1
                coeffs[tuple(exps)] = c * sgn
            offs = list(part.offsets)
            offs[d] = (-k - 1) % 1
            term = TruncatedSeries(variables, coeffs, win, offs)
            out = term if out is None else out + term
        k += 1
    if out is None:
        out = TruncatedSeries(variables, {}, win)
    return out


def delta(var: str, window) -> TruncatedSeries:
    """delta(z) = sum_n z^n truncated to ``window``."""
    lo, hi = (int(floor(Fraction(window[0]))), int(floor(Fraction(window[1]))))
    return TruncatedSeries((var,), {(n,): 1 for n in range(lo, hi + 1)}, [(lo, hi)])


def log_one_plus(t: TruncatedSeries, terms: int) -> TruncatedSeries:
    """log(1 + t) for a series t without constant term, to ``terms`` orders."""
    out = t * 0
    power = t
    for k in range(1, terms + 1):
        out = out + power * Fraction((-1) ** (k + 1), k)
        power = power * t
    return out


# --- Jacobi identity on concrete modules ---------------------------------


def _exps(bound, offset):
    offset = Fraction(offset) % 1
    start = ceil(-Fraction(bound) - offset) + offset
    out = []
    x = start
    while x <= bound:
        out.append(_num(x))
        x += 1
    return out


def exponent_pairs(bound, offset_a=0, offset_b=0) -> list[tuple]:
    """All (a, b) with |a|, |b| <= bound on the lattices offset_a+Z, offset_b+Z."""
    return [(a, b) for a in _exps(bound, offset_a) for b in _exps(bound, offset_b)]


def _scale_rows(rows):
    """Scale each rational row by a positive integer to make it integral."""
    out = []
    for row in rows:
        den = 1
        for x in row:
            if type(x) is Fraction and x.denominator != 1:
                den = lcm(den, x.denominator)
        if den == 1:
            out.append([int(x) for x in row])
        else:
            out.append([x.numerator * (den // x.denominator) if type(x) is Fraction else x * den for x in row])
    return out


def _sumvec(acc, vec, c):
    for lab, x in vec.items():
        acc[lab] = acc.get(lab, 0) + c * x


class JacobiReport(dict):
    """Report ``{checked, nonzero, failures: [{a, b, c, lhs, rhs}]}``."""

    @property
    def ok(self) -> bool:
        return not self["failures"]


def verify_jacobi(module, u, v, w, powers=None, N=None, bound=6) -> JacobiReport:
    """Check the (twisted) Jacobi identity coefficient-by-coefficient on ``w``.

    For each requested ``(a, b)`` the coefficient of ``z0^c z1^a z2^b`` of

        z0^-1 d((z1-z2)/z0) Y(u,z1)Y(v,z2) w - z0^-1 d((z2-z1)/-z0) Y(v,z2)Y(u,z1) w
            = z2^-1 ((z1-z0)/z2)^(-r/T) d((z1-z0)/z2) Y(Y(u,z0)v, z2) w

    is computed for every integer ``c`` whose output degree
    ``F = deg w + wt u + wt v + a + b + c + 1`` lies in ``[0, N]``. Smaller ``c``
    give output degree < 0 where all three terms vanish identically, so the
    check is complete for every coefficient landing in the module window.
    Each coefficient is a finite sum: the z2-sum of term one stops once v_q
    kills w, the z1-sum of term two once u_p kills w, and the z0-sum of term
    three once u_s v = 0 (s >= wt u + wt v).
    """
    V = module.voa
    T = module.T
    u_terms = u.terms
    v_terms = v.terms
    w_terms = w.terms
    wt_u, wt_v = u.weight, v.weight
    deg_w = w.weight
    if N is None:
        raise ValueError("module depth N is required")
    N = Fraction(N)
    if deg_w > N:
        raise WindowExceeded(f"w has degree {deg_w} beyond the module window N={N}")
    r_u = module.sector(u) if T > 1 else 0
    r_v = module.sector(v) if T > 1 else 0
    rho_u, rho_v = Fraction(r_u, T), Fraction(r_v, T)
    if powers is None:
        powers = exponent_pairs(bound, -rho_u, -rho_v)
    for a, b in powers:
        if not _on_lattice(a, -rho_u) or not _on_lattice(b, -rho_v):
            raise LatticeMismatch(f"exponents ({a}, {b}) not on the lattice of the sectors")

    cache1: dict = {}
    cache2: dict = {}
    cache3: dict = {}
    cache_v: dict = {}

    def x_q(q):  # v_q w
        if q not in cache_v:
            cache_v[q] = module.mode(v_terms, q, w_terms)
        return cache_v[q]

    def y_p(p):  # u_p w
        key = ("u", p)
        if key not in cache_v:
            cache_v[key] = module.mode(u_terms, p, w_terms)
        return cache_v[key]

    def p1(S, q):
        key = (S, q)
        if key not in cache1:
            xq = x_q(q)
            cache1[key] = module.mode(u_terms, S - q, xq) if xq else {}
        return cache1[key]

    def p2(S, p):
        key = (S, p)
        if key not in cache2:
            yp = y_p(p)
            cache2[key] = module.mode(v_terms, S - p, yp) if yp else {}
        return cache2[key]

    uv_cache: dict = {}

    def p3(S, s):
        key = (S, s)
        if key not in cache3:
            if s not in uv_cache:
                uv_cache[s] = V.product_terms(u_terms, s, v_terms)
            zs = uv_cache[s]
            cache3[key] = module.mode(zs, S - s, w_terms) if zs else {}
        return cache3[key]

    checked = 0
    nonzero = 0
    failures = []
    # exponents in units of 1/T so the coefficient loops stay in integers
    dw, du, dv = int(deg_w * T), int(wt_u * T), int(wt_v * T)
    base = dw + du + dv + T
    scaled = [(a, b, int(Fraction(a) * T), int(Fraction(b) * T)) for a, b in powers]
    t3_rows: dict = {}

    def t3_row(a, n):  # binom(a + i, i), i < n
        row = t3_rows.get(a)
        if row is None or len(row) < n:
            row = [binom(_num(Fraction(a) + i), i) for i in range(n)]
            t3_rows[a] = row
        return row

    def unscale(x):
        return x // T if x % T == 0 else Fraction(x, T)

    Fs = 0
    while Fraction(Fs, T) <= N:
        F = unscale(Fs)
        S = _num(deg_w + wt_u + wt_v - F - 2)
        rows = []
        keys = []
        columns: dict = {}
        col_vecs = []
        for a, b, A, B in scaled:
            cs = Fs - base - A - B
            if cs % T:
                continue
            c = cs // T
            k = -c - 1
            coeffs: dict = {}
            # term one: q = i - b - 1
            i_max = (dw + dv + B) // T
            bc = 1
            for i in range(0, i_max + 1):
                if i:
                    bc = bc * (k - i + 1) // i
                if bc:
                    key = (1, (i - 1) * T - B)
                    j = columns.get(key)
                    if j is None:
                        j = columns[key] = len(col_vecs)
                        col_vecs.append(key)
                    coeffs[j] = coeffs.get(j, 0) + (-bc if i & 1 else bc)
            # term two: p = i - a - 1, sign (-1)^k, subtracted
            sgn = 1 if k % 2 else -1
            i_max = (dw + du + A) // T
            bc = 1
            for i in range(0, i_max + 1):
                if i:
                    bc = bc * (k - i + 1) // i
                if bc:
                    key = (2, (i - 1) * T - A)
                    j = columns.get(key)
                    if j is None:
                        j = columns[key] = len(col_vecs)
                        col_vecs.append(key)
                    coeffs[j] = coeffs.get(j, 0) + (-sgn * bc if i & 1 else sgn * bc)
            # term three: s = i - c - 1, subtracted
            n3 = (du + dv) // T + c + 1
            if n3 > 0:
                row3 = t3_row(a, n3)
                for i in range(n3):
                    bc = row3[i]
                    if bc:
                        key = (3, (i - c - 1) * T)
                        j = columns.get(key)
                        if j is None:
                            j = columns[key] = len(col_vecs)
                            col_vecs.append(key)
                        coeffs[j] = coeffs.get(j, 0) + (bc if i & 1 else -bc)
            rows.append(coeffs)
            keys.append((a, b, c))
        checked += len(rows)
        if rows:
            basis = module.basis(F)
            pos = {lab: i for i, lab in enumerate(basis)}
            vecs = []
            for kind, idx in col_vecs:
                idx = unscale(idx)
                vec = p1(S, idx) if kind == 1 else p2(S, idx) if kind == 2 else p3(S, idx)
                dense = [0] * len(basis)
                for lab, x in vec.items():
                    dense[pos[lab]] = x
                vecs.append(dense)
            # clear denominators: P -> D P, K -> K D^-1, then scale rows of K
            dens = []
            pint = []
            for dense in vecs:
                den = 1
                for x in dense:
                    if isinstance(x, Fraction) and x.denominator != 1:
                        den = lcm(den, x.denominator)
                dens.append(den)
                pint.append([int(x * den) for x in dense] if den != 1 else [int(x) for x in dense])
            ncol = len(col_vecs)
            # row coefficients are integers except binom(a + i, i) with a off the integers
            fractional = T > 1 or any(d != 1 for d in dens)
            kmat = []
            for coeffs in rows:
                row = [0] * ncol
                for j, x in coeffs.items():
                    row[j] = Fraction(x, dens[j]) if dens[j] != 1 else x
                kmat.append(row)
            kint = _scale_rows(kmat) if fractional else kmat
            result = int_matmul(kint, pint) if pint and basis else [[] for _ in kint]
            for key, coeffs, res in zip(keys, rows, result):
                if any(coeffs.values()):
                    nonzero += 1
                if any(res):
                    failures.append(_failure(key, coeffs, [(kd, unscale(ix)) for kd, ix in col_vecs], vecs, basis, module))
        Fs += 1
    return JacobiReport(checked=checked, nonzero=nonzero, failures=failures)


def _failure(key, coeffs, col_vecs, vecs, basis, module):
    a, b, c = key
    lhs = [Fraction(0)] * len(basis)
    rhs = [Fraction(0)] * len(basis)
    for j, x in coeffs.items():
        kind = col_vecs[j][0]
        target = rhs if kind == 3 else lhs
        sgn = -1 if kind == 3 else 1
        for i, y in enumerate(vecs[j]):
            target[i] += sgn * x * y
    return {
        "a": format_rational(a),
        "b": format_rational(b),
        "c": format_rational(c),
        "lhs": [format_rational(x) for x in lhs],
        "rhs": [format_rational(x) for x in rhs],
        "basis": [module.label_json(lab) for lab in basis],
    }
