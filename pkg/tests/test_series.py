from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from voa.boson import FockModule, HeisenbergVOA, delta_coefficients
from voa.errors import LatticeMismatch, WindowExceeded
from voa.graded import GradedVector
from voa.series import (
    Binomial,
    TruncatedSeries,
    binom,
    delta,
    delta_series,
    exponent_pairs,
    expand_power,
    log_one_plus,
    monomial,
    verify_jacobi,
)

V = HeisenbergVOA()
H = V.h()


def vec(space, *labels):
    return GradedVector(space, {lab: 1 for lab in labels})


# --- binomials and expansions ------------------------------------------------


def test_binom_examples():
    assert binom(1, 1) == 1
    assert binom(-1, 2) == 1
    assert binom(Fraction(1, 2), 2) == Fraction(-1, 8)
    assert binom(5, 7) == 0
    with pytest.raises(ValueError):
        binom(3, -1)


@given(st.integers(-8, 8), st.integers(0, 8))
def test_binom_pascal(n, j):
    assert binom(n + 1, j + 1) == binom(n, j) + binom(n, j + 1)


@given(st.fractions(min_value=-5, max_value=5, max_denominator=6), st.integers(0, 6))
def test_binom_pascal_rational(e, j):
    assert binom(e + 1, j + 1) == binom(e, j) + binom(e, j + 1)


def test_expand_linear():
    s = expand_power(Binomial(None, "z"), 1, ["z"], [(0, 5)])
    assert s.coeffs == {(0,): 1, (1,): 1}


def test_expand_geometric():
    s = expand_power(Binomial("z1", "z2", -1), -1, ["z1", "z2"], [(-8, 8), (0, 5)])
    assert s.coeffs == {(-1 - j, j): 1 for j in range(6)}


def test_expand_square_root():
    s = expand_power(Binomial(None, "z"), Fraction(1, 2), ["z"], [(0, 3)])
    assert [s.coefficient((j,)) for j in range(4)] == [1, Fraction(1, 2), Fraction(-1, 8), Fraction(1, 16)]


def test_square_root_squares_to_linear():
    s = expand_power(Binomial(None, "z"), Fraction(1, 2), ["z"], [(0, 6)])
    assert (s * s).coeffs == {(0,): 1, (1,): 1}


def test_residues():
    assert monomial(["z"], [-1], [(-3, 3)]).residue("z") == 1
    assert monomial(["z"], [0], [(-3, 3)]).residue("z") == 0
    assert delta("z", (-4, 4)).residue("z") == 1


def test_residue_outside_window():
    with pytest.raises(WindowExceeded):
        TruncatedSeries(("z",), {(0,): 1}, [(0, 3)]).residue("z")
    with pytest.raises(WindowExceeded):
        TruncatedSeries(("z",), {(0,): 1}, [(0, 3)]).coefficient((5,))


def test_lattice_is_enforced():
    with pytest.raises(LatticeMismatch):
        TruncatedSeries(("z",), {(Fraction(1, 2),): 1}, [(-2, 2)])
    a = TruncatedSeries(("z",), {(Fraction(1, 2),): 1}, [(-2, 2)], [Fraction(1, 2)])
    b = TruncatedSeries(("z",), {(0,): 1}, [(-2, 2)])
    with pytest.raises(LatticeMismatch):
        a + b
    assert (a * a).coeffs == {(1,): 1}


# --- delta functions -------------------------------------------------------


def test_delta_series_coefficients():
    """z0^-1 delta((z1-z2)/z0) has coefficient binom(n, j)(-1)^j at z0^(-n-1) z1^(n-j) z2^j."""
    win = [(-5, 5), (-6, 6), (0, 4)]
    D = delta_series(Binomial("z1", "z2", -1), "z0", ["z0", "z1", "z2"], win)
    expected = {}
    for n in range(-6, 5):
        for j in range(0, 5):
            exps = (-n - 1, n - j, j)
            if all(lo <= x <= hi for x, (lo, hi) in zip(exps, win)):
                expected[exps] = binom(n, j) * (-1) ** j
    assert D.coeffs == {k: v for k, v in expected.items() if v}


def test_twisted_delta_offset():
    win = [(-4, 4), (-5, 5), (-4, 4)]
    r = Fraction(1, 2)
    D = delta_series(Binomial("z1", "z0", -1), "z2", ["z0", "z1", "z2"], win, offset=-r)
    for (a, b, c), coeff in D.coeffs.items():
        k = -c - 1
        assert (k + r).denominator == 1
        assert coeff == binom(k, a) * (-1) ** a
        assert b == k - a


@given(st.lists(st.integers(-3, 3), min_size=1, max_size=3))
def test_delta_substitution(poly):
    """delta((z1-z2)/z0) f(z1) = delta((z1-z2)/z0) f(z2+z0) for polynomial f, away from the window edges."""
    names = ["z0", "z1", "z2"]
    win = [(-6, 6), (-6, 6), (-6, 6)]
    D = delta_series(Binomial("z1", "z2", -1), "z0", names, win)
    deg = len(poly) - 1
    f1 = TruncatedSeries(names, {(0, k, 0): c for k, c in enumerate(poly)}, win)
    f2c: dict = {}
    for k, c in enumerate(poly):
        for j in range(k + 1):
            key = (j, 0, k - j)
            f2c[key] = f2c.get(key, 0) + c * binom(k, j)
    f2 = TruncatedSeries(names, f2c, win)
    lhs, rhs = D * f1, D * f2
    inner = [(lo + deg, hi - deg) for lo, hi in win]
    keys = {k for k in set(lhs.coeffs) | set(rhs.coeffs) if all(a <= x <= b for x, (a, b) in zip(k, inner))}
    for k in keys:
        assert lhs.coeffs.get(k, 0) == rhs.coeffs.get(k, 0)


def test_log_one_plus_is_additive():
    names = ["x", "y"]
    win = [(0, 5), (0, 5)]
    x = monomial(names, [1, 0], win)
    y = monomial(names, [0, 1], win)
    lhs = log_one_plus(x + y + x * y, 6)
    rhs = log_one_plus(x, 6) + log_one_plus(y, 6)
    assert {k: v for k, v in lhs.coeffs.items() if sum(k) <= 5} == {
        k: v for k, v in rhs.coeffs.items() if sum(k) <= 5
    }


def test_twisted_correction_coefficients():
    c = delta_coefficients(4)
    assert c[(1, 1)] == Fraction(1, 16)
    assert c[(1, 2)] == Fraction(-1, 32)
    for (m, n), v in c.items():
        assert c[(n, m)] == v


def test_twisted_correction_exponentiates_back():
    """exp(-F) recovers ((1+x)^(1/2) + (1+y)^(1/2))/2 from the coefficients F."""
    order = 5
    c = delta_coefficients(order)
    names = ["x", "y"]
    win = [(0, order), (0, order)]
    F = TruncatedSeries(names, {k: v for k, v in c.items() if sum(k) <= order}, win)
    out = TruncatedSeries(names, {(0, 0): 1}, win)
    power = TruncatedSeries(names, {(0, 0): 1}, win)
    fact = 1
    for k in range(1, order + 1):
        power = power * (F * -1)
        fact *= k
        out = out + power * Fraction(1, fact)
    got = {k: v for k, v in out.coeffs.items() if sum(k) <= order}
    want = {(0, 0): 1}
    for j in range(1, order + 1):
        want[(j, 0)] = binom(Fraction(1, 2), j) / 2
        want[(0, j)] = binom(Fraction(1, 2), j) / 2
    assert got == want


def test_exponent_pairs_lattices():
    pairs = exponent_pairs(1, Fraction(1, 2), 0)
    assert (Fraction(-1, 2), -1) in pairs and (Fraction(1, 2), 1) in pairs
    assert len(pairs) == 2 * 3


# --- Jacobi -----------------------------------------------------------------


def test_jacobi_heisenberg_generator():
    M = V.adjoint
    rep = verify_jacobi(M, H, H, V.vacuum, powers=exponent_pairs(4), N=6)
    assert rep.ok and rep["checked"] > 0 and rep["nonzero"] > 0


def test_jacobi_vacuum():
    M = FockModule(V, 1)
    for w in (vec(M, ()), vec(M, (1,)), vec(M, (2,))):
        assert verify_jacobi(M, V.vacuum, H, w, N=4, bound=3).ok
        assert verify_jacobi(M, V.omega, V.vacuum, w, N=4, bound=3).ok


def test_jacobi_twisted_generator():
    M = FockModule(V, twisted=True)
    rep = verify_jacobi(M, H, H, M.vacuum, N=3, bound=4)
    assert rep.ok and rep["nonzero"] > 0


def test_jacobi_twisted_mixed_sectors():
    M = FockModule(V, twisted=True)
    u = vec(V, (1, 1))
    for v in (H, vec(V, (2,)), vec(V, (1, 1))):
        assert verify_jacobi(M, u, v, vec(M, (Fraction(1, 2),)), N=3, bound=3).ok
        assert verify_jacobi(M, v, u, M.vacuum, N=3, bound=3).ok


def test_jacobi_window_widening_is_consistent():
    M = FockModule(V, 1)
    u, v, w = vec(V, (2,)), vec(V, (1, 1)), vec(M, (1,))
    small = verify_jacobi(M, u, v, w, N=2, bound=3)
    big = verify_jacobi(M, u, v, w, N=4, bound=5)
    assert small.ok and big.ok
    assert big["checked"] > small["checked"]


def test_jacobi_needs_depth():
    M = V.adjoint
    with pytest.raises(ValueError):
        verify_jacobi(M, H, H, V.vacuum)
    with pytest.raises(WindowExceeded):
        verify_jacobi(M, H, H, vec(M, (2, 1)), N=2)


def test_jacobi_rejects_off_lattice_exponents():
    M = FockModule(V, twisted=True)
    with pytest.raises(LatticeMismatch):
        verify_jacobi(M, H, H, M.vacuum, powers=[(0, 0)], N=2)


class _Corrupted(FockModule):
    """Fock module whose h(-1) is doubled on the vacuum."""

    def mode(self, v, p, w):
        out = super().mode(v, p, w)
        if v == {(1,): 1} and p == -1 and w == {(): 1}:
            out = {k: 2 * c for k, c in out.items()}
        return out


def test_jacobi_detects_a_broken_module():
    M = _Corrupted(V, 0)
    rep = verify_jacobi(M, H, H, M.vacuum, N=3, bound=3)
    assert not rep.ok
    f = rep["failures"][0]
    assert {"a", "b", "c"} <= set(f)
