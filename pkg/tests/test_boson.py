from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from voa.boson import (
    DirectSumModule,
    FockModule,
    HeisenbergVOA,
    L,
    L_on_V,
    build_trivial_voa,
    cache_default,
    lowest_weight,
    mode_action,
    o,
    parse_fixture,
    product_in_V,
    zero_mode_block,
)
from voa.errors import LatticeMismatch, WindowExceeded
from voa.graded import GradedVector, TruncationWindow
from voa.qlinalg import Matrix, rank
from voa.series import binom

HALF = Fraction(1, 2)
V = HeisenbergVOA()
H = {(1,): 1}
OMEGA = V.omega.terms
FIXTURES = {
    "adjoint": V.adjoint,
    "fock1": FockModule(V, 1),
    "fock-1/2": FockModule(V, Fraction(-1, 2)),
    "twisted": FockModule(V, twisted=True),
    "sum": DirectSumModule(V, [FockModule(V, 1), FockModule(V, -1)]),
}


def basis_upto(M, top):
    return [{lab: 1} for d in M.degrees_upto(top) for lab in M.basis(d)]


def sub(a, b):
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) - v
    return {k: v for k, v in out.items() if v}


def lin(*pairs):
    out = {}
    for c, vec in pairs:
        for k, v in vec.items():
            out[k] = out.get(k, 0) + c * v
    return {k: v for k, v in out.items() if v}


def h_modes(M, top):
    if M.T > 1:
        return [Fraction(2 * k + 1, 2) for k in range(-top, top)]
    return list(range(-top, top + 1))


# --- examples -----------------------------------------------------------------


def test_creation_operator():
    assert V.product_terms(H, -2, {(): 1}) == {(2,): 1}


def test_L0_on_generator():
    assert V.product_terms(OMEGA, 1, H) == H


def test_derivative_field():
    M = FockModule(V, 3)
    for w in basis_upto(M, 2):
        assert M.mode({(2,): 1}, 1, w) == lin((-3, w))


def test_twisted_vacuum_weight():
    M = FIXTURES["twisted"]
    assert M.mode(OMEGA, 1, {(): 1}) == {(): Fraction(1, 16)}
    assert lowest_weight(M) == Fraction(1, 16)


def test_products_in_V():
    one = {(): 1}
    for v in basis_upto(V, 3):
        assert V.product_terms(one, -1, v) == v
    assert V.product_terms(H, -1, H) == {(1, 1): 1}
    assert V.product_terms(H, -1, H) == lin((2, OMEGA))
    assert V.product_terms(H, 1, H) == one
    assert V.product_terms(H, 0, H) == {}
    assert V.product_terms(OMEGA, 3, OMEGA) == {(): HALF}
    assert V.product_terms(OMEGA, 1, OMEGA) == lin((2, OMEGA))


@pytest.mark.parametrize("lam", [0, 1, Fraction(-3, 2), 2])
def test_L0_on_fock(lam):
    M = FockModule(V, lam)
    for n in range(4):
        blk = L(M, 0, [n]).block(n)
        assert blk == Matrix.scalar(M.dim(n), Fraction(lam) ** 2 / 2 + n)


def test_L_minus_one_kills_vacuum():
    assert L_on_V(V, -1, {(): 1}) == {}


def test_L0_on_twisted():
    M = FIXTURES["twisted"]
    for d in M.degrees_upto(3):
        assert zero_mode_block(M, V.omega, d) == Matrix.scalar(M.dim(d), Fraction(1, 16) + d)


@pytest.mark.parametrize("lam", [0, 1, -2])
def test_zero_mode_of_h(lam):
    M = FockModule(V, lam)
    for d in range(4):
        assert zero_mode_block(M, V.h(), d) == Matrix.scalar(M.dim(d), lam)
        assert zero_mode_block(M, V.vacuum, d) == Matrix.identity(M.dim(d))


def test_zero_mode_twisted_odd_vanishes():
    M = FIXTURES["twisted"]
    for v in ({(1,): 1}, {(2, 1, 1): 1}, {(3,): 1}):
        dm = o(M, GradedVector(V, v), M.degrees_upto(2))
        assert dm.is_zero()


def test_trivial_fixture():
    Vt, Mt = build_trivial_voa()
    assert Vt.omega.is_zero()
    for n in range(5):
        assert Mt.dim(n) == 1
        assert zero_mode_block(Mt, Vt.vacuum, n) == Matrix.identity(1)
        assert zero_mode_block(Mt, Vt.omega, n).is_zero()


# --- invariants ---------------------------------------------------------------


@pytest.mark.parametrize("name", list(FIXTURES))
def test_heisenberg_commutators(name):
    M = FIXTURES[name]
    modes = h_modes(M, 6)
    for w in basis_upto(M, 2):
        img = {m: M.mode(H, m, w) for m in modes}
        for m in modes:
            for n in modes:
                lhs = sub(M.mode(H, m, img[n]), M.mode(H, n, img[m]))
                assert lhs == (lin((m, w)) if m + n == 0 else {})


@pytest.mark.parametrize("name", list(FIXTURES))
def test_virasoro_relations(name):
    M = FIXTURES[name]
    rng = range(-3, 4)
    for w in basis_upto(M, Fraction(3, 2)):
        Lw = {m: M.mode(OMEGA, m + 1, w) for m in rng}
        for m in rng:
            for n in rng:
                lhs = sub(M.mode(OMEGA, m + 1, Lw[n]), M.mode(OMEGA, n + 1, Lw[m]))
                rhs = lin((m - n, M.mode(OMEGA, m + n + 1, w)))
                if m + n == 0:
                    rhs = lin((1, rhs), (Fraction(m ** 3 - m, 12), w))
                assert lhs == rhs


@pytest.mark.parametrize("name", ["fock1", "twisted"])
def test_translation_covariance(name):
    M = FIXTURES[name]
    for v in basis_upto(V, 4):
        (x,) = v
        for m in (-2, -1, 0, 1, 2):
            if M.T > 1 and len(x) % 2:
                m = m + HALF
            for w in basis_upto(M, 1):
                lhs = sub(M.mode(OMEGA, 0, M.mode(v, m, w)), M.mode(v, m, M.mode(OMEGA, 0, w)))
                assert lhs == lin((-m, M.mode(v, m - 1, w)))


@pytest.mark.parametrize("name", ["adjoint", "fock1", "twisted"])
def test_commutator_formula(name):
    """[u_m, v_n] = sum_i binom(m, i) (u_i v)_{m+n-i}, the mode form of the Jacobi identity."""
    M = FIXTURES[name]
    pairs = [((1,), (1, 1)), ((2,), (1,)), ((1, 1), (2,)), ((1, 1), (1, 1))]
    for a, b in pairs:
        u, v = {a: 1}, {b: 1}
        wu = sum(a)
        for m in (-1, 0, 1, 2):
            for n in (-1, 0, 1):
                if M.T > 1:
                    m2 = m + (HALF if len(a) % 2 else 0)
                    n2 = n + (HALF if len(b) % 2 else 0)
                else:
                    m2, n2 = m, n
                for w in basis_upto(M, 1):
                    lhs = sub(M.mode(u, m2, M.mode(v, n2, w)), M.mode(v, n2, M.mode(u, m2, w)))
                    rhs: dict = {}
                    for i in range(0, wu + sum(b)):
                        c = binom(m2, i)
                        uv = V.product_terms(u, i, v)
                        if c and uv:
                            rhs = lin((1, rhs), (c, M.mode(uv, m2 + n2 - i, w)))
                    assert lhs == rhs


def test_skew_symmetry():
    """u_n v = sum_j (-1)^(n+j+1) L(-1)^j/j! v_{n+j} u inside V."""
    from math import factorial

    labs = basis_upto(V, 3)
    for u in labs:
        for v in labs:
            for n in range(-3, 3):
                rhs: dict = {}
                j = 0
                while True:
                    term = V.product_terms(v, n + j, u)
                    if not term and n + j > 8:
                        break
                    for _ in range(j):
                        term = L_on_V(V, -1, term)
                    sign = -1 if (n + j + 1) % 2 else 1
                    rhs = lin((1, rhs), (Fraction(sign, factorial(j)), term))
                    j += 1
                assert V.product_terms(u, n, v) == rhs


def test_L_minus_one_injective():
    for n in range(1, 6):
        assert rank(L(V.adjoint, -1, [n]).block(n)) == V.dim(n)
    assert rank(L(V.adjoint, -1, [0]).block(0)) == 0


def test_vacuum_axioms():
    one = {(): 1}
    for M in FIXTURES.values():
        for w in basis_upto(M, 2):
            for n in range(-3, 4):
                assert M.mode(one, n, w) == (w if n == -1 else {})
    for v in basis_upto(V, 4):
        assert V.product_terms(v, -1, one) == v
        for n in range(0, 4):
            assert V.product_terms(v, n, one) == {}


@given(st.sampled_from([(1,), (2,), (1, 1), (3,), (2, 1), (1, 1, 1)]),
       st.integers(-3, 3), st.sampled_from([(), (1,), (2,), (1, 1)]))
def test_cache_transparency_untwisted(x, m, w):
    on = FockModule(HeisenbergVOA(cache=True), 2)
    off = FockModule(HeisenbergVOA(cache=False), 2)
    assert on.mode({x: 1}, m, {w: 1}) == off.mode({x: 1}, m, {w: 1})


def test_cache_transparency_twisted():
    on = FockModule(HeisenbergVOA(cache=True), twisted=True)
    off = FockModule(HeisenbergVOA(cache=False), twisted=True)
    for v in basis_upto(V, 3):
        (x,) = v
        for m in range(-2, 3):
            p = m + (HALF if len(x) % 2 else 0)
            for w in basis_upto(on, Fraction(3, 2)):
                assert on.mode(v, p, w) == off.mode(v, p, w)
    # repeated calls through a warm cache agree with the first one
    first = on.mode(OMEGA, 1, {(HALF,): 1})
    assert on.mode(OMEGA, 1, {(HALF,): 1}) == first


def test_cache_env(monkeypatch):
    monkeypatch.setenv("VOA_CACHE", "off")
    assert cache_default() is False
    monkeypatch.setenv("VOA_CACHE", "private")
    assert cache_default() is True
    monkeypatch.setenv("VOA_CACHE", "shared")
    with pytest.raises(ValueError):
        cache_default()


# --- lattices, sectors and windows ---------------------------------------------


def test_twisted_lattice_mismatch():
    M = FIXTURES["twisted"]
    with pytest.raises(LatticeMismatch):
        M.mode(H, 0, {(): 1})
    with pytest.raises(LatticeMismatch):
        M.mode({(1, 1): 1}, HALF, {(): 1})
    with pytest.raises(LatticeMismatch):
        M.sector(GradedVector(V, {(1,): 1, (1, 1): 1}))
    assert M.sector(GradedVector(V, {(2, 1): 1})) == 0


def test_untwisted_rejects_half_modes():
    with pytest.raises(LatticeMismatch):
        V.adjoint.mode(H, HALF, {(): 1})


def test_parity_sector_module():
    even = FockModule(V, 0, parity=0)
    assert all(len(lab) % 2 == 0 for d in range(5) for lab in even.basis(d))
    with pytest.raises(LatticeMismatch):
        even.mode(H, -1, {(): 1})
    assert even.mode({(1, 1): 1}, -1, {(): 1}) == {(1, 1): 1}


def test_window_guards():
    M = FIXTURES["fock1"]
    w = TruncationWindow(2, 2, 1)
    vac = GradedVector(M, {(): 1})
    h = V.h()
    assert mode_action(M, h, -2, vac, w).terms == {(2,): 1}
    with pytest.raises(WindowExceeded):
        mode_action(M, h, -3, vac, w)
    with pytest.raises(WindowExceeded):
        mode_action(M, GradedVector(V, {(3,): 1}), 0, vac, w)
    with pytest.raises(WindowExceeded):
        product_in_V(V, h, -3, h, w)
    assert product_in_V(V, h, -1, h, w).terms == {(1, 1): 1}


def test_direct_sum_blocks():
    M = FIXTURES["sum"]
    assert M.basis(1) == ((0, (1,)), (1, (1,)))
    assert zero_mode_block(M, V.h(), 0) == Matrix([[1, 0], [0, -1]])


# --- fixtures -----------------------------------------------------------------


@pytest.mark.parametrize("desc,kind", [
    ("heisenberg", "fock"),
    ("fock:1", "fock"),
    ("twisted", "twisted_fock"),
    ("sum:1,-1", "direct_sum"),
    ("trivial", "trivial"),
    ({"voa": "heisenberg", "module": {"kind": "fock", "lambda": "1"}, "T": 1}, "fock"),
    ({"module": {"kind": "twisted_fock"}, "T": 2}, "twisted_fock"),
    ({"voa": "trivial"}, "trivial"),
])
def test_parse_fixture(desc, kind):
    fx = parse_fixture(desc)
    assert fx.module.kind == kind
    assert fx.T == (2 if kind == "twisted_fock" else 1)


def test_parse_fixture_rejects_unknown():
    with pytest.raises(ValueError):
        parse_fixture("lattice:A1")
