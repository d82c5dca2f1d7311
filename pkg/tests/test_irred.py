from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from voa.boson import parse_fixture, zero_mode_block
from voa.graded import GradedVector, TruncationWindow
from voa.irred import (
    find_proper_submodule_witness,
    generated_submodule,
    omega_nonzero,
    piece_generators,
    piece_irreducibility,
    verify_irreducibility_criterion,
)
from voa.qlinalg import Matrix, algebra_closure, rref

W = TruncationWindow(4, 4, 4)


def fx(name):
    return parse_fixture(name)


# --- single pieces -----------------------------------------------------------


def test_unit_fock_degree_two():
    p = piece_irreducibility(fx("fock:1"), 2, W)
    assert (p["dim"], p["algebra_dim"]) == (2, 4)
    assert p["absolutely_irreducible"]


def test_direct_sum_degree_zero():
    f = fx("sum:1,-1")
    gens = piece_generators(f, 0, 2)
    assert all(g[0, 1] == g[1, 0] == 0 for g in gens)
    p = piece_irreducibility(f, 0, W)
    assert (p["dim"], p["algebra_dim"]) == (2, 2)
    assert not p["absolutely_irreducible"]


def test_twisted_three_halves():
    p = piece_irreducibility(fx("twisted"), Fraction(3, 2), W)
    assert (p["dim"], p["algebra_dim"]) == (2, 4)


def test_zero_dimensional_piece_is_not_irreducible():
    assert not piece_irreducibility(fx("twisted"), Fraction(1, 3), W)["absolutely_irreducible"]


# --- whole modules -----------------------------------------------------------


@pytest.mark.parametrize("name", ["fock:1", "heisenberg", "fock:-3/2", "twisted"])
def test_irreducible_fixtures(name):
    rep = verify_irreducibility_criterion(fx(name), W)
    assert rep["applies"] and rep["verdict"] == "irreducible"
    assert rep["witness"] is None
    assert rep["consistent_with_witness_search"]
    assert all(c["agrees"] is True for c in rep["action_cross_check"])
    assert rep["generators"] == ("V^0" if name == "twisted" else "V")


def test_direct_sum_is_reducible():
    rep = verify_irreducibility_criterion(fx("sum:1,-1"), W)
    assert rep["verdict"] == "reducible"
    assert "0" in rep["failing_degrees"]
    wit = rep["witness"]
    assert wit is not None and rep["consistent_with_witness_search"]
    # the witness is the first summand: half of every piece
    assert all(2 * got == full for _, got, full in wit["dims"])
    assert wit["generator"]["degree"] == "0"


def test_sum_witness_is_the_first_summand():
    f = fx("sum:1,-1")
    M = f.module
    W_ = generated_submodule(f, 0, [1, 0], 4, 4)
    for d in M.degrees_upto(4):
        labels = M.basis(d)
        first = [[int(i == j) for i in range(len(labels))] for j, lab in enumerate(labels) if lab[0] == 0]
        assert W_[Fraction(d)].vectors == tuple(tuple(Fraction(x) for x in v) for v in rref(Matrix(first, len(labels)))[0].rows)


def test_no_witness_in_unit_fock():
    assert find_proper_submodule_witness(fx("fock:1"), TruncationWindow(4, 4, 3)) is None


def test_trivial_guard():
    f = fx("trivial")
    assert not omega_nonzero(f)
    rep = verify_irreducibility_criterion(f, TruncationWindow(0, 2, 0))
    assert rep["applies"] is False
    assert rep["reducible_by_witness"]
    assert rep["witness"]["generator"]["degree"] == "0"
    assert not piece_irreducibility(f, 0, TruncationWindow(0, 2, 0))["applies"]


# --- basis independence ------------------------------------------------------


def unit_triangular(rng_vals, d, lower):
    it = iter(rng_vals)
    rows = []
    for i in range(d):
        row = []
        for j in range(d):
            if i == j:
                row.append(1)
            elif (j < i) == lower:
                row.append(next(it))
            else:
                row.append(0)
        rows.append(row)
    return Matrix(rows)


def inverse(S):
    d = S.nrows
    aug = Matrix([list(S.rows[i]) + [int(i == j) for j in range(d)] for i in range(d)], 2 * d)
    red, _ = rref(aug)
    return Matrix([r[d:] for r in red.rows], d)


@settings(max_examples=25)
@given(st.sampled_from([("fock:1", 3), ("sum:1,-1", 1), ("twisted", Fraction(5, 2)), ("heisenberg", 4)]),
       st.lists(st.integers(-3, 3), min_size=40, max_size=40))
def test_similarity_invariance(case, vals):
    name, degree = case
    f = fx(name)
    gens = piece_generators(f, degree, 4)
    d = f.module.dim(degree)
    k = d * (d - 1) // 2
    S = unit_triangular(vals[:k], d, True) @ unit_triangular(vals[k:2 * k], d, False)
    Si = inverse(S)
    assert S @ Si == Matrix.identity(d)
    moved = [Si @ g @ S for g in gens]
    assert algebra_closure(moved, d=d).dim == algebra_closure(gens, d=d).dim


@pytest.mark.parametrize("degree", [0, Fraction(1, 2), 1, Fraction(3, 2), 2, Fraction(5, 2)])
def test_odd_generators_change_nothing(degree):
    f = fx("twisted")
    even = piece_irreducibility(f, degree, W)
    both = piece_irreducibility(f, degree, W, even_only=False)
    assert even["algebra_dim"] == both["algebra_dim"]
    for lab in (lab for k in range(4) for lab in f.voa.basis(k) if f.voa.parity(lab)):
        assert zero_mode_block(f.module, GradedVector(f.voa, {lab: 1}), degree).is_zero()
