from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from voa.boson import parse_fixture
from voa.graded import FlatBasis, GradedVector, TruncationWindow
from voa.qlinalg import SubspaceBasis, subspace_intersect
from voa.radical import (
    HOLDS,
    check_constant_zero_mode,
    compute_radical,
    domain_basis,
    low_part,
    radical_at_depth,
    translation_image,
    verify_radical_theorem,
    window_lemma,
)

W = TruncationWindow(4, 6, 4)


def fx(name):
    return parse_fixture(name)


def member(res, terms):
    return res.J.contains(res.flat.flatten(GradedVector(res.flat.space, terms)))


def weight_one_part(res):
    flat = res.flat
    ones = SubspaceBasis(flat.dim, [[int(j == i) for j in range(flat.dim)]
                                    for i, lab in enumerate(flat.labels) if flat.space.degree_of(lab) == 1])
    return subspace_intersect(res.J, ones)


# --- radical examples ------------------------------------------------------


def test_adjoint_radical():
    res = compute_radical(fx("heisenberg"), W)
    assert res.stabilized and not res.certified
    assert member(res, {(1,): 1})
    assert not member(res, {(): 1})
    assert not member(res, {(1, 1): Fraction(1, 2)})
    assert weight_one_part(res).dim == 1


def test_unit_fock_radical():
    res = compute_radical(fx("fock:1"), W)
    assert member(res, {(1,): 1, (): -1})
    assert not member(res, {(1,): 1})
    assert not member(res, {(): 1})


@pytest.mark.parametrize("lam", ["2", "-1/3", "5/2"])
def test_fock_radical_shifts_with_lambda(lam):
    res = compute_radical(fx(f"fock:{lam}"), W)
    assert member(res, {(1,): 1, (): -Fraction(lam)})


def test_twisted_domain_is_even():
    f = fx("twisted")
    flat = domain_basis(f, 4)
    assert all(f.voa.parity(lab) == 0 for lab in flat.labels)
    res = compute_radical(f, W)
    assert res.flat.labels == flat.labels
    # h is odd, so it is outside the domain even though o(h) = 0 there
    assert (1,) not in res.flat.labels


def test_json_fragment():
    out = compute_radical(fx("fock:1"), W).to_json()
    assert out["certified"] is False
    assert out["window"] == {"D": 4, "N": "6", "P": 4}
    assert out["dim"] == len(out["basis"])
    dims = [d for _, d in out["kernel_dims"]]
    assert dims == sorted(dims, reverse=True)


# --- structural properties ---------------------------------------------------


@pytest.mark.parametrize("name", ["heisenberg", "fock:1", "fock:-2", "twisted", "sum:1,-1"])
def test_monotone_in_depth(name):
    f = fx(name)
    flat = domain_basis(f, 4)
    prev = None
    for N in range(0, 7):
        J = radical_at_depth(f.module, flat, N)
        if prev is not None:
            assert J.issubset(prev)
        prev = J


@pytest.mark.parametrize("name", ["heisenberg", "fock:1", "fock:3/2", "twisted", "sum:0,2"])
def test_easy_inclusion(name):
    f = fx(name)
    res = compute_radical(f, W)
    assert translation_image(f, res.flat, 4).issubset(res.J)


@pytest.mark.parametrize("name", ["heisenberg", "twisted"])
@pytest.mark.parametrize("D", [2, 3, 4, 5])
def test_window_lemma(name, D):
    assert window_lemma(fx(name), D)


def test_low_part():
    flat = FlatBasis.upto(parse_fixture("heisenberg").voa, 3)
    assert low_part(flat, 1).dim == 2
    assert low_part(flat, 3).dim == flat.dim


# --- the theorem -------------------------------------------------------------


@pytest.mark.parametrize("name", ["heisenberg", "fock:1", "twisted"])
def test_theorem_holds(name):
    rep = verify_radical_theorem(fx(name), W)
    assert rep["verdict"] == HOLDS
    assert all(rep["checks"].values())
    assert rep["certified"] is False
    assert rep["domain"] == ("V^0" if name == "twisted" else "V")


def test_theorem_details_on_unit_fock():
    rep = verify_radical_theorem(fx("fock:1"), W)
    (v,) = rep["J01"]
    # a multiple of h - 1
    assert set(v) == {"0", "1"}
    assert Fraction(v["0"]["vac"]) == -Fraction(v["1"]["1"]) != 0
    assert rep["J01_projection_V1"] and rep["adjoint_J_V1"]


def test_theorem_on_adjoint_has_h_in_low_part():
    rep = verify_radical_theorem(fx("heisenberg"), W)
    assert len(rep["J01"]) == 1
    assert len(rep["adjoint_J_V1"]) == 1


@settings(max_examples=12)
@given(st.fractions(min_value=-3, max_value=3, max_denominator=4), st.integers(2, 4))
def test_theorem_holds_on_random_fock(lam, D):
    rep = verify_radical_theorem(fx(f"fock:{lam}"), TruncationWindow(D, D + 1, min(D, 3)))
    assert rep["verdict"] == HOLDS


@pytest.mark.parametrize("name,low", [("sum:1,-1", 0), ("sum:0,0", 1), ("sum:0,2", 0)])
def test_theorem_on_direct_sums(name, low):
    rep = verify_radical_theorem(fx(name), TruncationWindow(3, 4, 3))
    assert rep["verdict"] == HOLDS
    # h - lambda is killed only when both summands share lambda
    assert len(rep["J01"]) == low


def test_theorem_needs_depth():
    with pytest.raises(ValueError):
        verify_radical_theorem(fx("heisenberg"), TruncationWindow(1, 2, 1))


def test_unstabilized_is_inconclusive():
    rep = compute_radical(fx("fock:1"), TruncationWindow(4, 0, 4), max_extra=0)
    assert not rep.stabilized


# --- constant zero modes -----------------------------------------------------


@pytest.mark.parametrize("lam", ["0", "1", "-5/3", "7"])
def test_h_acts_by_lambda(lam):
    out = check_constant_zero_mode(fx(f"fock:{lam}"), GradedVector(fx("heisenberg").voa, {(1,): 1}), W)
    assert out["applies"] and out["constant"]
    assert Fraction(out["value"]) == Fraction(lam)


def test_h_on_twisted_is_zero():
    f = fx("twisted")
    out = check_constant_zero_mode(f, GradedVector(f.voa, {(1,): 1}), W)
    assert out["applies"] and out["constant"] and out["value"] == "0"


def test_omega_is_rejected():
    f = fx("fock:1")
    assert not check_constant_zero_mode(f, f.voa.omega, W)["applies"]
