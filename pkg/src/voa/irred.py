"""Irreducibility of graded pieces under zero modes, and proper-submodule witnesses.

A piece M(n) of dimension d is absolutely irreducible under a set of
operators exactly when the unital algebra they generate has dimension d^2.
Generators are the zero modes o(v), v over the basis of V_{<=P}; on twisted
modules only the fixed-point part V^0 contributes.
"""

from __future__ import annotations

from fractions import Fraction

from .boson import zero_mode_block
from .errors import LatticeMismatch
from .graded import GradedVector, TruncationWindow
from .qlinalg import Matrix, SubspaceBasis, algebra_closure, format_rational


def _generator_labels(fixture, P: int, even_only: bool | None = None) -> list:
    V = fixture.voa
    if even_only is None:
        even_only = fixture.module.T > 1
    out = []
    for k in range(P + 1):
        for lab in V.basis(k):
            if even_only and V.parity(lab):
                continue
            out.append(lab)
    return out


def piece_generators(fixture, degree, P: int, even_only: bool | None = None) -> list[Matrix]:
    V, M = fixture.voa, fixture.module
    return [zero_mode_block(M, GradedVector(V, {lab: 1}), degree) for lab in _generator_labels(fixture, P, even_only)]


def omega_nonzero(fixture) -> bool:
    return bool(fixture.voa.omega.terms)


def piece_irreducibility(fixture, degree, window: TruncationWindow, p_max: int | None = None,
                         even_only: bool | None = None) -> dict:
    """Burnside test of M(degree), sweeping the generator weight bound from P until stable."""
    if not omega_nonzero(fixture):
        return {"degree": format_rational(degree), "applies": False, "reason": "omega = 0"}
    M = fixture.module
    d = M.dim(degree)
    p_max = max(window.P, p_max if p_max is not None else window.P + 1)
    previous = None
    stabilized = None
    dim = 0
    sweep = []
    for P in range(window.P, p_max + 1):
        gens = piece_generators(fixture, degree, P, even_only)
        dim = algebra_closure(gens, d=d).dim if d else 0
        sweep.append((P, dim))
        if dim == d * d:
            stabilized = P
            break
        if previous is not None and dim == previous:
            stabilized = P - 1
            break
        previous = dim
    return {
        "degree": format_rational(degree),
        "applies": True,
        "dim": d,
        "algebra_dim": dim,
        "absolutely_irreducible": d > 0 and dim == d * d,
        "stabilized_at_P": stabilized,
        "sweep": [[p, x] for p, x in sweep],
    }


def _span_of_zero_modes(fixture, degree, P: int) -> int:
    gens = piece_generators(fixture, degree, P)
    d = fixture.module.dim(degree)
    rows = [g.flat() for g in gens if not g.is_zero()]
    return SubspaceBasis(d * d, rows).dim if rows else 0


def verify_irreducibility_criterion(fixture, window: TruncationWindow, p_max: int | None = None,
                                    find_witness: bool = True, cross_extra: int = 6) -> dict:
    """Per-piece Burnside verdicts for all degrees <= N, with the omega != 0 guard and witness search."""
    M = fixture.module
    degrees = M.degrees_upto(window.N)
    witness = find_proper_submodule_witness(fixture, window) if find_witness else None
    if not omega_nonzero(fixture):
        return {
            "applies": False,
            "reason": "omega = 0: the piecewise criterion does not apply",
            "reducible_by_witness": witness is not None,
            "witness": witness,
            "certified": witness is not None,
        }
    pieces = [piece_irreducibility(fixture, d, window, p_max) for d in degrees]
    all_ok = all(p["absolutely_irreducible"] for p in pieces)
    failing = [p["degree"] for p in pieces if not p["absolutely_irreducible"]]
    stabilized = all(p["stabilized_at_P"] is not None for p in pieces)
    # the A_n-action on M(i) is the span of all o(v); it must meet the generated algebra.
    # The span sits inside the algebra, so falling short at the depth limit is
    # undecided (None), not a disagreement.
    cross = []
    for p, d in zip(pieces, degrees):
        P2 = p["stabilized_at_P"] or window.P
        limit = max(window.P + cross_extra, int(3 * Fraction(d)) + 3)
        span = _span_of_zero_modes(fixture, d, P2)
        while span < p["algebra_dim"] and P2 < limit:
            P2 += 1
            span = _span_of_zero_modes(fixture, d, P2)
        agrees = True if span == p["algebra_dim"] else (None if span < p["algebra_dim"] else False)
        cross.append({"degree": p["degree"], "generated": p["algebra_dim"], "zero_mode_span": span, "P": P2,
                      "agrees": agrees})
    consistent = not (all_ok and witness is not None)
    if not stabilized:
        verdict = "inconclusive"
    else:
        verdict = "irreducible" if all_ok else "reducible"
    return {
        "applies": True,
        "verdict": verdict,
        "all_pieces_irreducible": all_ok,
        "failing_degrees": failing,
        "pieces": pieces,
        "action_cross_check": cross,
        "witness": witness,
        "consistent_with_witness_search": consistent,
        "generators": "V^0" if M.T > 1 else "V",
        "certified": False,
    }


# --- submodule search -------------------------------------------------------


def _mode_matrices(fixture, P: int, degrees) -> list:
    """(source, target, matrix) for every mode u_m, u basis of V_{<=P}, between window degrees."""
    V, M = fixture.voa, fixture.module
    out = []
    for k in range(P + 1):
        for lab in V.basis(k):
            u = {lab: 1}
            for d in degrees:
                src = M.basis(d)
                if not src:
                    continue
                for d2 in degrees:
                    tgt = M.basis(d2)
                    if not tgt:
                        continue
                    m = k - 1 + Fraction(d) - Fraction(d2)
                    if hasattr(M, "check_lattice") and not M.check_lattice(lab, m):
                        continue
                    pos = {t: i for i, t in enumerate(tgt)}
                    cols = []
                    try:
                        for e in src:
                            img = M.mode(u, m, {e: 1})
                            col = [0] * len(tgt)
                            for t, c in img.items():
                                col[pos[t]] = c
                            cols.append(col)
                    except LatticeMismatch:
                        continue
                    mat = Matrix([[cols[j][i] for j in range(len(src))] for i in range(len(tgt))], len(src))
                    if not mat.is_zero():
                        out.append((Fraction(d), Fraction(d2), mat))
    return out


def generated_submodule(fixture, start_degree, vec, P: int, N) -> dict:
    """Smallest graded subspace of M_{<=N} containing vec and stable under the windowed modes."""
    M = fixture.module
    degrees = [Fraction(d) for d in M.degrees_upto(N)]
    mats = _mode_matrices_cached(fixture, P, N)
    W = {d: SubspaceBasis.zero(M.dim(d)) for d in degrees}
    W[Fraction(start_degree)] = SubspaceBasis(M.dim(start_degree), [vec])
    dirty = {Fraction(start_degree)}
    by_src: dict = {}
    for d, d2, mat in mats:
        by_src.setdefault(d, []).append((d2, mat))
    while dirty:
        d = min(dirty)
        dirty.discard(d)
        for d2, mat in by_src.get(d, []):
            imgs = [mat.apply(v) for v in W[d].vectors]
            imgs = [v for v in imgs if any(v)]
            if not imgs:
                continue
            new = SubspaceBasis(M.dim(d2), list(W[d2].vectors) + imgs)
            if new.dim > W[d2].dim:
                W[d2] = new
                dirty.add(d2)
    return W


_MATS: dict = {}


def _mode_matrices_cached(fixture, P, N):
    key = (id(fixture.module), P, Fraction(N))
    hit = _MATS.get(key)
    if hit is None or hit[0] is not fixture.module:
        hit = (fixture.module, _mode_matrices(fixture, P, fixture.module.degrees_upto(N)))
        _MATS[key] = hit
    return hit[1]


def find_proper_submodule_witness(fixture, window: TruncationWindow):
    """A proper nonzero graded subspace of M_{<=N} closed under windowed modes, or None.

    Candidates are the submodules generated by single basis vectors; absence of
    a witness is evidence, not proof, of irreducibility.
    """
    M = fixture.module
    degrees = M.degrees_upto(window.N)
    for d in degrees:
        n = M.dim(d)
        for j in range(n):
            vec = [int(i == j) for i in range(n)]
            W = generated_submodule(fixture, d, vec, window.P, window.N)
            if any(W[Fraction(x)].dim < M.dim(x) for x in degrees):
                return {
                    "generator": {"degree": format_rational(d), "label": M.label_json(M.basis(d)[j])},
                    "dims": [[format_rational(x), W[Fraction(x)].dim, M.dim(x)] for x in degrees],
                    "basis": {
                        format_rational(x): [[format_rational(c) for c in v] for v in W[Fraction(x)].vectors]
                        for x in degrees
                    },
                }
    return None
