"""The M-radical J_M(V) on truncations and the structure theorem for it.

J_M(V) = {v : o(v) = 0 on M}. On a window it is the left kernel of
v -> (o(v)|M(0), ..., o(v)|M(N)) over the flattened basis of V_{<=D}; it can
only shrink as N grows, and is accepted once two consecutive depths agree.
For twisted modules the domain is the fixed-point subalgebra V^0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .boson import FockModule, zero_mode_block
from .graded import FlatBasis, GradedVector, TruncationWindow
from .liehat import L_zero_plus_minus_one
from .qlinalg import Matrix, SubspaceBasis, format_rational, kernel, subspace_intersect, subspace_sum

HOLDS, FAILS, INCONCLUSIVE = "holds", "fails", "inconclusive"


@dataclass
class RadicalResult:
    window: TruncationWindow
    flat: FlatBasis
    J: SubspaceBasis
    stabilized_at_N: Fraction | None
    depths: list = field(default_factory=list)
    certified: bool = False

    @property
    def stabilized(self) -> bool:
        return self.stabilized_at_N is not None

    def vectors(self) -> list[GradedVector]:
        return [self.flat.unflatten(v) for v in self.J.vectors]

    def to_json(self) -> dict:
        return {
            "window": self.window.to_json(),
            "dim": self.J.dim,
            "ambient_dim": self.flat.dim,
            "basis": [self.flat.unflatten(v).to_json() for v in self.J.vectors],
            "stabilized_at_N": None if self.stabilized_at_N is None else format_rational(self.stabilized_at_N),
            "kernel_dims": [[format_rational(n), d] for n, d in self.depths],
            "certified": self.certified,
        }


def domain_basis(fixture, D: int) -> FlatBasis:
    """Flattened V_{<=D}, or V^0_{<=D} when the module is twisted."""
    V = fixture.voa
    if fixture.module.T > 1:
        return FlatBasis.upto(V, D, label_filter=lambda lab: V.parity(lab) == 0)
    return FlatBasis.upto(V, D)


def _zero_mode_rows(module, flat: FlatBasis, degree) -> list[list]:
    """Row per domain basis vector: o(b) on M(degree), flattened."""
    out = []
    for lab in flat.labels:
        blk = zero_mode_block(module, GradedVector(flat.space, {lab: 1}), degree)
        out.append(list(blk.flat()))
    return out


def radical_at_depth(module, flat: FlatBasis, N) -> SubspaceBasis:
    rows = [[] for _ in flat.labels]
    for d in module.degrees_upto(N):
        for r, part in zip(rows, _zero_mode_rows(module, flat, d)):
            r.extend(part)
    return _left_kernel(rows, flat.dim)


def _left_kernel(rows, n) -> SubspaceBasis:
    width = len(rows[0]) if rows else 0
    if width == 0:
        return SubspaceBasis.full(n)
    # x^T A = 0  <=>  A^T x = 0
    return kernel(Matrix([[rows[i][j] for i in range(n)] for j in range(width)], n))


def compute_radical(fixture, window: TruncationWindow, max_extra: int = 4, flat: FlatBasis | None = None) -> RadicalResult:
    """J_M(V) inside V_{<=D} (V^0_{<=D} if twisted), stabilized over module depth."""
    M = fixture.module
    if flat is None:
        flat = domain_basis(fixture, window.D)
    rows = [[] for _ in flat.labels]
    depths = []
    done = Fraction(-1)
    previous = None
    stabilized = None
    N = Fraction(window.N)
    top = N + max_extra
    while N <= top:
        for d in M.degrees_upto(N):
            if Fraction(d) <= done:
                continue
            for r, part in zip(rows, _zero_mode_rows(M, flat, d)):
                r.extend(part)
        done = N
        J = _left_kernel(rows, flat.dim)
        depths.append((N, J.dim))
        if previous is not None and J == previous:
            stabilized = N - 1
            break
        previous = J
        N += 1
    return RadicalResult(window, flat, previous if stabilized is not None else J, stabilized, depths)


def translation_image(fixture, flat: FlatBasis, D: int) -> SubspaceBasis:
    """Span of (L(0)+L(-1))u over the domain basis of weight <= D-1."""
    V = fixture.voa
    rows = []
    for lab in flat.labels:
        if V.degree_of(lab) <= D - 1:
            rows.append(flat.flatten(L_zero_plus_minus_one(V, {lab: 1})))
    return SubspaceBasis(flat.dim, rows)


def low_part(flat: FlatBasis, top: int = 1) -> SubspaceBasis:
    """Coordinate subspace V_0 + ... + V_top of the flattened window."""
    rows = []
    for i, lab in enumerate(flat.labels):
        if flat.space.degree_of(lab) <= top:
            rows.append([int(j == i) for j in range(flat.dim)])
    return SubspaceBasis(flat.dim, rows)


def project_to_weight(flat: FlatBasis, S: SubspaceBasis, k: int) -> SubspaceBasis:
    rows = []
    for v in S.vectors:
        rows.append([x if flat.space.degree_of(lab) == k else 0 for x, lab in zip(v, flat.labels)])
    return SubspaceBasis(flat.dim, rows)


def adjoint_fixture(fixture):
    """The adjoint module of V (of V^0 when the module is twisted), as a fixture."""
    from .boson import Fixture

    V = fixture.voa
    if fixture.module.T > 1:
        return Fixture(V, FockModule(V, 0, parity=0), {"module": {"kind": "even_adjoint"}})
    return Fixture(V, V.adjoint, {"module": {"kind": "adjoint"}})


def window_lemma(fixture, D: int) -> bool:
    """(L(0)+L(-1))V inside V_{<=D} is (L(0)+L(-1))V_{<=D-1}, checked one weight up."""
    big = domain_basis(fixture, D + 1)
    small_labels = [lab for lab in big.labels if fixture.voa.degree_of(lab) <= D]
    full_img = translation_image(fixture, big, D + 1)
    low = low_part(big, D)
    inter = subspace_intersect(full_img, low)
    sub_img = translation_image(fixture, big, D)
    return inter == sub_img and len(small_labels) == low.dim


def verify_radical_theorem(fixture, window: TruncationWindow) -> dict:
    """J = (L(0)+L(-1))V_{<=D-1} + J_(0,1) on the window, plus the V_1 projection refinement."""
    if window.D < 2:
        raise ValueError("the radical theorem check needs D >= 2")
    res = compute_radical(fixture, window)
    flat = res.flat
    J = res.J
    R = translation_image(fixture, flat, window.D)
    J01 = subspace_intersect(J, low_part(flat, 1))
    rhs = subspace_sum(R, J01)
    equality = J == rhs
    easy = R.issubset(J)
    adj = compute_radical(adjoint_fixture(fixture), window, flat=flat)
    proj = project_to_weight(flat, J01, 1)
    adj_v1 = subspace_intersect(adj.J, project_to_weight(flat, SubspaceBasis.full(flat.dim), 1))
    refinement = proj.issubset(adj_v1)
    lemma = window_lemma(fixture, window.D)
    checks = {
        "equality": equality,
        "easy_inclusion": easy,
        "projection_in_adjoint_radical": refinement,
        "window_lemma": lemma,
    }
    if not (res.stabilized and adj.stabilized):
        verdict = INCONCLUSIVE
    elif all(checks.values()):
        verdict = HOLDS
    else:
        verdict = FAILS
    return {
        "verdict": verdict,
        "checks": checks,
        "domain": "V^0" if fixture.module.T > 1 else "V",
        "J": res.to_json(),
        "translation_image_dim": R.dim,
        "J01": [flat.unflatten(v).to_json() for v in J01.vectors],
        "J01_projection_V1": [flat.unflatten(v).to_json() for v in proj.vectors],
        "adjoint_J_V1": [flat.unflatten(v).to_json() for v in adj_v1.vectors],
        "certified": False,
        "assumption": "V is taken to be simple (the Heisenberg fixture); not verified",
        "_result": res,
    }


def check_constant_zero_mode(fixture, v: GradedVector, window: TruncationWindow) -> dict:
    """o(v) acts by one scalar on every M(n), n <= N, for v in J_V(V) of weight 1."""
    V = fixture.voa
    comps = v.degrees()
    if comps != [1]:
        return {"applies": False, "reason": "v is not homogeneous of weight 1"}
    adj = compute_radical(adjoint_fixture(fixture), window, flat=domain_basis(fixture, max(window.D, 1)))
    if fixture.module.T > 1 and any(V.parity(lab) for lab in v.terms):
        # odd vectors lie outside V^0 and have zero o-action on twisted modules
        in_radical = True
    else:
        in_radical = adj.J.contains(adj.flat.flatten(v))
    if not in_radical:
        return {"applies": False, "reason": "v is not in J_V(V)"}
    M = fixture.module
    scalars = []
    constant = True
    for d in M.degrees_upto(window.N):
        blk = zero_mode_block(M, v, d)
        if not blk.nrows:
            continue
        if not blk.is_scalar():
            constant = False
            break
        scalars.append(blk[0, 0])
    if constant and len(set(scalars)) > 1:
        constant = False
    return {
        "applies": True,
        "constant": constant,
        "value": format_rational(scalars[0]) if constant and scalars else None,
        "degrees_checked": len(scalars),
    }
