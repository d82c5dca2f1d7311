"""Command-line driver.

Exit codes: 0 every check passed, 1 a theorem check failed, 2 inconclusive
(a stabilization sweep ran out of window), 3 usage error. The report is
JSON on stdout or ``--out``; a short summary goes to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .boson import FockModule, parse_fixture
from .errors import VoaError
from .graded import GradedVector, TruncationWindow
from .irred import verify_irreducibility_criterion
from .qlinalg import format_rational, parse_rational
from .radical import verify_radical_theorem
from .series import verify_jacobi
from .suite import run_suite
from .zhu import ZhuIndex, build_zhu, verify_zhu_properties

EXIT_OK, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_USAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items() if not str(k).startswith("_")}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, Fraction):
        return format_rational(x)
    return x


def dumps(report: dict) -> str:
    return json.dumps(_jsonable(report), sort_keys=True, indent=2) + "\n"


def _fixture(desc: str):
    desc = desc.strip()
    if desc.startswith("{"):
        try:
            desc = json.loads(desc)
        except json.JSONDecodeError as exc:
            raise UsageError(f"bad fixture JSON: {exc}") from None
    try:
        return parse_fixture(desc)
    except (ValueError, KeyError) as exc:
        raise UsageError(f"bad fixture {desc!r}: {exc}") from None


def _window(args) -> TruncationWindow:
    try:
        return TruncationWindow(args.D, args.N, args.P)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _index(s: str) -> Fraction:
    """Parse ``l+i/T`` or a plain rational such as ``3/2``."""
    try:
        return sum((parse_rational(part) for part in s.split("+")), Fraction(0))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not an index l+i/T: {s!r}") from None


def _seed(s: str) -> int:
    v = int(s, 0)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _add_common(p, D=4, N=6, P=4):
    p.add_argument("--fixture", default="heisenberg",
                   help="heisenberg | fock:<lambda> | twisted | sum:<l1>,<l2> | trivial | JSON descriptor")
    p.add_argument("-D", type=int, default=D, help="max weight retained in V (default %(default)s)")
    p.add_argument("-N", type=int, default=N, help="module depth (default %(default)s)")
    p.add_argument("-P", type=int, default=P, help="generator weight bound, P <= D (default %(default)s)")
    p.add_argument("--out", help="write the JSON report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="voa", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("jacobi-check", help="coefficientwise Jacobi identity on basis triples")
    _add_common(p, N=3)
    p.add_argument("--uv-weight", type=int, default=2, help="u, v run over the basis of V_{<=k}")
    p.add_argument("--w-degree", type=parse_rational, default=Fraction(1), help="w runs over M_{<=d}")
    p.add_argument("--bound", type=int, default=6, help="exponent window |a|, |b| <= bound")

    p = sub.add_parser("radical", help="the M-radical and its structure theorem")
    _add_common(p)

    p = sub.add_parser("zhu", help="truncated Zhu algebra A_n (A_{g,n} with --twisted)")
    _add_common(p, D=3, P=3)
    p.add_argument("-n", type=_index, default=Fraction(0), help="index l + i/T")
    p.add_argument("--twisted", action="store_true", help="the g-twisted algebra, T = 2")
    p.add_argument("--p-max", type=int, default=5, help="largest generator weight in the P sweep")
    p.add_argument("--literal", action="store_true", help="use the uncorrected twisted z-power")

    p = sub.add_parser("irred", help="piecewise Burnside irreducibility criterion")
    _add_common(p, N=5)
    p.add_argument("--p-max", type=int, default=None, help="largest generator weight in the P sweep")

    p = sub.add_parser("suite", help="the full acceptance battery")
    p.add_argument("--quick", action="store_true", help="smaller windows")
    p.add_argument("--seed", type=_seed, default=0, help="seed for the randomized checks")
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.add_argument("--only", type=int, action="append", help="restrict to criterion ids (repeatable)")
    return ap


# --- commands ---------------------------------------------------------------


def cmd_jacobi(args):
    fx = _fixture(args.fixture)
    window = _window(args)
    if args.uv_weight > window.D:
        raise UsageError("--uv-weight exceeds the V window D")
    if args.w_degree > window.N:
        raise UsageError("--w-degree exceeds the module window N")
    V, M = fx.voa, fx.module
    us = [GradedVector(V, {lab: 1}) for d in V.degrees_upto(args.uv_weight) for lab in V.basis(d)]
    ws = [GradedVector(M, {lab: 1}) for d in M.degrees_upto(args.w_degree) for lab in M.basis(d)]
    checked = nonzero = 0
    failures = []
    for u in us:
        for v in us:
            for w in ws:
                rep = verify_jacobi(M, u, v, w, N=window.N, bound=args.bound)
                checked += rep["checked"]
                nonzero += rep["nonzero"]
                for f in rep["failures"]:
                    failures.append({"u": u.to_json(), "v": v.to_json(), "w": w.to_json(), **f})
    report = {
        "command": "jacobi-check",
        "fixture": fx.descriptor,
        "window": window.to_json(),
        "uv_weight": args.uv_weight,
        "w_degree": format_rational(args.w_degree),
        "bound": args.bound,
        "triples": len(us) ** 2 * len(ws),
        "coefficients_checked": checked,
        "nontrivial_coefficients": nonzero,
        "failures": failures[:20],
        "failure_count": len(failures),
        "verdict": "holds" if not failures else "fails",
    }
    code = EXIT_OK if not failures else EXIT_FAIL
    summary = f"jacobi-check {fx.name}: {checked} coefficients, {len(failures)} failures"
    if failures:
        summary += "\nfirst counter-coefficient: " + json.dumps(_jsonable(failures[0]), sort_keys=True)
    return report, code, summary


def _verdict_code(verdict: str) -> int:
    return {"holds": EXIT_OK, "fails": EXIT_FAIL}.get(verdict, EXIT_INCONCLUSIVE)


def cmd_radical(args):
    fx = _fixture(args.fixture)
    window = _window(args)
    if window.D < 2:
        raise UsageError("radical needs D >= 2")
    if not fx.voa.omega.terms:
        raise UsageError("radical needs a fixture with omega != 0")
    rep = verify_radical_theorem(fx, window)
    report = {"command": "radical", "fixture": fx.descriptor, "window": window.to_json(), **rep}
    code = _verdict_code(rep["verdict"])
    summary = f"radical {fx.name}: dim J = {rep['J']['dim']}, verdict {rep['verdict']}"
    if code == EXIT_FAIL:
        bad = [k for k, v in rep["checks"].items() if not v]
        summary += f" (failed: {', '.join(bad)})"
    elif code == EXIT_INCONCLUSIVE:
        summary += "; J did not stabilize, try a larger -N"
    return report, code, summary


def cmd_zhu(args):
    fx = _fixture(args.fixture)
    window = _window(args)
    if fx.voa.kind != "heisenberg":
        raise UsageError("zhu needs the heisenberg VOA")
    twisted = args.twisted or fx.twisted
    T = 2 if twisted else 1
    try:
        idx = ZhuIndex(args.n, T)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.p_max < window.P:
        raise UsageError("--p-max must be at least P")
    V = fx.voa
    A = build_zhu(V, idx, twisted, window, p_max=args.p_max, literal=args.literal)
    smaller = []
    if idx.n > 0:
        prev = ZhuIndex(idx.n - Fraction(1, T), T)
        smaller.append(build_zhu(V, prev, twisted, window, p_max=args.p_max, split=A.quotient.split,
                                 literal=args.literal))
    if twisted:
        modules = [fx.module] if fx.twisted else [FockModule(V, twisted=True)]
    else:
        modules = [fx.module] if not fx.twisted and fx.module.voa is V else [V.adjoint]
    props = verify_zhu_properties(A, modules, smaller)
    report = {"command": "zhu", "fixture": fx.descriptor, "literal": args.literal, "algebra": A.to_json(),
              "properties": props}
    code = _verdict_code(props["verdict"])
    summary = (f"zhu A{'_g' if twisted else ''}_{idx}: {A.class_count} classes in V_<={window.D}, "
               f"P stabilized at {A.stabilized_at_P}, verdict {props['verdict']}")
    if code == EXIT_FAIL:
        summary += "\nfirst failure: " + json.dumps(_jsonable(props["failures"][:1]), sort_keys=True)
    return report, code, summary


def cmd_irred(args):
    fx = _fixture(args.fixture)
    window = _window(args)
    rep = verify_irreducibility_criterion(fx, window, p_max=args.p_max)
    report = {"command": "irred", "fixture": fx.descriptor, "window": window.to_json(), **rep}
    if not rep["applies"]:
        return report, EXIT_OK, f"irred {fx.name}: criterion does not apply ({rep['reason']})"
    if rep["verdict"] == "inconclusive":
        code = EXIT_INCONCLUSIVE
    elif not rep["consistent_with_witness_search"]:
        code = EXIT_FAIL
    else:
        code = EXIT_OK
    summary = f"irred {fx.name}: {rep['verdict']}"
    if rep["failing_degrees"]:
        summary += f" (pieces failing: {', '.join(rep['failing_degrees'])})"
    return report, code, summary


def cmd_suite(args):
    def progress(res):
        mark = "pass" if res["passed"] else "FAIL"
        print(f"[{mark}] {res['id']} {res['name']}: {res['assertions']} assertions", file=sys.stderr, flush=True)

    only = set(args.only) if args.only else None
    report = run_suite(seed=args.seed, quick=args.quick, only=only, progress=progress)
    code = EXIT_OK if report["passed"] else EXIT_FAIL
    summary = f"suite: {report['assertions']} assertions, {'all passed' if report['passed'] else 'FAILURES'}"
    return report, code, summary


COMMANDS = {
    "jacobi-check": cmd_jacobi,
    "radical": cmd_radical,
    "zhu": cmd_zhu,
    "irred": cmd_irred,
    "suite": cmd_suite,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a command is required: " + ", ".join(COMMANDS))
        report, code, summary = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"voa: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except VoaError as exc:
        # a window or lattice violation surfacing from a computation: the window is too small
        print(f"voa: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    text = dumps(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(summary, file=sys.stderr)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
