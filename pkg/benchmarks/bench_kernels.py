"""Compiled versus pure-Python kernels.

Times the two hot kernels (fraction-free RREF and integer matmul) on a workbench
matrix and on seeded random integer matrices, then two end-to-end commands
under each kernel. Results must agree exactly. Dense random matrices grow
past int64 during elimination, where the compiled RREF hands over to the
Python path; they are included to show that cost honestly.

    python benchmarks/bench_kernels.py [--repeat 3] [--seed 0]
"""

from __future__ import annotations

import argparse
import os
import random
import subprocess
import sys
import time

from voa import _kernels_py

try:
    from voa import _kernels
except ImportError:
    _kernels = None


def _matrix(rng, n, m, lo=-3, hi=3, density=0.5):
    return [[rng.randint(lo, hi) if rng.random() < density else 0 for _ in range(m)] for _ in range(n)]


def _best(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def _workload_rows(D: int):
    # integer rows of (L(-1)+L(0))V_{<=D-1} inside V_{<=D}, a matrix the workbench reduces
    from voa.boson import HeisenbergVOA
    from voa.graded import FlatBasis
    from voa.liehat import L_zero_plus_minus_one

    V = HeisenbergVOA()
    flat = FlatBasis.upto(V, D)
    rows = []
    for k in range(D):
        for u in V.basis(k):
            # omega = 1/2 a(-1)^2 1, so doubling clears every denominator
            rows.append([int(x * 2) for x in flat.flatten(L_zero_plus_minus_one(V, {u: 1}))])
    return rows, flat.dim


def kernel_rows(seed: int, repeat: int):
    rng = random.Random(seed)
    cases = []
    for D in (8, 10):
        rows, m = _workload_rows(D)
        cases.append(("rref_int", f"quotient D={D} {len(rows)}x{m}", rows, m))
    for n, m in ((60, 80), (150, 150)):
        cases.append(("rref_int", f"sparse {n}x{m}", _matrix(rng, n, m, -1, 1, 0.08), m))
    for n, m in ((60, 80), (120, 144)):
        cases.append(("rref_int", f"dense {n}x{m}", _matrix(rng, n, m), m))
    for n, k, m in ((50, 40, 30), (200, 60, 50), (600, 80, 40)):
        cases.append(("int_matmul", f"{n}x{k}@{k}x{m}", (_matrix(rng, n, k), _matrix(rng, k, m, -9, 9)), None))
    rows = []
    for name, shape, data, ncols in cases:
        if name == "rref_int":
            py = lambda: _kernels_py.rref_int(data, ncols)  # noqa: E731
            c = (lambda: _kernels.rref_int(data, ncols)) if _kernels else None  # noqa: E731
        else:
            py = lambda: _kernels_py.int_matmul(*data)  # noqa: E731
            c = (lambda: _kernels.int_matmul(*data)) if _kernels else None  # noqa: E731
        tp, rp = _best(py, repeat)
        if c is None:
            rows.append((name, shape, tp, None, None))
            continue
        tc, rc = _best(c, repeat)
        if rp != rc:
            raise SystemExit(f"kernel mismatch on {name} {shape}")
        rows.append((name, shape, tp, tc, tp / tc))
    return rows


def end_to_end(argv):
    out = {}
    for kernel in ("python", "compiled"):
        env = dict(os.environ, VOA_KERNEL=kernel)
        t = time.perf_counter()
        res = subprocess.run([sys.executable, "-m", "voa", *argv], capture_output=True, env=env, check=False)
        out[kernel] = (time.perf_counter() - t, res.stdout, res.returncode)
    if out["python"][1:] != out["compiled"][1:]:
        raise SystemExit("end-to-end reports differ between kernels")
    return out["python"][0], out["compiled"][0]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    print(f"compiled extension: {'available' if _kernels else 'missing'}")
    print(f"{'kernel':<11} {'shape':<28} {'python s':>10} {'compiled s':>11} {'speedup':>8}")
    for name, shape, tp, tc, sp in kernel_rows(args.seed, args.repeat):
        if tc is None:
            print(f"{name:<11} {shape:<28} {tp:>10.4f} {'-':>11} {'-':>8}")
        else:
            print(f"{name:<11} {shape:<28} {tp:>10.4f} {tc:>11.4f} {sp:>7.1f}x")
    if _kernels:
        for argv in (["irred", "--fixture", "fock:1", "-D", "4", "-P", "4", "-N", "4"],
                     ["zhu", "-n", "1", "-D", "3", "-P", "3"]):
            tp, tc = end_to_end(argv)
            print(f"end-to-end {' '.join(argv)}: python {tp:.2f}s, compiled {tc:.2f}s, reports identical")


if __name__ == "__main__":
    main()
