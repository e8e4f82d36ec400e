"""Compare the compiled and pure-numpy paths of the diagonalization kernel.

Usage: python benchmarks/bench_kernels.py [--sizes 4 8 16 32] [--reps 20] [--moduli 12 360 2**20]

Both paths are run on identical inputs; their outputs are asserted equal
before any timing is reported.
"""

from __future__ import annotations

import argparse
import statistics
import time

import numpy as np

from relhom import _kernels


def _run(fn, A, m):
    r, c = A.shape
    B = A.copy()
    P, Pinv = np.eye(r, dtype=np.int64), np.eye(r, dtype=np.int64)
    Q, Qinv = np.eye(c, dtype=np.int64), np.eye(c, dtype=np.int64)
    fn(B, m, P, Pinv, Q, Qinv)
    return B, P, Pinv, Q, Qinv


def _time(fn, mats, m, reps):
    samples = []
    for _ in range(reps):
        t0 = time.perf_counter()
        for A in mats:
            _run(fn, A, m)
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples) / len(mats)


def _modulus(text: str) -> int:
    """An integer, optionally written as a power ``b**e``."""
    base, _, exp = text.partition("**")
    return int(base) ** int(exp) if exp else int(base)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[4, 8, 16, 32])
    ap.add_argument("--moduli", type=_modulus, nargs="+", default=[12, 360, 2**20])
    ap.add_argument("--reps", type=int, default=5)
    ap.add_argument("--batch", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    compiled = _kernels.diagonalize_mod
    pure = getattr(compiled, "py_func", compiled)
    print(f"numba enabled: {_kernels.NUMBA_ENABLED}")
    if _kernels.NUMBA_ENABLED:
        _run(compiled, np.ones((2, 2), dtype=np.int64), 4)  # JIT warm-up, excluded from timings
    rng = np.random.default_rng(args.seed)
    print(f"{'m':>9} {'n':>4} {'numba µs':>12} {'numpy µs':>12} {'speedup':>8}")
    for m in args.moduli:
        for n in args.sizes:
            mats = [rng.integers(0, m, size=(n, n)).astype(np.int64) for _ in range(args.batch)]
            for A in mats:
                for x, y in zip(_run(compiled, A, m), _run(pure, A, m)):
                    assert np.array_equal(x, y), "compiled and pure paths disagree"
            tc = _time(compiled, mats, m, args.reps)
            tp = _time(pure, mats, m, args.reps)
            print(f"{m:>9} {n:>4} {tc * 1e6:>12.1f} {tp * 1e6:>12.1f} {tp / tc:>8.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
