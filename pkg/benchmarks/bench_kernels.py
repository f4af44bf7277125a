#!/usr/bin/env python3
"""Benchmark the strategy-scan kernels: numba JIT vs pure numpy.

Both engines run the identical exact-integer scan over all 2^(2n) deterministic
strategies of the n-party correlator; results are checked for equality before
timings are reported.

Usage:
    python benchmarks/bench_kernels.py [--nmax 8] [--repeats 3]
"""

import argparse
import time

import numpy as np

from ghzbell import _kernels
from ghzbell.lhv import compile_terms
from ghzbell.polynomial import build_bell


def time_engine(engine, masks, coeffs, n_bits, repeats):
    best = float("inf")
    result = None
    for _ in range(repeats):
        start = time.perf_counter()
        result = _kernels.strategy_values(masks, coeffs, n_bits, engine=engine)
        best = min(best, time.perf_counter() - start)
    return best, result


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--nmax", type=int, default=8, help="largest party count (default 8)")
    parser.add_argument("--repeats", type=int, default=3, help="timing repeats, best is kept")
    args = parser.parse_args()

    if not _kernels.HAS_NUMBA:
        print("numba unavailable; only the numpy engine will run")

    print(f"{'n':>3} {'strategies':>12} {'terms':>8} {'numpy [s]':>10} {'numba [s]':>10} {'speedup':>8}")
    for n in range(4, args.nmax + 1):
        masks, coeffs, _ = compile_terms(build_bell(n))
        n_bits = 2 * n
        if _kernels.HAS_NUMBA:
            # warm the JIT cache outside the timed region
            _kernels.strategy_values(masks, coeffs, n_bits, engine="numba")
        t_np, r_np = time_engine("numpy", masks, coeffs, n_bits, args.repeats)
        if _kernels.HAS_NUMBA:
            t_nb, r_nb = time_engine("numba", masks, coeffs, n_bits, args.repeats)
            assert np.array_equal(r_np, r_nb), "engines disagree"
            print(f"{n:>3} {1 << n_bits:>12} {len(coeffs):>8} {t_np:>10.4f} {t_nb:>10.4f} {t_np / t_nb:>8.1f}")
        else:
            print(f"{n:>3} {1 << n_bits:>12} {len(coeffs):>8} {t_np:>10.4f} {'-':>10} {'-':>8}")


if __name__ == "__main__":
    main()
