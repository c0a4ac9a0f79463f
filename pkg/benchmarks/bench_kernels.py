#!/usr/bin/env python3
"""Timing comparison of the compiled and pure-Python tail kernels.

Generates random pair-count batches at a few population sizes, runs both
backends on identical inputs, and reports throughput, speedup and the
largest disagreement.  The shared first-term computation is excluded from
neither backend: each timing covers exactly what the engine calls.
"""

import argparse
import time

import numpy as np

from hnet import kernels
from hnet.kernels import _fallback

try:
    from hnet.kernels import _speedups
except ImportError:
    _speedups = None


def make_batch(rng, size, population):
    N = np.full(size, population, dtype=np.int64)
    K = rng.binomial(population, rng.uniform(0.05, 0.5, size=size))
    n = rng.binomial(population, rng.uniform(0.05, 0.5, size=size))
    lo = np.maximum(0, n - (N - K))
    hi = np.minimum(K, n)
    x = lo + (rng.random(size) * (hi - lo + 1)).astype(np.int64)
    return N, K.astype(np.int64), n.astype(np.int64), np.minimum(x, hi)


def time_backend(impl, N, K, n, x, repeats):
    first = kernels._first_term(N, K, n, x)
    out = np.empty(N.shape[0])
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        impl.tail_batch(N, K, n, x, first, out)
        best = min(best, time.perf_counter() - t0)
    return best, out.copy()


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="10000,100000,1000000",
                    help="comma-separated batch sizes")
    ap.add_argument("--population", type=int, default=10000,
                    help="population count N for every pair")
    ap.add_argument("--repeats", type=int, default=3,
                    help="timing repeats, best taken")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    sizes = [int(s) for s in args.sizes.split(",")]

    print(f"population N = {args.population}, best of {args.repeats} runs")
    header = (f"{'batch':>10} {'fallback':>12} {'compiled':>12} "
              f"{'speedup':>8} {'max |diff|':>11}")
    print(header)
    print("-" * len(header))
    for size in sizes:
        batch = make_batch(rng, size, args.population)
        t_fb, out_fb = time_backend(_fallback, *batch, args.repeats)
        fb = f"{size / t_fb / 1e6:9.2f}M/s"
        if _speedups is None:
            print(f"{size:>10} {fb:>12} {'missing':>12} {'-':>8} {'-':>11}")
            continue
        t_c, out_c = time_backend(_speedups, *batch, args.repeats)
        diff = float(np.max(np.abs(out_fb - out_c)))
        print(f"{size:>10} {fb:>12} {size / t_c / 1e6:9.2f}M/s "
              f"{t_fb / t_c:7.1f}x {diff:11.2e}")


if __name__ == "__main__":
    main()
