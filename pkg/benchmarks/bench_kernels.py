#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure NumPy fallback.

Usage: python benchmarks/bench_kernels.py [--repeat N]

Workloads mirror the expensive library paths: batched rank-aggregation
scoring (the shape of a 10k-song null-calibration run) and tau pair counting
over many short tied-rank vectors.
"""

from __future__ import annotations

import argparse
import time

import numpy as np
from scipy.stats import rankdata

from lyricvalues import _kernels


def time_call(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_rho(backend, rows, repeat):
    return time_call(lambda: backend.rho_many(rows), repeat)


def bench_tau(backend, pairs, repeat):
    def run():
        for x, y in pairs:
            backend.tau_counts(x, y)

    return time_call(run, repeat)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--rho-rows", type=int, default=100_000)
    parser.add_argument("--rho-lists", type=int, default=25)
    parser.add_argument("--tau-pairs", type=int, default=20_000)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    rows = rng.integers(1, 11, (args.rho_rows, args.rho_lists)) / 10.0
    pairs = []
    for _ in range(args.tau_pairs):
        x = rankdata(rng.integers(0, 5, 10), method="average")
        y = rankdata(rng.integers(0, 5, 10), method="average")
        pairs.append((x, y))

    backends = _kernels.available_backends()
    print(f"backends: {', '.join(backends)} (active: {_kernels.BACKEND})")
    print(f"rho_many: {args.rho_rows} rows x {args.rho_lists} lists; "
          f"tau_counts: {args.tau_pairs} pairs of length 10\n")
    print(f"{'workload':<12} {'backend':<10} {'best (s)':>10} {'throughput':>16}")
    results: dict[tuple[str, str], float] = {}
    for name in backends:
        backend = _kernels.get_backend(name)
        t = bench_rho(backend, rows, args.repeat)
        results[("rho_many", name)] = t
        print(f"{'rho_many':<12} {name:<10} {t:>10.4f} {args.rho_rows / t:>12.0f} row/s")
    for name in backends:
        backend = _kernels.get_backend(name)
        t = bench_tau(backend, pairs, args.repeat)
        results[("tau_counts", name)] = t
        print(f"{'tau_counts':<12} {name:<10} {t:>10.4f} {args.tau_pairs / t:>11.0f} pair/s")

    if "compiled" in backends and "pure" in backends:
        print()
        for workload in ("rho_many", "tau_counts"):
            speedup = results[(workload, "pure")] / results[(workload, "compiled")]
            print(f"{workload}: compiled is {speedup:.1f}x the pure fallback")


if __name__ == "__main__":
    main()
