#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Covers the two hot loops: Haar orthogonalization of small-matrix stacks
and the per-trial gram inversion behind the Monte Carlo experiments.
The numba backend is warmed up before timing so JIT compilation is not
billed to the kernel.

Usage: python3 benchmarks/compare_backends.py [--repeat 3] [--csv out.csv]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from wishart_risk._kernels import available_backends, get_kernels

HAAR_CASES = [
    ("haar 4x4 x 200k", dict(n=4, samples=200_000)),
    ("haar 16x16 x 20k", dict(n=16, samples=20_000)),
]
INV_CASES = [
    ("inv (n=10, T=60) x 20k", dict(n=10, t=60, trials=20_000)),
    ("inv (n=50, T=120) x 2k", dict(n=50, t=120, trials=2_000)),
    ("inv (n=200, T=250) x 100", dict(n=200, t=250, trials=100)),
]


def time_call(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=3, help="timing repetitions")
    parser.add_argument("--csv", help="also write case,backend,seconds rows here")
    args = parser.parse_args()

    backends = available_backends()
    rng = np.random.default_rng(0)
    rows = []

    for label, case in HAAR_CASES:
        gauss = rng.standard_normal((case["samples"], case["n"], case["n"]))
        for name in backends:
            kernels = get_kernels(name)
            kernels.haar_batch(gauss[:10])  # warm-up / JIT
            rows.append((label, name, time_call(lambda: kernels.haar_batch(gauss),
                                                args.repeat)))

    for label, case in INV_CASES:
        y = rng.standard_normal((case["trials"], case["t"], case["n"]))
        g = rng.standard_normal((case["t"], 2 * case["t"]))
        b = g @ g.T / (2 * case["t"]) + 0.05 * np.eye(case["t"])
        for name in backends:
            kernels = get_kernels(name)
            kernels.inv_gram_batch(y[:4], b)
            rows.append((label, name, time_call(lambda: kernels.inv_gram_batch(y, b),
                                                args.repeat)))

    width = max(len(r[0]) for r in rows)
    print(f"{'case':<{width}}  backend  seconds")
    for label, name, seconds in rows:
        print(f"{label:<{width}}  {name:<7}  {seconds:8.3f}")
    by_case = {}
    for label, name, seconds in rows:
        by_case.setdefault(label, {})[name] = seconds
    if "numba" in backends:
        print()
        for label, timings in by_case.items():
            ratio = timings["numpy"] / timings["numba"]
            print(f"{label:<{width}}  numpy/numba = {ratio:.2f}x")
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as handle:
            handle.write("case,backend,seconds\n")
            for label, name, seconds in rows:
                handle.write(f"{label},{name},{seconds:.6f}\n")


if __name__ == "__main__":
    main()
