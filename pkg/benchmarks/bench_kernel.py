#!/usr/bin/env python3
"""Tick-kernel benchmark: compiled extension vs pure-Python fallback.

The per-tick agent update (seed expansion + label refresh) dominates the
runtime of long runs and of the statistical privacy suites, so it is the
one hot path worth compiling. This script times both implementations on
representative configurations and prints the speedup.

Usage: python benchmarks/bench_kernel.py [--ticks N]
"""

import argparse
import random
import time
from array import array

from swarmfsa import _kernel_py

try:
    from swarmfsa import _kernel_cy
except ImportError:
    _kernel_cy = None

CASES = [
    # (name, modulus, m, groups, seed_len)
    ("pairwise GF(2), m=4, n=4 (3 seeds)", 2, 4, 3, 16),
    ("pairwise GF(2), m=8, n=6 (5 seeds)", 2, 8, 5, 16),
    ("threshold GF(257), m=8, 15 seeds", 257, 8, 15, 16),
    ("threshold GF(2^61-1), m=8, 15 seeds", (1 << 61) - 1, 8, 15, 16),
]


def make_inputs(rng, modulus, m, groups, seed_len):
    labels = array("Q", [rng.randrange(modulus) for _ in range(m)])
    seeds = bytearray(rng.getrandbits(8) for _ in range(groups * seed_len))
    weights = array(
        "Q", [1 if modulus == 2 else rng.randrange(1, modulus) for _ in range(groups)]
    )
    idx = array("i")
    off = array("i", [0])
    targets = [rng.randrange(m) for _ in range(m)]
    for j in range(m):
        idx.extend(k for k in range(m) if targets[k] == j)
        off.append(len(idx))
    return labels, idx, off, seeds, weights


def bench(kernel, ticks, modulus, m, groups, seed_len):
    rng = random.Random(1234)
    labels, idx, off, seeds, weights = make_inputs(rng, modulus, m, groups, seed_len)
    t0 = time.perf_counter()
    for r in range(ticks):
        pre = (idx, off) if r % 2 == 0 else (None, None)
        kernel.agent_tick_raw(labels, pre[0], pre[1], seeds, weights, modulus, seed_len)
    dt = time.perf_counter() - t0
    return ticks / dt, list(labels)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--ticks", type=int, default=20000)
    args = ap.parse_args()
    print(f"agent ticks per second ({args.ticks} ticks per case)\n")
    header = f"{'case':46} {'pure':>12} {'compiled':>12} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for name, modulus, m, groups, seed_len in CASES:
        pure_rate, pure_labels = bench(_kernel_py, args.ticks, modulus, m, groups, seed_len)
        if _kernel_cy is not None:
            cy_rate, cy_labels = bench(_kernel_cy, args.ticks, modulus, m, groups, seed_len)
            assert cy_labels == pure_labels, "kernel outputs diverge"
            print(f"{name:46} {pure_rate:12.0f} {cy_rate:12.0f} {cy_rate / pure_rate:8.1f}x")
        else:
            print(f"{name:46} {pure_rate:12.0f} {'n/a':>12} {'n/a':>9}")
    if _kernel_cy is None:
        print("\ncompiled kernel not built; only the pure-Python fallback was timed")


if __name__ == "__main__":
    main()
