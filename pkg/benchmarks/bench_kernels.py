"""Throughput comparison of the numba and numpy kernel backends.

Each backend runs in a fresh subprocess (backend choice is bound at import
time via BUCKDENS_BACKEND), exercising the three hot kernels plus an
end-to-end depth-9 tower construction.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json
import time

import numpy as np

from buckdens import kernels
from buckdens.construction import construct
from buckdens.oracles import PrimesOracle


def timeit(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(repeat):
    rng = np.random.default_rng(0)
    k = 362880  # 9!
    bits = (rng.random(k) < 0.4).astype(np.uint8)
    out = np.zeros(k, dtype=np.uint8)
    n = 10**7
    mask = (rng.random(n) < 0.5).astype(np.uint8)
    period_bits = (rng.random(5040) < 0.3).astype(np.uint8)
    big_out = np.zeros(n, dtype=np.uint8)

    def bench_or_rotated():
        for s in range(0, k, k // 200):
            kernels.or_rotated(out, bits, s)

    def bench_and_periodic():
        kernels.and_periodic(mask.copy(), period_bits, 5040)

    def bench_or_shifted():
        for s in range(0, n, n // 100):
            kernels.or_shifted_clipped(big_out, mask, s)

    def bench_tower():
        construct(PrimesOracle(), __import__("fractions").Fraction(1, 2), 9)

    # warm-up triggers numba compilation so it is not timed
    bench_or_rotated(); bench_and_periodic(); bench_or_shifted(); bench_tower()

    print(json.dumps({
        "backend": kernels.active_backend(),
        "or_rotated_200x_9!": timeit(bench_or_rotated, repeat),
        "and_periodic_1e7": timeit(bench_and_periodic, repeat),
        "or_shifted_100x_1e7": timeit(bench_or_shifted, repeat),
        "tower_primes_depth9": timeit(bench_tower, repeat),
    }))


main({repeat})
"""


def run_backend(backend: str, repeat: int) -> dict:
    env = dict(os.environ, BUCKDENS_BACKEND=backend)
    proc = subprocess.run(
        [sys.executable, "-c", WORKER.replace("{repeat}", str(repeat))],
        capture_output=True, text=True, env=env, check=True)
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    rows = [run_backend(b, args.repeat) for b in ("numba", "numpy")]
    keys = [k for k in rows[0] if k != "backend"]
    width = max(map(len, keys)) + 2
    print(f"{'kernel':<{width}}{'numba':>12}{'numpy':>12}{'speedup':>10}")
    for key in keys:
        nb, np_ = rows[0][key], rows[1][key]
        print(f"{key:<{width}}{nb:>12.4f}{np_:>12.4f}{np_ / nb:>10.2f}x")


if __name__ == "__main__":
    main()
