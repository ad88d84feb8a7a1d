"""Time the numba kernels against their numpy versions.

    python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import time

import numpy as np

from coopcore import _kernels


def random_graph(rng, n, m):
    src = rng.integers(0, n, m, dtype=np.int64)
    dst = rng.integers(0, n, m, dtype=np.int64)
    # a Hamiltonian cycle keeps every node reachable from node 0
    ring = np.arange(n, dtype=np.int64)
    src = np.concatenate([ring, src])
    dst = np.concatenate([np.roll(ring, -1), dst])
    w = rng.integers(-20, 20, len(src), dtype=np.int64)
    return src, dst, w


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    print(f"backend in use: {_kernels.BACKEND}")
    rows = []
    for n, m in ((20, 60), (100, 400), (300, 1500)):
        src, dst, w = random_graph(rng, n, m)
        cases = {"numpy": _kernels.karp_min_mean_np}
        if _kernels.HAVE_NUMBA:
            _kernels.karp_min_mean_nb(n, 0, src, dst, w)  # compile
            cases["numba"] = _kernels.karp_min_mean_nb
        for name, fn in cases.items():
            rows.append((f"karp n={n} m={m + n}", name, best_of(lambda: fn(n, 0, src, dst, w), args.repeat)))
    for n in (50, 1000, 20000):
        left = rng.random(n) < 0.7
        right = rng.random(n) < 0.05
        k = n // 3
        cases = {"numpy": _kernels.until_on_lasso_np}
        if _kernels.HAVE_NUMBA:
            _kernels.until_on_lasso_nb(left, right, k)
            cases["numba"] = _kernels.until_on_lasso_nb
        for name, fn in cases.items():
            rows.append((f"until n={n}", name, best_of(lambda: fn(left, right, k), args.repeat)))
    for case, name, secs in rows:
        print(f"{case:<24} {name:<6} {secs * 1e3:10.3f} ms")


if __name__ == "__main__":
    main()
