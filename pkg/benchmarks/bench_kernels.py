"""Compare the compiled and numpy kNN kernels on random data.

Usage: python3 benchmarks/bench_kernels.py [--sizes 1000 3000 6000] [--dims 3 8] [--k 10] [--repeat 3]

Also checks that both backends return identical neighbours and distances.
"""

import argparse
import time

import numpy as np

from hdadetect import kernels


def _best_time(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--sizes", type=int, nargs="+", default=[1000, 3000, 6000])
    p.add_argument("--dims", type=int, nargs="+", default=[3, 8])
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()

    if kernels.BACKEND != "compiled":
        print("compiled kernel not available; only the numpy backend will be timed")
    rng = np.random.default_rng(args.seed)
    print(f"{'n':>7} {'p':>3} {'k':>3} {'numpy s':>10} {'compiled s':>11} {'speedup':>8} {'identical':>9}")
    for n in args.sizes:
        for d in args.dims:
            X = rng.random((n, d))
            t_py, (d_py, i_py) = _best_time(lambda: kernels.knn_search(X, X, args.k, backend="python"), args.repeat)
            if kernels.BACKEND == "compiled":
                t_c, (d_c, i_c) = _best_time(lambda: kernels.knn_search(X, X, args.k, backend="compiled"), args.repeat)
                same = np.array_equal(i_py, i_c) and np.array_equal(d_py, d_c)
                print(f"{n:>7} {d:>3} {args.k:>3} {t_py:>10.4f} {t_c:>11.4f} {t_py / t_c:>7.1f}x {str(same):>9}")
            else:
                print(f"{n:>7} {d:>3} {args.k:>3} {t_py:>10.4f} {'-':>11} {'-':>8} {'-':>9}")


if __name__ == "__main__":
    main()
