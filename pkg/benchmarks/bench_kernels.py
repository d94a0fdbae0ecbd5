"""Time the numba and numpy Monte Carlo kernels on the same workload.

    python3 benchmarks/bench_kernels.py [--n 200] [--replicates 200000] [--repeat 3]

Both kernels draw identical uniforms, so the printed max difference is a
sanity check (rounding only) rather than a statistical comparison.
"""
import argparse
import timeit

import numpy as np

from selection_lab._accel import HAVE_NUMBA
from selection_lab.kernels import simulate_sum_xy


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--replicates", type=int, default=200_000)
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--workers", type=int, default=1)
    args = p.parse_args(argv)

    xs = np.ones(args.n)
    backends = ["numpy"] + (["numba"] if HAVE_NUMBA else [])
    results, times = {}, {}
    for b in backends:
        # warm-up also triggers JIT compilation (cached on disk afterwards)
        simulate_sum_xy(xs, 0.1, 10, seed=0, backend=b)
        run = lambda: simulate_sum_xy(xs, 0.1, args.replicates, seed=1, workers=args.workers, backend=b)
        best = min(timeit.repeat(run, number=1, repeat=args.repeat))
        results[b] = run()
        times[b] = best
        rate = args.n * args.replicates / best / 1e6
        print(f"{b:>6}: {best:8.3f} s  ({rate:7.1f} M normals/s)")

    if len(results) == 2:
        diff = np.max(np.abs(results["numba"] - results["numpy"]))
        print(f"speed-up {times['numpy'] / times['numba']:.1f}x, max |numba - numpy| = {diff:.3g}")
    else:
        print("numba not available; only the numpy kernel was timed")


if __name__ == "__main__":
    main()
