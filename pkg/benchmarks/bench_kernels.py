"""Compiled vs pure-Python kernels.

Usage: ``python3 benchmarks/bench_kernels.py [--repeat N]``. Prints one row per
kernel with the best-of-N wall time of each backend and the speedup.
"""

import argparse
import timeit

import numpy as np

from sblcube import _kernels_py as pure

try:
    from sblcube import _kernels as compiled
except ImportError:
    compiled = None


def _int_matrix(rng, n, bound=9):
    return [[int(x) for x in row] for row in rng.integers(-bound, bound + 1, size=(n, n))]


def cases(rng):
    # sizes the package meets: Pi is at most 6 x 12 (m <= 3, d <= 2); larger
    # integer matrices overflow the 64-bit compiled path and fall back anyway
    det_rows = _int_matrix(rng, 6)
    ech_rows = [row + row for row in _int_matrix(rng, 6)]
    theta = np.sort(rng.uniform(0, 2 * np.pi, 4000))
    circle = np.column_stack([np.cos(theta), np.sin(theta)])
    pts = rng.normal(size=(5000, 3))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    centers = rng.normal(size=(400, 3))
    centers /= np.linalg.norm(centers, axis=1, keepdims=True)
    return [
        ("bareiss_det 6x6", "bareiss_det", ([r[:] for r in det_rows],)),
        ("bareiss_echelon 6x12", "bareiss_echelon", ([r[:] for r in ech_rows],)),
        ("greedy_separated 4000 pts", "greedy_separated", (circle, 0.01)),
        ("nearest_distance 5000x400", "nearest_distance", (pts, centers)),
    ]


def best_time(fn, args, repeat):
    # copy list arguments each call: the elimination kernels may work in place
    call = lambda: fn(*[[r[:] for r in a] if isinstance(a, list) else a for a in args])
    number = max(1, int(0.2 / max(timeit.timeit(call, number=1), 1e-6)))
    return min(timeit.repeat(call, number=number, repeat=repeat)) / number


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':28s} {'python [ms]':>12s} {'compiled [ms]':>14s} {'speedup':>8s}")
    for label, name, fargs in cases(rng):
        tp = best_time(getattr(pure, name), fargs, args.repeat)
        if compiled is None:
            print(f"{label:28s} {tp * 1e3:12.3f} {'n/a':>14s} {'n/a':>8s}")
            continue
        tc = best_time(getattr(compiled, name), fargs, args.repeat)
        print(f"{label:28s} {tp * 1e3:12.3f} {tc * 1e3:14.3f} {tp / tc:7.1f}x")


if __name__ == "__main__":
    main()
