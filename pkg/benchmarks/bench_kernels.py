"""Time the numpy and numba MDS kernels against each other.

    python3 benchmarks/bench_kernels.py [--sizes 54 200] [--repeat 5]

Each kernel is called once before timing so numba compilation is excluded.
"""

import argparse
import timeit

import numpy as np

from corpus_lens import _kernels


def bench(fn, args, repeat):
    fn(*args)
    return min(timeit.repeat(lambda: fn(*args), number=1, repeat=repeat))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", type=int, nargs="+", default=[54, 120, 250])
    ap.add_argument("--repeat", type=int, default=5)
    a = ap.parse_args()
    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not importable")

    rng = np.random.default_rng(0)
    print(f"{'kernel':10s} {'n':>5s} {'numpy s':>10s} {'numba s':>10s} {'speedup':>8s}")
    for n in a.sizes:
        pts = rng.normal(size=(n, 5))
        d = _kernels.pairwise_distances_numpy(pts)
        b = -0.5 * (d ** 2 - (d ** 2).mean(0) - (d ** 2).mean(1)[:, None] + (d ** 2).mean())
        x = rng.normal(size=(n, 2))
        cases = [
            ("jacobi", "jacobi_eigh", (b,)),
            ("guttman", "guttman_transform", (d, x)),
            ("stress", "raw_stress", (d, x)),
        ]
        for name, kernel, args in cases:
            numpy_fn = getattr(_kernels, kernel + "_numpy")
            numba_fn = getattr(_kernels, kernel + "_numba")
            # jacobi is O(n^3) per sweep; keep the big numpy case to one run
            rep = 1 if name == "jacobi" and n > 150 else a.repeat
            tn = bench(numpy_fn, args, rep)
            tb = bench(numba_fn, args, rep)
            print(f"{name:10s} {n:5d} {tn:10.4f} {tb:10.4f} {tn / tb:8.1f}x")


if __name__ == "__main__":
    main()
