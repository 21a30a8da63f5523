"""Compare the compiled and pure-Python hot kernels.

    python benchmarks/bench_kernels.py [--N 256] [--repeat 5]

Times circular_box_sum, local_max_mask and ball_cluster_sums on a 2D field
with both backends, checks that the outputs agree, and prints the speedup.
"""
import argparse
import sys
import timeit

import numpy as np

from lcgf import _kernels_py
from lcgf.lattice import ball_offsets

try:
    from lcgf import _kernels as _kernels_c
except ImportError:
    _kernels_c = None


def cases(N, rng):
    field = rng.standard_normal((N, N))
    r = max(2, int(np.log(N) ** 2) // 4)
    centers = rng.choice(N * N, size=N, replace=False)
    return {
        "circular_box_sum": lambda k: k.circular_box_sum(field, N // 4),
        "local_max_mask": lambda k: k.local_max_mask(field, ball_offsets(2, r)),
        "ball_cluster_sums": lambda k: k.ball_cluster_sums(field, centers, ball_offsets(2, r / 2), 4.0),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--N", type=int, default=256)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if _kernels_c is None:
        print("compiled extension not built; run `pip install -e . --no-build-isolation` first")
        return 1
    rng = np.random.default_rng(0)
    print(f"N = {args.N}, d = 2, best of {args.repeat}")
    print(f"{'kernel':<20} {'python ms':>10} {'cython ms':>10} {'speedup':>8}  agree")
    for name, call in cases(args.N, rng).items():
        a, b = call(_kernels_py), call(_kernels_c)
        # summation order differs between backends, so compare on the scale of the output
        agree = all(np.allclose(x, y, rtol=0, atol=1e-12 * max(1.0, np.abs(x).max())) for x, y in
                    zip(a if isinstance(a, tuple) else (a,), b if isinstance(b, tuple) else (b,)))
        tp = min(timeit.repeat(lambda: call(_kernels_py), number=1, repeat=args.repeat)) * 1e3
        tc = min(timeit.repeat(lambda: call(_kernels_c), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:<20} {tp:10.3f} {tc:10.3f} {tp / tc:8.1f}x  {agree}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
