"""Compare the compiled and numpy kernel backends.

Usage::

    python benchmarks/bench_kernels.py [--batch 500] [--repeat 20]

Both backends produce bitwise-identical results; the benchmark checks that
before timing.
"""
import argparse
import timeit

import numpy as np

from inertia_bundles.kernels import get_backend
from inertia_bundles.random_fields import random_spd, random_symmetric


def _stack(rng, batch, n, spd=False):
    make = random_spd if spd else random_symmetric
    return np.stack([make(rng, n) for _ in range(batch)])


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--batch", type=int, default=500)
    parser.add_argument("--repeat", type=int, default=20)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    try:
        cy = get_backend("cython")
    except ImportError:
        print("compiled extension not built; nothing to compare")
        return 1
    py = get_backend("python")
    rng = np.random.default_rng(args.seed)

    print(f"{'kernel':<22}{'n':>3}{'batch':>7}{'cython (ms)':>14}{'python (ms)':>14}{'speedup':>10}")
    for n in (2, 3, 6):
        sym = _stack(rng, args.batch, n)
        spd = _stack(rng, args.batch, n, spd=True)
        low = np.linalg.cholesky(spd)
        cases = [
            ("jacobi_eigh (single)", lambda m, a=sym[:1]: m.jacobi_eigh_batch(a, 1e-13, 60), 1),
            ("jacobi_eigh", lambda m, a=sym: m.jacobi_eigh_batch(a, 1e-13, 60), args.batch),
            ("cholesky", lambda m, a=spd: m.cholesky_batch(a), args.batch),
            ("tril_inv", lambda m, a=low: m.tril_inv_batch(a), args.batch),
        ]
        for name, fn, size in cases:
            for x, y in zip(fn(cy), fn(py)):
                assert np.array_equal(x, y), f"{name}: backends disagree"
            t_cy = min(timeit.repeat(lambda: fn(cy), number=1, repeat=args.repeat)) * 1e3
            t_py = min(timeit.repeat(lambda: fn(py), number=1, repeat=args.repeat)) * 1e3
            print(f"{name:<22}{n:>3}{size:>7}{t_cy:>14.3f}{t_py:>14.3f}{t_py / t_cy:>10.1f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
