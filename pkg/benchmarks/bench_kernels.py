"""Compare the numba and numpy kernels on the sizes the verifier uses.

    python benchmarks/bench_kernels.py [--repeat 20]

Prints one line per kernel with the best wall time of each backend and the
largest absolute difference between their outputs.
"""

import argparse
import timeit

import numpy as np

from ktrace import kernels


def cases(rng):
    n = 100_000
    coef = 1.0 / np.arange(1, n + 65, dtype=np.float64) ** 2
    h = np.repeat(1.0 + 1.0 / np.arange(1, 4097), 2)
    sizes = 2 * (2 ** np.arange(1, 13))
    s = rng.standard_normal(n)
    return {
        "running_means": ((s,), kernels.running_means_numpy, kernels.running_means_numba),
        "catalog_terms": ((coef, n, 2.0, coef.size), kernels.catalog_terms_numpy,
                          kernels.catalog_terms_numba),
        "smallest_sums": ((h, 2, sizes), kernels.smallest_sums_numpy,
                          kernels.smallest_sums_numba),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    print(f"{'kernel':<16}{'numpy ms':>12}{'numba ms':>12}{'speedup':>10}{'max diff':>12}")
    for name, (argv, np_fn, nb_fn) in cases(rng).items():
        nb_fn(*argv)  # compile outside the timing
        t_np = min(timeit.repeat(lambda: np_fn(*argv), number=1, repeat=args.repeat))
        t_nb = min(timeit.repeat(lambda: nb_fn(*argv), number=1, repeat=args.repeat))
        diff = float(np.max(np.abs(np_fn(*argv) - nb_fn(*argv))))
        print(f"{name:<16}{1e3 * t_np:>12.3f}{1e3 * t_nb:>12.3f}{t_np / t_nb:>10.2f}{diff:>12.2e}")


if __name__ == "__main__":
    main()
