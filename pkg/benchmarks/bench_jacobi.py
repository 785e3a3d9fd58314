"""Compare the compiled and pure-Python Jacobi backends.

Usage::

    python benchmarks/bench_jacobi.py [--batch 4096] [--repeat 5]

Times single 4x4 solves, a batch of random Hermitian matrices, and a
full criteria evaluation of random states, for every available backend.
"""
import argparse
import timeit

import numpy as np

from qent import criteria, smallmat, states


def random_hermitian(n, rng):
    g = rng.standard_normal((n, 4, 4)) + 1j * rng.standard_normal((n, 4, 4))
    return (g + np.conj(np.swapaxes(g, 1, 2))) / 2


def best_of(fn, repeat, number):
    return min(timeit.repeat(fn, repeat=repeat, number=number)) / number


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--batch", type=int, default=4096)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    one = random_hermitian(1, rng)
    many = random_hermitian(args.batch, rng)
    rhos = states.random_states(0, 4, 0, args.batch)

    print(f"{'backend':<8} {'single (us)':>12} {'batch/matrix (us)':>18} {'criteria/state (us)':>20}")
    prev = smallmat.get_backend()
    try:
        for name in smallmat.available_backends():
            smallmat.set_backend(name)
            t1 = best_of(lambda: smallmat.eigh_batch(one), args.repeat, 200)
            tb = best_of(lambda: smallmat.eigh_batch(many), args.repeat, 1) / args.batch
            tc = best_of(lambda: criteria.evaluate_batch(rhos), args.repeat, 1) / args.batch
            print(f"{name:<8} {t1 * 1e6:>12.1f} {tb * 1e6:>18.2f} {tc * 1e6:>20.2f}")
    finally:
        smallmat.set_backend(prev)


if __name__ == "__main__":
    main()
