"""Compare the compiled and pure-Python kernel backends.

Usage::

    python benchmarks/bench_kernels.py [--repeat 5]

Prints the best wall time per call for each kernel and backend, plus the
reference cost of the scipy ``expm`` displacement that the Laguerre kernel
cross-checks.
"""

import argparse
import timeit

import numpy as np

from quasiphase import TruncatedFockSpace, displacement_matrix, kernels


def best(fn, repeat, number):
    return min(timeit.repeat(fn, repeat=repeat, number=number)) / number


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    backends = ["python"] + (["cython"] if kernels.BACKEND == "cython" else [])
    if len(backends) == 1:
        print("compiled extension not available; timing the fallback only")

    rng = np.random.default_rng(0)
    rows = []
    for dim in (32, 64, 128):
        alpha = 1.3 - 0.7j
        for b in backends:
            t = best(lambda: kernels.displacement_elements(alpha, dim, backend=b), args.repeat, 3)
            rows.append((f"displacement_elements dim={dim}", b, t))
        space = TruncatedFockSpace(dim)
        t = best(lambda: displacement_matrix(space, alpha), args.repeat, 3)
        rows.append((f"displacement_elements dim={dim}", "scipy expm", t))

    probs = rng.random(64)
    cdf = np.cumsum(probs) / probs.sum()
    for shots in (10_000, 1_000_000):
        uniforms = np.random.default_rng(1).random(shots)
        for b in backends:
            t = best(lambda: kernels.parity_tally(cdf, uniforms, backend=b), args.repeat, 1)
            rows.append((f"parity_tally shots={shots}", b, t))

    width = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{width}}  {'backend':<10}  {'seconds/call':>12}")
    for name, b, t in rows:
        print(f"{name:<{width}}  {b:<10}  {t:12.3e}")


if __name__ == "__main__":
    main()
