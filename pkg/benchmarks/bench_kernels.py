#!/usr/bin/env python3
"""Benchmark the compiled assignment kernel against the numpy fallback.

Times the hot kernel on geometric cost matrices (squared distances between
Gaussian clouds, the workload of LOT embedding) and prints a table.

    python benchmarks/bench_kernels.py [--sizes 64,128,256] [--repeats 5]
"""

import argparse
import time

import numpy as np

from otlaplace import kernels


def cost_matrix(rng, m):
    x = rng.standard_normal((m, 2))
    y = rng.standard_normal((m, 2)) + [0.5, 0.0]
    diff = x[:, None, :] - y[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def bench(fn, costs, repeats):
    best = np.inf
    for _ in range(repeats):
        start = time.perf_counter()
        for c in costs:
            fn(c)
        best = min(best, (time.perf_counter() - start) / len(costs))
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="32,64,128,256,512")
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--instances", type=int, default=4)
    args = parser.parse_args()

    impls = kernels.available_implementations()
    print("active implementation: %s" % kernels.implementation)
    if "cython" not in impls:
        print("compiled kernel not built; timing the fallback only")

    rng = np.random.default_rng(0)
    header = "m       " + "".join("%12s" % name for name in impls) + "     speedup"
    print(header)
    print("-" * len(header))
    for size in [int(s) for s in args.sizes.split(",")]:
        costs = [cost_matrix(rng, size) for _ in range(args.instances)]
        results = {}
        for name, fn in impls.items():
            perms = {tuple(fn(c)[0]) for c in costs}
            results[name] = bench(fn, costs, args.repeats)
            assert len(perms) == args.instances or size == 1
        row = "%-8d" % size + "".join(
            "%10.3f ms" % (1e3 * results[name]) for name in impls
        )
        if len(results) == 2:
            row += "%10.1fx" % (results["python"] / results["cython"])
        print(row)

    if len(impls) == 2:
        mismatch = 0
        for _ in range(200):
            c = cost_matrix(rng, int(rng.integers(2, 40)))
            outs = [impls[name](c) for name in impls]
            if not (
                np.array_equal(outs[0][0], outs[1][0]) and outs[0][1] == outs[1][1]
            ):
                mismatch += 1
        print("\nbit-parity check over 200 random instances: %s"
              % ("OK" if mismatch == 0 else "%d mismatches" % mismatch))


if __name__ == "__main__":
    main()
