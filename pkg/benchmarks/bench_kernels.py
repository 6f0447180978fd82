#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Both implementations live side by side in blendplan._kernels, so one
process can time them head to head. The end-to-end section times full
tree enumeration with whichever path is active (re-run with
BLENDPLAN_DISABLE_NUMBA=1 to compare that too).
"""

import argparse
import time

import numpy as np

from blendplan import DemandVector, StockVector, _kernels, enumerate_variants, plan, validate_recipes


def make_instances(rng, count, n, m):
    instances = []
    for _ in range(count):
        w = rng.uniform(0.05, 1.0, size=(n, m))
        w[rng.uniform(size=(n, m)) < 0.3] = 0.0
        for i in range(n):
            if not (w[i] > 0).any():
                w[i, rng.integers(m)] = 1.0
            w[i] /= w[i].sum()
        instances.append(
            (np.ascontiguousarray(w), rng.uniform(0.0, 30.0, m), rng.uniform(0.0, 30.0, n))
        )
    return instances


def bench_kernel(name, impls, instances, repeat):
    results = {}
    for label, kernels in impls.items():
        fn = kernels[name]
        args = _args_for(name, instances)
        fn(*args[0])  # warm (JIT compile / cache touch)
        start = time.perf_counter()
        for _ in range(repeat):
            for a in args:
                fn(*a)
        elapsed = time.perf_counter() - start
        results[label] = elapsed / (repeat * len(instances)) * 1e6
    return results


def _args_for(name, instances):
    if name == "requirements":
        return [(w, d) for w, _, d in instances]
    if name == "usage":
        return [(w,) for w, _, _ in instances]
    return [(w, s) for w, s, _ in instances]


def bench_enumeration(rng, count):
    total_variants = 0
    start = time.perf_counter()
    for _ in range(count):
        n, m = int(rng.integers(2, 5)), int(rng.integers(2, 7))
        w = rng.uniform(0.05, 1.0, size=(n, m))
        for i in range(n):
            w[i] /= w[i].sum()
        recipes = validate_recipes([f"P{i}" for i in range(n)], [f"C{j}" for j in range(m)], w)
        stock = StockVector(rng.uniform(0.0, 50.0, m))
        outcome = plan(recipes, stock, DemandVector(np.zeros(n)))
        total_variants += len(enumerate_variants(outcome.tree))
    return time.perf_counter() - start, total_variants


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=200, help="passes over the instance set per kernel")
    parser.add_argument("--instances", type=int, default=100)
    parser.add_argument("--enum-count", type=int, default=500)
    args = parser.parse_args()

    rng = np.random.default_rng(42)
    instances = make_instances(rng, args.instances, n=4, m=6)

    impls = {"numpy": _kernels.NUMPY_KERNELS}
    if _kernels.NUMBA_KERNELS is not None:
        impls["numba"] = _kernels.NUMBA_KERNELS
    else:
        print("numba unavailable or disabled; timing the numpy path only")

    print(f"{'kernel':<14}" + "".join(f"{label + ' µs/call':>16}" for label in impls) + f"{'speedup':>10}")
    for name in ("requirements", "usage", "caps", "expand"):
        timing = bench_kernel(name, impls, instances, args.repeat)
        row = f"{name:<14}" + "".join(f"{timing[label]:>16.2f}" for label in impls)
        if len(timing) == 2:
            row += f"{timing['numpy'] / timing['numba']:>9.1f}x"
        print(row)

    active = "numba" if _kernels.USING_NUMBA else "numpy"
    _kernels.warm_up()
    elapsed, variants = bench_enumeration(np.random.default_rng(7), args.enum_count)
    print(
        f"\nend-to-end: {args.enum_count} plans enumerated ({variants} variants) "
        f"in {elapsed:.3f}s using the {active} path"
    )
    if _kernels.USING_NUMBA:
        print("re-run with BLENDPLAN_DISABLE_NUMBA=1 to time the numpy path end to end")


if __name__ == "__main__":
    main()
