"""Benchmark the numba and numpy kernel backends against each other.

Runs each hot kernel at a few representative sizes plus one end-to-end
member-training macrobenchmark, and prints a timing table. The first numba
call per kernel pays JIT compilation; a warmup run keeps that out of the
numbers.

Usage: python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import time

import numpy as np

from vpcme._kernels import available_backends, backend_impls
from vpcme.dataset import synthetic_dataset
from vpcme.ensemble import VpcmeConfig, train_vpcme


def time_call(fn, repeat):
    fn()  # warmup; also triggers JIT compilation on the numba path
    best = np.inf
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def kernel_cases(rng):
    cases = []
    for k in (16, 64, 128):
        base = rng.normal(size=(k, k))
        sym = (base + base.T) / 2.0
        cases.append((f"jacobi_eigh k={k}", "jacobi_eigh", (sym,)))
    for n, d in ((500, 10), (2000, 25)):
        points = rng.normal(size=(n, d))
        cases.append((f"knn_self n={n} d={d}", "knn_exclude_self", (points, 10)))
        queries = rng.normal(size=(max(1, n // 5), d))
        cases.append((f"knn_query n={n} d={d}", "knn_query", (points, queries, 10)))
    n = 2000
    labels = (rng.random((n, 14)) < 0.3).astype(np.uint8)
    sizes = labels.sum(axis=1).astype(np.int64)
    weights = np.full(n, 1.0 / n)
    uniforms = rng.random(2 * 50 * (2 * n))
    cases.append(
        (
            f"route_pairs n={n}",
            "route_pairs",
            (np.cumsum(weights), uniforms, labels, sizes, 0.6, n, n),
        )
    )
    return cases


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    backends = available_backends()
    rng = np.random.Generator(np.random.PCG64(0))
    cases = kernel_cases(rng)

    width = max(len(name) for name, _, _ in cases) + 2
    header = "kernel".ljust(width) + "".join(b.rjust(14) for b in backends)
    if len(backends) > 1:
        header += "speedup".rjust(12)
    print(header)
    print("-" * len(header))
    for name, kernel, call_args in cases:
        timings = []
        for backend in backends:
            impl = backend_impls(backend)[kernel]
            timings.append(time_call(lambda: impl(*call_args), args.repeat))
        row = name.ljust(width) + "".join(f"{t * 1e3:10.2f} ms" for t in timings)
        if len(timings) > 1:
            row += f"{timings[1] / timings[0]:11.1f}x"
        print(row)

    # macro benchmark: full ensemble member pipelines per backend; the
    # library resolves kernels through module attributes, so swapping them
    # in place reroutes the whole training path
    print()
    ds = synthetic_dataset(500, 12, 4, seed=1, label_noise=0.1)
    cfg = VpcmeConfig(ensemble_size=3, theta=0.6, k_neighbors=10, seed=0)
    from vpcme import _kernels

    macro = []
    for backend in backends:
        impls = backend_impls(backend)
        saved = {k: getattr(_kernels, k) for k in impls}
        for k, fn in impls.items():
            setattr(_kernels, k, fn)
        try:
            macro.append(time_call(lambda: train_vpcme(ds, cfg), max(1, args.repeat // 2)))
        finally:
            for k, fn in saved.items():
                setattr(_kernels, k, fn)
    row = "train 3 members n=500".ljust(width) + "".join(f"{t * 1e3:10.2f} ms" for t in macro)
    if len(macro) > 1:
        row += f"{macro[1] / macro[0]:11.1f}x"
    print(row)


if __name__ == "__main__":
    main()
