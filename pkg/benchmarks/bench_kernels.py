"""Wall-clock comparison of the numba kernels against the numpy fallback.

Both builds run in one process: the selected entry points (numba-compiled
unless QTLAB_KERNELS=numpy or numba is missing) and the _numpy variants,
on identical inputs.  First calls are warmed up so JIT compilation is not
billed to the timings.

Usage: python3 benchmarks/bench_kernels.py [--repeats 5]
"""

import argparse
import random
import time

import numpy as np

from qtlab import _kernels
from qtlab.constructions import grid_graph
from qtlab.metric_graph import MetricGraph, _permuted_csr


def random_connected(rng, n, extra):
    edges = set()
    for i in range(1, n):
        edges.add((str(rng.randrange(i)), str(i)))
    added = 0
    while added < extra:
        a, b = rng.randrange(n), rng.randrange(n)
        if a == b:
            continue
        e = (str(min(a, b)), str(max(a, b)))
        if e not in edges:
            edges.add(e)
            added += 1
    return MetricGraph([str(i) for i in range(n)], sorted(edges))


def prepared(g):
    order = g.id_order()
    Dp = np.ascontiguousarray(g.dist[np.ix_(order, order)])
    indptr, indices = _permuted_csr(g, order)
    return Dp, indptr, indices


def best_of(repeats, fn, *args):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def run_bottleneck(kernel, Dp, indptr, indices):
    n = Dp.shape[0]
    diam = int(Dp.max())
    best = 0
    for z in range(n):
        ecc = int(Dp[z].max())
        t, _, _ = kernel(Dp, indptr, indices, z, best, min(ecc - 1, diam // 2))
        best = max(best, int(t))
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    rng = random.Random(2024)
    cases = []
    for n in (40, 60, 80):
        g = random_connected(rng, n, n // 2)
        cases.append((f"delta random n={n}", "delta", prepared(g)))
    for label, g in [("bottleneck grid 8x8", grid_graph(8, 8)),
                     ("bottleneck grid 10x6", grid_graph(10, 6)),
                     ("bottleneck ladder 30x2", grid_graph(30, 2))]:
        cases.append((label, "bneck", prepared(g)))

    fast = {"delta": _kernels.delta_scan,
            "apsp": _kernels.apsp,
            "bneck": _kernels.bottleneck_center}
    slow = {"delta": _kernels.delta_scan_numpy,
            "apsp": _kernels.apsp_numpy,
            "bneck": _kernels.bottleneck_center_numpy}

    # apsp cases reuse the largest graph's CSR
    Dp, indptr, indices = cases[2][2]
    cases.append(("apsp random n=80", "apsp", (Dp, indptr, indices)))

    print(f"selected backend: {_kernels.backend()}  (repeats={args.repeats}, best shown)")
    header = f"{'case':26} {'selected':>10} {'numpy':>10} {'ratio':>7}"
    print(header)
    print("-" * len(header))
    for label, kind, (Dp, indptr, indices) in cases:
        if kind == "delta":
            f_args = (Dp,)
            s_args = (Dp,)
            runner_f = lambda D: fast["delta"](D)
            runner_s = lambda D: slow["delta"](D)
        elif kind == "apsp":
            f_args = (indptr, indices, Dp.shape[0])
            s_args = f_args
            runner_f = fast["apsp"]
            runner_s = slow["apsp"]
        else:
            f_args = (fast["bneck"], Dp, indptr, indices)
            s_args = (slow["bneck"], Dp, indptr, indices)
            runner_f = run_bottleneck
            runner_s = run_bottleneck
        runner_f(*f_args)  # warmup / JIT
        runner_s(*s_args)
        tf = best_of(args.repeats, runner_f, *f_args)
        ts = best_of(args.repeats, runner_s, *s_args)
        ratio = ts / tf if tf > 0 else float("inf")
        print(f"{label:26} {tf * 1e3:9.2f}ms {ts * 1e3:9.2f}ms {ratio:6.1f}x")


if __name__ == "__main__":
    main()
