#!/usr/bin/env python3
"""Compare the numba and numpy kernel backends on a realistic workload.

The workload is the completed rule set of an infinite-emitter graph plus the
BFS relation matrices, applied to every element of bounded degree, which is
exactly what the acceptance suite hammers on.

Run:  python3 benchmarks/bench_kernels.py [--degree 5] [--repeat 5]
"""

import argparse
import time

import numpy as np

from graphmonoid import kernels
from graphmonoid.engine import completed_system, elements_up_to_degree, _vec
from graphmonoid.graphs import EdgeIndexDescriptor, Graph
from graphmonoid.presentation import presentation_of


def workload(materialized=3, degree=5):
    edges = [(f"e{i}", "v", "w") for i in range(materialized)]
    desc = EdgeIndexDescriptor((), ("w",))
    g = Graph.build(
        ["u", "v", "w"],
        edges + [("r", "u", "w")],
        {"v": (desc, [f"e{i}" for i in range(materialized)])},
    )
    p = presentation_of(g)
    rs = completed_system(p)
    index = p.index()
    rel_lhs = kernels.as_matrix([_vec(a, index) for a, _ in p.relations], len(index))
    rel_rhs = kernels.as_matrix([_vec(b, index) for _, b in p.relations], len(index))
    xs = elements_up_to_degree(len(p.alphabet), degree)
    return rs, rel_lhs, rel_rhs, xs


def timeit(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--degree", type=int, default=5)
    parser.add_argument("--materialized", type=int, default=3)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    rs, rel_lhs, rel_rhs, xs = workload(args.materialized, args.degree)
    print(f"alphabet={rs.lhs.shape[1]} rules={rs.rule_count} "
          f"relations={rel_lhs.shape[0]} elements={xs.shape[0]}")
    print(f"available backends: {', '.join(kernels.IMPLEMENTATIONS)} (active: {kernels.BACKEND})")

    results = {}
    for name, impl in kernels.IMPLEMENTATIONS.items():
        impl["nf_batch"](xs[:4].copy(), rs.lhs, rs.rhs)  # warm up / compile
        impl["expand"](xs[:4], rel_lhs, rel_rhs)
        nf = timeit(lambda: impl["nf_batch"](xs.copy(), rs.lhs, rs.rhs), args.repeat)
        ex = timeit(lambda: impl["expand"](xs, rel_lhs, rel_rhs), args.repeat)
        results[name] = (nf, ex)
        print(f"{name:>6}: nf_batch {nf * 1e3:8.2f} ms   expand {ex * 1e3:8.2f} ms")

    if len(results) == 2:
        np_nf, np_ex = results["numpy"]
        nb_nf, nb_ex = results["numba"]
        print(f"speedup: nf_batch {np_nf / nb_nf:5.1f}x   expand {np_ex / nb_ex:5.1f}x")
        a = kernels.IMPLEMENTATIONS["numpy"]["nf_batch"](xs.copy(), rs.lhs, rs.rhs)
        b = kernels.IMPLEMENTATIONS["numba"]["nf_batch"](xs.copy(), rs.lhs, rs.rhs)
        print("backends agree:", bool(np.array_equal(a, b)))


if __name__ == "__main__":
    main()
