#!/usr/bin/env python3
"""Benchmark the spreading-activation kernels: numba @njit vs pure numpy.

Builds a random scale-free-ish graph, then times repeated two-sided
subgraph searches on both backends.  The numpy path is also what you get
with KGQA_NO_NUMBA=1.

Usage: python benchmarks/bench_activation.py [--nodes N] [--edges M]
       [--searches K] [--seed S]
"""

import argparse
import pathlib
import random
import statistics
import sys
import time

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from kgqa.activation import HAVE_NUMBA, subgraph_search
from kgqa.activation.engine import ActivationParams
from kgqa.kg import KnowledgeGraph


def build_graph(n_nodes, n_edges, seed):
    rng = random.Random(seed)
    kg = KnowledgeGraph()
    nodes = [f"n{i}" for i in range(n_nodes)]
    for node in nodes:
        kg.add_entity(node)
    added = 0
    while added < n_edges:
        # preferential attachment keeps a few hubs hot, like a real KG
        s = nodes[min(int(rng.expovariate(8) * n_nodes), n_nodes - 1)]
        t = rng.choice(nodes)
        if s != t and kg.add_edge(s, f"p{added % 17}", t,
                                  weight=rng.uniform(0.5, 0.99)):
            added += 1
    return kg, nodes


def bench(kg, nodes, backend, searches, seed):
    rng = random.Random(seed)
    params = ActivationParams()
    pairs = [(rng.choice(nodes), rng.choice(nodes)) for _ in range(searches)]
    # warm up (JIT compilation for the numba path)
    subgraph_search(kg, pairs[0][0], pairs[0][1], params, backend=backend)
    times = []
    for subj, obj in pairs:
        t0 = time.perf_counter()
        subgraph_search(kg, subj, obj, params, backend=backend)
        times.append(time.perf_counter() - t0)
    return times


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--nodes", type=int, default=40000)
    ap.add_argument("--edges", type=int, default=160000)
    ap.add_argument("--searches", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print(f"building graph: {args.nodes} nodes, {args.edges} edges ...")
    kg, nodes = build_graph(args.nodes, args.edges, args.seed)
    kg.freeze()

    backends = ["numpy"] + (["numba"] if HAVE_NUMBA else [])
    results = {}
    for backend in backends:
        times = bench(kg, nodes, backend, args.searches, args.seed + 1)
        results[backend] = times
        print(f"{backend:>6}: total {sum(times)*1e3:8.1f} ms   "
              f"median {statistics.median(times)*1e6:8.1f} us   "
              f"max {max(times)*1e3:6.2f} ms   ({args.searches} searches)")
    if len(results) == 2:
        speedup = sum(results["numpy"]) / sum(results["numba"])
        print(f"numba speedup over numpy: {speedup:.2f}x")


if __name__ == "__main__":
    main()
