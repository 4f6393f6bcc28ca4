"""Benchmark: compiled vs pure-Python graph kernels.

Times d-separation reachability and ancestral closure over random DAGs of
increasing size, calling both backends on identical inputs.

    python3 benchmarks/bench_kernels.py
"""
from __future__ import annotations

import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from causalpipe.graph import CausalGraph  # noqa: E402
from causalpipe.kernels import _pykern  # noqa: E402

try:
    from causalpipe.kernels import _ckern
except ImportError:
    _ckern = None


def random_graph(rng, n, edge_prob):
    names = [f"v{i}" for i in range(n)]
    order = rng.permutation(n)
    edges = [
        (names[order[i]], names[order[j]])
        for i in range(n) for j in range(i + 1, n)
        if rng.random() < edge_prob
    ]
    return CausalGraph(names, edges)


def bench(impl, graphs_and_queries, reps=1):
    t0 = time.perf_counter()
    total = 0
    for _ in range(reps):
        for n_aug, par, chi, x_mask, z_mask in graphs_and_queries:
            impl.dsep_reachable(n_aug, par[0], par[1], chi[0], chi[1],
                                x_mask, z_mask)
            impl.ancestor_mask(n_aug, par[0], par[1], z_mask)
            total += 2
    return time.perf_counter() - t0, total


def main():
    rng = np.random.default_rng(0)
    print(f"{'nodes':>6} {'queries':>8} {'python (s)':>12} {'cython (s)':>12} "
          f"{'speedup':>8}")
    for n, q_per_graph, n_graphs in [(8, 40, 50), (26, 40, 20),
                                     (64, 30, 10), (160, 20, 5)]:
        work = []
        for _ in range(n_graphs):
            g = random_graph(rng, n, min(0.3, 8.0 / n))
            n_aug, par, chi = g._adjacency()
            for _ in range(q_per_graph):
                x, y = rng.choice(g.names, size=2, replace=False)
                x_mask = np.zeros(n_aug, dtype=np.uint8)
                x_mask[g.index(x)] = 1
                z_mask = np.zeros(n_aug, dtype=np.uint8)
                for v in g.names:
                    if v not in (x, y) and rng.random() < 0.2:
                        z_mask[g.index(v)] = 1
                work.append((n_aug, par, chi, x_mask, z_mask))
        t_py, n_ops = bench(_pykern, work)
        if _ckern is not None:
            t_cy, _ = bench(_ckern, work)
            print(f"{n:>6} {n_ops:>8} {t_py:>12.4f} {t_cy:>12.4f} "
                  f"{t_py / t_cy:>7.1f}x")
        else:
            print(f"{n:>6} {n_ops:>8} {t_py:>12.4f} {'n/a':>12} {'n/a':>8}")


if __name__ == "__main__":
    main()
