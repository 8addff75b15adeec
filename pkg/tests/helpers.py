"""Small named graphs and independent reference computations for the tests."""
from __future__ import annotations

import itertools

import numpy as np

from mqo.graph import Graph


def complete(n: int) -> Graph:
    return Graph.from_edges(n, list(itertools.combinations(range(n), 2)))


def cycle(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def path(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def star(leaves: int) -> Graph:
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def petersen() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph.from_edges(10, outer + spokes + inner)


def edgeless(n: int) -> Graph:
    return Graph.from_edges(n, np.zeros((0, 2), dtype=np.int64))


def dense(g: Graph) -> np.ndarray:
    """Dense adjacency assembled from neighbor lists, one entry at a time."""
    a = np.zeros((g.n, g.n))
    for v in range(g.n):
        for u in g.neighbors(v):
            a[v, u] = 1.0
    return a


def brute_alpha(g: Graph) -> int:
    """Independence number by enumerating every subset."""
    edges = [tuple(e) for e in g.edges]
    best = 0
    for code in range(1 << g.n):
        if all(not ((code >> u) & 1 and (code >> v) & 1) for u, v in edges):
            best = max(best, bin(code).count("1"))
    return best


def brute_maxcut(g: Graph) -> int:
    edges = [tuple(e) for e in g.edges]
    return max(sum(((code >> u) ^ (code >> v)) & 1 for u, v in edges) for code in range(1 << g.n))


def all_maximal_independent_sets(g: Graph) -> list[np.ndarray]:
    nbrs = [set(int(u) for u in g.neighbors(v)) for v in range(g.n)]
    out = []
    for code in range(1 << g.n):
        chosen = {v for v in range(g.n) if (code >> v) & 1}
        if any(nbrs[v] & chosen for v in chosen):
            continue
        if all(nbrs[v] & chosen for v in range(g.n) if v not in chosen):
            out.append(np.array([(code >> v) & 1 for v in range(g.n)], dtype=bool))
    return out


def cut_of(g: Graph, side) -> int:
    side = np.asarray(side, dtype=bool)
    return sum(int(side[u] != side[v]) for u, v in g.edges)
