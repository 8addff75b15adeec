"""Naive exact oracles for small instances.

Nothing here calls into the solver path: adjacency is rebuilt as a dense
matrix from the edge list and every quantity is recomputed from scratch.
All entry points are guarded by instance-size limits.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph
from .objectives import ObjectiveSpec

__all__ = [
    "InstanceTooLarge",
    "ExactResult",
    "FixedPointRecord",
    "exact_mis",
    "exact_maxcut",
    "enumerate_fixed_points",
    "dense_reference",
    "dense_adjacency",
    "naive_cut",
    "naive_flip_gains",
    "naive_pair_gains",
    "MAX_MIS_N",
    "MAX_MAXCUT_N",
    "MAX_ENUM_N",
    "MAX_DENSE_N",
]

MAX_MIS_N = 26
MAX_MAXCUT_N = 24
MAX_ENUM_N = 16
MAX_DENSE_N = 256


class InstanceTooLarge(ValueError):
    pass


def _guard(g: Graph, limit: int, what: str) -> None:
    if g.n > limit:
        raise InstanceTooLarge(f"{what} is limited to n <= {limit}, got n={g.n}")


@dataclass(frozen=True)
class ExactResult:
    score: int
    solution: np.ndarray
    count: int | None
    fingerprint: str


@dataclass(frozen=True)
class FixedPointRecord:
    state: np.ndarray
    fixed: bool


def dense_adjacency(g: Graph) -> np.ndarray:
    a = np.zeros((g.n, g.n))
    for u, v in g.edges:
        a[u, v] = a[v, u] = 1.0
    return a


def naive_cut(g: Graph, side) -> int:
    side = np.asarray(side, dtype=bool)
    return sum(int(side[u] != side[v]) for u, v in g.edges)


def naive_flip_gains(g: Graph, side) -> np.ndarray:
    """Cut change of every single-vertex move, each recomputed from scratch."""
    side = np.array(side, dtype=bool)
    base = naive_cut(g, side)
    gains = np.empty(g.n, dtype=np.int64)
    for v in range(g.n):
        side[v] = not side[v]
        gains[v] = naive_cut(g, side) - base
        side[v] = not side[v]
    return gains


def naive_pair_gains(g: Graph, side) -> dict[tuple[int, int], int]:
    """Cut change of jointly moving each adjacent opposite-side pair, recomputed from scratch."""
    side = np.array(side, dtype=bool)
    base = naive_cut(g, side)
    out = {}
    for u, v in g.edges:
        if side[u] == side[v]:
            continue
        side[u], side[v] = side[v], side[u]
        out[(int(u), int(v))] = naive_cut(g, side) - base
        side[u], side[v] = side[v], side[u]
    return out


def exact_mis(g: Graph) -> ExactResult:
    """Maximum independent set by branch and bound over bitmasks.

    Branches on a maximum-degree vertex of the remaining candidates; a branch is
    pruned when its size plus the candidate count cannot beat the incumbent.
    """
    _guard(g, MAX_MIS_N, "exact_mis")
    n = g.n
    closed = [(1 << v) | sum(1 << int(u) for u in g.neighbors(v)) for v in range(n)]
    best = [0, 0]  # size, mask

    def search(cand: int, chosen: int, size: int) -> None:
        if cand == 0:
            if size > best[0]:
                best[0], best[1] = size, chosen
            return
        if size + bin(cand).count("1") <= best[0]:
            return
        # pick the candidate with the most candidate neighbours
        v, deg = -1, -1
        c = cand
        while c:
            low = c & -c
            u = low.bit_length() - 1
            d = bin(closed[u] & cand).count("1")
            if d > deg:
                v, deg = u, d
            c ^= low
        if deg == 1:  # no edges left among candidates: take them all
            search(0, chosen | cand, size + bin(cand).count("1"))
            return
        search(cand & ~closed[v], chosen | (1 << v), size + 1)
        search(cand & ~(1 << v), chosen, size)

    search((1 << n) - 1, 0, 0)
    mask = np.array([(best[1] >> v) & 1 for v in range(n)], dtype=bool)
    return ExactResult(best[0], mask, None, g.fingerprint)


def _bit_rows(codes: np.ndarray, n: int) -> np.ndarray:
    return ((codes[:, None] >> np.arange(n)) & 1).astype(bool)


def exact_maxcut(g: Graph, chunk: int = 1 << 15) -> ExactResult:
    """Maximum cut by scanning all 2^(n-1) partitions (vertex n-1 fixed on one side)."""
    _guard(g, MAX_MAXCUT_N, "exact_maxcut")
    n = g.n
    if n <= 1 or g.m == 0:
        return ExactResult(0, np.zeros(n, dtype=bool), 2 ** max(n - 1, 0), g.fingerprint)
    e = g.edges
    total = 1 << (n - 1)
    best, best_code, count = -1, 0, 0
    for start in range(0, total, chunk):
        codes = np.arange(start, min(start + chunk, total), dtype=np.int64)
        bits = _bit_rows(codes, n)
        cuts = np.count_nonzero(bits[:, e[:, 0]] != bits[:, e[:, 1]], axis=1)
        top = int(cuts.max())
        if top > best:
            best, best_code, count = top, int(codes[np.argmax(cuts)]), 0
        if top == best:
            count += int(np.count_nonzero(cuts == top))
    mask = _bit_rows(np.array([best_code]), n)[0]
    return ExactResult(best, mask, count, g.fingerprint)


def _dense_grad(spec: ObjectiveSpec, a: np.ndarray, x: np.ndarray) -> np.ndarray:
    # works row-wise on a stack of states
    ax = x @ a
    k = spec.kind
    if k == "mis_qubo":
        return 1.0 - spec.gamma * ax
    lap = x * a.sum(axis=1) - ax
    if k == "laplacian":
        return 0.5 * lap
    if k == "perturbed_laplacian":
        return 2.0 * (lap + spec.lam * x)
    if k == "adjacency":
        return -2.0 * ax
    return -2.0 * ax - spec.lam


def dense_reference(spec: ObjectiveSpec, g: Graph, x) -> tuple[float, np.ndarray]:
    """Value and gradient from explicitly materialized dense ``A``, ``D`` and ``L``."""
    _guard(g, MAX_DENSE_N, "dense_reference")
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (g.n,):
        raise ValueError(f"state has shape {x.shape}, graph has n={g.n}")
    a = dense_adjacency(g)
    d = np.diag(a.sum(axis=1))
    lap = d - a
    k = spec.kind
    if k == "mis_qubo":
        val = x.sum() - 0.5 * spec.gamma * x @ a @ x
        grad = np.ones(g.n) - spec.gamma * a @ x
    elif k == "laplacian":
        val = 0.25 * x @ lap @ x
        grad = 0.5 * lap @ x
    elif k == "perturbed_laplacian":
        q = lap + spec.lam * np.eye(g.n)
        val = x @ q @ x
        grad = 2.0 * q @ x
    elif k == "adjacency":
        val = -(x @ a @ x)
        grad = -2.0 * a @ x
    else:
        val = -spec.lam * x.sum() - x @ a @ x
        grad = -2.0 * a @ x - spec.lam * np.ones(g.n)
    return float(val), grad


def enumerate_fixed_points(spec: ObjectiveSpec, g: Graph) -> list[FixedPointRecord]:
    """Classify every binary state of the objective's box as PGA-fixed or not.

    A binary state is fixed iff each gradient coordinate points out of the box
    (or is zero): ``grad_i >= 0`` at the upper face, ``grad_i <= 0`` at the lower.
    States are listed in increasing bit-code order, bit ``v`` set meaning
    ``x_v`` at the upper face.
    """
    _guard(g, MAX_ENUM_N, "enumerate_fixed_points")
    n = g.n
    a = dense_adjacency(g)
    bits = _bit_rows(np.arange(1 << n, dtype=np.int64), n)
    lo = 0.0 if spec.kind == "mis_qubo" else -1.0
    states = np.where(bits, 1.0, lo)
    grad = _dense_grad(spec, a, states)
    fixed = np.all(np.where(bits, grad >= 0, grad <= 0), axis=1)
    return [FixedPointRecord(states[i], bool(fixed[i])) for i in range(states.shape[0])]
