"""Discrete local search: (1,2)-swap for MIS, 1-flip/2-flip for MaxCut.

Also exposes repairability detectors that return a concrete improving move
(or ``None``); the test-suite and the verification CLI use them as oracles.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .graph import Graph
from .objectives import Problem, Solution, _as_mask, is_independent

__all__ = [
    "RepairKind",
    "TightnessTable",
    "GainTable",
    "greedy_maximalize",
    "repair_independent",
    "one_two_swap",
    "one_flip_pass",
    "two_flip_pass",
    "one_two_flip",
    "detect_repairable",
]


class RepairKind(str, enum.Enum):
    ONE_TWO_SWAP = "one_two_swap"
    ONE_FLIP = "one_flip"
    TWO_FLIP = "two_flip"


class TightnessTable:
    """Selected-neighbor counts ``m_v = |N(v) & I|`` kept in sync with a vertex mask."""

    def __init__(self, g: Graph, mask: np.ndarray):
        self.g = g
        self.mask = np.array(mask, dtype=bool)
        self.count = np.rint(g.adjacency @ self.mask.astype(np.float64)).astype(np.int64)

    def add(self, v: int) -> None:
        self.mask[v] = True
        self.count[self.g.neighbors(v)] += 1

    def remove(self, v: int) -> None:
        self.mask[v] = False
        self.count[self.g.neighbors(v)] -= 1

    def free_among(self, vertices: np.ndarray) -> np.ndarray:
        return vertices[(self.count[vertices] == 0) & ~self.mask[vertices]]


class GainTable:
    """1-flip gains for a +/-1 assignment, updated incrementally.

    ``gain[v] = x_v (A x)_v`` = (same-side neighbors) - (cross neighbors), i.e.
    the change in cut value if ``v`` switches sides.
    """

    def __init__(self, g: Graph, side: np.ndarray):
        self.g = g
        self.x = np.where(np.asarray(side, dtype=bool), 1, -1).astype(np.int64)
        self.ax = np.rint(g.adjacency @ self.x.astype(np.float64)).astype(np.int64)
        self.gain = self.x * self.ax

    def flip(self, v: int) -> None:
        nb = self.g.neighbors(v)
        self.x[v] = -self.x[v]
        self.ax[nb] += 2 * self.x[v]
        self.gain[nb] = self.x[nb] * self.ax[nb]
        self.gain[v] = -self.gain[v]

    def pair_gain(self, u: int, v: int) -> int:
        """Cut change for jointly flipping adjacent opposite-side ``u`` and ``v``."""
        return int(self.gain[u] + self.gain[v] + 2)

    @property
    def side(self) -> np.ndarray:
        return self.x > 0


# ---------------------------------------------------------------------------
# MIS

def greedy_maximalize(g: Graph, members) -> np.ndarray:
    """Add free vertices in ascending (degree, index) order until maximal.

    ``members`` must be independent; returns a new boolean mask.
    """
    table = TightnessTable(g, _as_mask(g.n, members))
    _fill(table, np.arange(g.n))
    return table.mask


def _fill(table: TightnessTable, candidates: np.ndarray) -> int:
    free = table.free_among(candidates)
    if free.size == 0:
        return 0
    deg = table.g.degrees[free]
    added = 0
    for f in free[np.lexsort((free, deg))]:
        if table.count[f] == 0 and not table.mask[f]:
            table.add(f)
            added += 1
    return added


def repair_independent(g: Graph, members) -> np.ndarray:
    """Turn an arbitrary vertex mask into a maximal independent set.

    Conflicting vertices are dropped highest-degree first, then the set is
    greedily maximalized.
    """
    mask = _as_mask(g.n, members)
    table = TightnessTable(g, mask)
    conflicted = np.flatnonzero(table.mask & (table.count > 0))
    for v in conflicted[np.lexsort((conflicted, -g.degrees[conflicted]))]:
        if table.mask[v] and table.count[v] > 0:
            table.remove(v)
    _fill(table, np.arange(g.n))
    return table.mask


def _swap_witness(g: Graph, table: TightnessTable, v: int):
    nb = g.neighbors(v)
    cand = nb[(table.count[nb] == 1) & ~table.mask[nb]]
    if cand.size < 2:
        return None
    for i, u in enumerate(cand[:-1]):
        rest = cand[i + 1:]
        ok = ~np.isin(rest, g.neighbors(u), assume_unique=True)
        if ok.any():
            return int(u), int(rest[np.argmax(ok)])
    return None


def one_two_swap(g: Graph, solution) -> Solution:
    """Iterated (1,2)-swap local search on a maximal independent set.

    Each move removes a selected ``v`` and inserts two non-adjacent neighbors
    whose only selected neighbor is ``v``; vertices freed by the removal are
    then added greedily. Runs until no swap applies, so the result is maximal
    and (1,2)-swap irreparable.
    """
    mask = _as_mask(g.n, solution.mask if isinstance(solution, Solution) else solution)
    if not is_independent(g, mask):
        raise ValueError("one_two_swap needs an independent set")
    table = TightnessTable(g, mask)
    if np.any(~table.mask & (table.count == 0)):
        raise ValueError("one_two_swap needs a maximal independent set")

    bound = g.n
    moves = 0
    improved = True
    while improved:
        improved = False
        for v in np.flatnonzero(table.mask):
            if not table.mask[v]:
                continue
            pair = _swap_witness(g, table, v)
            if pair is None:
                continue
            u, w = pair
            table.remove(v)
            table.add(u)
            table.add(w)
            _fill(table, g.neighbors(v))
            moves += 1
            improved = True
            if moves > bound:
                raise RuntimeError("(1,2)-swap exceeded its move bound")
    return Solution.independent_set(g, table.mask)


# ---------------------------------------------------------------------------
# MaxCut

def _side_of(g: Graph, partition) -> np.ndarray:
    if isinstance(partition, Solution):
        return partition.mask
    a = np.asarray(partition)
    if a.dtype != bool and a.shape == (g.n,) and np.all(np.abs(a) == 1):
        return a > 0
    return _as_mask(g.n, a)


def _one_flip(table: GainTable) -> int:
    flips = 0
    while True:
        cand = np.flatnonzero(table.gain > 0)
        if cand.size == 0:
            return flips
        for v in cand:
            if table.gain[v] > 0:
                table.flip(v)
                flips += 1


def _two_flip(table: GainTable, edges: np.ndarray) -> int:
    moves = 0
    if edges.size == 0:
        return 0
    u_all, v_all = edges[:, 0], edges[:, 1]
    while True:
        x, gain = table.x, table.gain
        cand = np.flatnonzero((x[u_all] != x[v_all]) & (gain[u_all] + gain[v_all] + 2 > 0))
        if cand.size == 0:
            return moves
        for e in cand:
            u, v = u_all[e], v_all[e]
            if table.x[u] != table.x[v] and table.pair_gain(u, v) > 0:
                table.flip(u)
                table.flip(v)
                moves += 1


def one_flip_pass(g: Graph, partition) -> Solution:
    """Flip vertices with positive gain (lowest index first) until none remains."""
    table = GainTable(g, _side_of(g, partition))
    _one_flip(table)
    return Solution.cut(g, table.side)


def two_flip_pass(g: Graph, partition) -> Solution:
    """Swap adjacent opposite-side pairs while the joint move raises the cut.

    The joint gain is ``gain[u] + gain[v] + 2``: after ``u`` moves, the shared
    edge turns from cut to uncut, which shifts ``v``'s own gain by +2.
    """
    table = GainTable(g, _side_of(g, partition))
    _two_flip(table, g.edges)
    return Solution.cut(g, table.side)


def one_two_flip(g: Graph, partition) -> Solution:
    """Alternate 1-flip and 2-flip passes until a full round changes nothing."""
    table = GainTable(g, _side_of(g, partition))
    edges = g.edges
    bound = g.m + 1
    rounds = 0
    while True:
        moved = _one_flip(table) + _two_flip(table, edges)
        rounds += 1
        if not moved:
            break
        if rounds > bound:
            raise RuntimeError("1/2-flip search exceeded its round bound")
    return Solution.cut(g, table.side)


# ---------------------------------------------------------------------------
# detectors

@dataclass(frozen=True)
class Witness:
    kind: RepairKind
    vertices: tuple[int, ...]
    gain: int


def detect_repairable(g: Graph, solution, kind: RepairKind | str) -> Witness | None:
    """Return the lexicographically first improving move of ``kind``, if any.

    ``solution`` is a :class:`Solution` or a mask. For MaxCut, a +/-1 vector
    is also accepted.
    """
    kind = RepairKind(kind)
    if isinstance(solution, Solution):
        expected = Problem.MIS if kind is RepairKind.ONE_TWO_SWAP else Problem.MAXCUT
        if solution.problem is not expected:
            raise ValueError(f"{kind.value} applies to {expected.value} solutions")
    if kind is RepairKind.ONE_TWO_SWAP:
        mask = _as_mask(g.n, solution.mask if isinstance(solution, Solution) else solution)
        if not is_independent(g, mask):
            raise ValueError("(1,2)-swap detection needs an independent set")
        for v in np.flatnonzero(mask):
            outside = [u for u in g.neighbors(v) if not mask[u]]
            for i, u in enumerate(outside):
                for w in outside[i + 1:]:
                    if g.has_edge(u, w):
                        continue
                    trial = mask.copy()
                    trial[v] = False
                    trial[u] = trial[w] = True
                    if is_independent(g, trial):
                        return Witness(kind, (int(v), int(u), int(w)), 1)
        return None

    table = GainTable(g, _side_of(g, solution))
    if kind is RepairKind.ONE_FLIP:
        pos = np.flatnonzero(table.gain > 0)
        if pos.size == 0:
            return None
        v = int(pos[0])
        return Witness(kind, (v,), int(table.gain[v]))
    for u, v in g.edges:
        if table.x[u] != table.x[v]:
            gain = table.pair_gain(u, v)
            if gain > 0:
                return Witness(kind, (int(u), int(v)), gain)
    return None
