"""Oracle-backed verification suites run by ``mqo verify``.

Each suite takes the parsed CLI namespace and yields :class:`Check` results.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .experiments import er_batch, escape_interior, escape_repairable
from .graph import Graph, GraphGenSpec, generate
from .localsearch import RepairKind, detect_repairable
from .objectives import ObjectiveSpec
from .oracle import enumerate_fixed_points, exact_maxcut, exact_mis, naive_flip_gains
from .pga import is_pga_fixed_point
from .presets import make_config
from .solver import solve

__all__ = ["Check", "SUITES", "random_small_graphs", "naive_maximal_independent"]


@dataclass(frozen=True)
class Check:
    name: str
    ok: bool
    detail: str


def random_small_graphs(count: int, n_lo: int, n_hi: int, rng: np.random.Generator) -> list[Graph]:
    out = []
    for _ in range(count):
        n = int(rng.integers(n_lo, n_hi + 1))
        p = float(rng.choice([0.3, 0.5]))
        out.append(generate(GraphGenSpec("er", n, p=p, seed=int(rng.integers(2**63)))))
    return out


def naive_maximal_independent(g: Graph, mask: np.ndarray) -> bool:
    nbrs = [set() for _ in range(g.n)]
    for u, v in g.edges:
        nbrs[u].add(int(v))
        nbrs[v].add(int(u))
    chosen = {v for v in range(g.n) if mask[v]}
    if any(nbrs[v] & chosen for v in chosen):
        return False
    return all(nbrs[v] & chosen for v in range(g.n) if v not in chosen)


def suite_fixed_points(args) -> Iterator[Check]:
    rng = np.random.default_rng(args.seed)
    graphs = random_small_graphs(args.instances, 4, min(args.max_n, 12), rng)

    bad = 0
    for g in graphs:
        for lam in (0.001, 0.1, 1.0):
            bad += sum(not r.fixed for r in enumerate_fixed_points(ObjectiveSpec.perturbed_laplacian(lam), g))
    yield Check("perturbed Laplacian: every binary state fixed", bad == 0, f"{bad} non-fixed")

    stall_a = stall_b = ties = mismatch = 0
    for g in graphs:
        recs_a = enumerate_fixed_points(ObjectiveSpec.adjacency(), g)
        recs_b = enumerate_fixed_points(ObjectiveSpec.perturbed_bias(0.001), g)
        for ra, rb in zip(recs_a, recs_b):
            repairable = bool(np.any(naive_flip_gains(g, ra.state > 0) > 0))
            stall_a += repairable and ra.fixed
            stall_b += repairable and rb.fixed
            # irreparable but still moving: a zero-gain vertex on the +1 side
            ties += not repairable and not rb.fixed
            mismatch += rb.fixed != is_pga_fixed_point(ObjectiveSpec.perturbed_bias(0.001), g, rb.state)
    yield Check("adjacency: 1-flip repairable states are not fixed", stall_a == 0, f"{stall_a} stalled")
    yield Check("perturbed bias: every fixed state is 1-flip irreparable", stall_b == 0,
                f"{stall_b} stalled, {ties} irreparable non-fixed ties")
    yield Check("perturbed bias: oracle and library fixed-point tests agree", mismatch == 0, f"{mismatch} disagree")

    wrong = repairable_mis = 0
    h = ObjectiveSpec.mis_qubo(2.0)
    for g in graphs:
        for r in enumerate_fixed_points(h, g):
            mask = r.state > 0.5
            maximal = naive_maximal_independent(g, mask)
            wrong += r.fixed != maximal
            if maximal:
                wrong += not is_pga_fixed_point(h, g, r.state, alpha=0.8)
                repairable_mis += detect_repairable(g, mask, RepairKind.ONE_TWO_SWAP) is not None
    yield Check("MIS QUBO: fixed binary states are exactly the maximal independent sets", wrong == 0,
                f"{wrong} mismatches, {repairable_mis} swap-repairable fixed points")


def suite_escapability(args) -> Iterator[Check]:
    rng = np.random.default_rng(args.seed)
    graphs = er_batch(args.graphs, args.n, args.p, args.seed)
    interior = escape_interior(graphs, rng)

    def cuts(recs, kind, attr="final_cut"):
        return np.array([getattr(r, attr) for r in recs if r.objective == kind])

    lap = cuts(interior, "laplacian")
    yield Check("interior start: Laplacian stays at cut 0", bool(np.all(lap == 0)), f"cuts {lap.tolist()}")
    for kind in ("perturbed_laplacian", "perturbed_bias"):
        c = cuts(interior, kind)
        yield Check(f"interior start: {kind} escapes", c.mean() >= 40, f"mean cut {c.mean():.1f}")

    rep = escape_repairable(graphs, rng)
    for kind in ("laplacian", "perturbed_laplacian"):
        stuck = bool(np.all(cuts(rep, kind) == cuts(rep, kind, "init_cut")))
        yield Check(f"repairable start: {kind} stays put", stuck, f"mean cut {cuts(rep, kind).mean():.1f}")
    gain = (cuts(rep, "perturbed_bias") - cuts(rep, "perturbed_bias", "init_cut")).mean()
    yield Check("repairable start: perturbed_bias improves", gain >= 4, f"mean increase {gain:.1f}")


def suite_exact(args) -> Iterator[Check]:
    rng = np.random.default_rng(args.seed)
    graphs = random_small_graphs(args.instances, 6, min(args.max_n, 20), rng)
    for problem, exact in (("mis", exact_mis), ("maxcut", exact_maxcut)):
        hits = over = 0
        for i, g in enumerate(graphs):
            cfg = make_config(problem, g.n, max(g.mean_degree, 1.0), time_budget=args.budget_secs,
                              seed=args.seed + i, max_outer_loops=10)
            got, opt = solve(g, cfg).score, exact(g).score
            hits += got == opt
            over += got > opt
        rate = hits / max(len(graphs), 1)
        yield Check(f"{problem}: solver matches exact optimum", rate >= 0.95 and over == 0,
                    f"{hits}/{len(graphs)} optimal, {over} above optimum")


SUITES = {
    "fixed-points": suite_fixed_points,
    "escapability": suite_escapability,
    "exact": suite_exact,
}
