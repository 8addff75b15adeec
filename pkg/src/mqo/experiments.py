"""Landscape experiments on the MaxCut formulations, shared by the CLI and the test-suite.

Each runs plain trajectories (no resets, no local search) from a controlled
starting point and reports the cut before and after.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph, GraphGenSpec, generate
from .objectives import ObjectiveSpec, Problem, cut_value
from .oracle import naive_flip_gains
from .pga import OptimizerConfig, run_trajectory
from .solver import init_state

__all__ = [
    "EscapeRecord",
    "FORMULATIONS",
    "er_batch",
    "formulation",
    "escape_interior",
    "escape_repairable",
    "repairable_start",
    "compare_formulations",
]

FORMULATIONS = ("laplacian", "perturbed_laplacian", "adjacency", "perturbed_bias")


@dataclass(frozen=True)
class EscapeRecord:
    objective: str
    graph: int
    init_cut: int
    final_cut: int
    iterations: int
    reason: str

    @property
    def increase(self) -> int:
        return self.final_cut - self.init_cut


def er_batch(count: int, n: int, p: float, seed: int) -> list[Graph]:
    return [generate(GraphGenSpec("er", n, p=p, seed=seed + i)) for i in range(count)]


def formulation(kind: str, lam: float = 0.001) -> ObjectiveSpec:
    if kind in ("perturbed_laplacian", "perturbed_bias"):
        return ObjectiveSpec(kind, lam=lam)
    return ObjectiveSpec(kind)


def _run(kind: str, g: Graph, x0: np.ndarray, cfg: OptimizerConfig, lam: float, gi: int) -> EscapeRecord:
    out = run_trajectory(formulation(kind, lam), g, x0, cfg)
    return EscapeRecord(kind, gi, cut_value(g, x0 > 0), cut_value(g, out.x > 0), out.iterations, out.reason.value)


def escape_interior(graphs: list[Graph], rng: np.random.Generator,
                    kinds=("laplacian", "perturbed_laplacian", "perturbed_bias"),
                    alpha: float = 0.1, lam: float = 0.001, max_iters: int = 5000) -> list[EscapeRecord]:
    """Start every formulation from the same constant vector ``c * 1``, ``c ~ U(-1, 1)`` per graph."""
    cfg = OptimizerConfig(alpha=alpha, max_iters=max_iters)
    out = []
    for gi, g in enumerate(graphs):
        x0 = np.full(g.n, rng.uniform(-1.0, 1.0))
        out.extend(_run(k, g, x0, cfg, lam, gi) for k in kinds)
    return out


def repairable_start(g: Graph, rng: np.random.Generator, max_draws: int = 1000) -> np.ndarray:
    """Uniform +/-1 vector that the naive oracle confirms is 1-flip repairable."""
    for _ in range(max_draws):
        x = rng.choice([-1.0, 1.0], size=g.n)
        if np.any(naive_flip_gains(g, x > 0) > 0):
            return x
    raise RuntimeError("no 1-flip repairable state found")


def escape_repairable(graphs: list[Graph], rng: np.random.Generator,
                      kinds=("laplacian", "perturbed_laplacian", "perturbed_bias"),
                      alpha: float = 0.1, lam: float = 0.001, max_iters: int = 5000) -> list[EscapeRecord]:
    """Start every formulation from the same 1-flip repairable binary state per graph."""
    cfg = OptimizerConfig(alpha=alpha, max_iters=max_iters)
    out = []
    for gi, g in enumerate(graphs):
        x0 = repairable_start(g, rng)
        out.extend(_run(k, g, x0, cfg, lam, gi) for k in kinds)
    return out


def compare_formulations(graphs: list[Graph], rng: np.random.Generator, kinds=FORMULATIONS,
                         alpha: float = 0.0025, beta: float = 0.8, sigma: float = 0.15,
                         lam: float = 0.001, max_iters: int = 5000) -> list[EscapeRecord]:
    """Run all formulations from one shared degree-based noisy start per graph."""
    cfg = OptimizerConfig(alpha=alpha, beta=beta, max_iters=max_iters)
    out = []
    for gi, g in enumerate(graphs):
        x0 = init_state(Problem.MAXCUT, g, sigma, rng).x
        out.extend(_run(k, g, x0, cfg, lam, gi) for k in kinds)
    return out
