"""Default hyperparameters for ER graphs, keyed by (problem, n, mean degree).

``lookup`` picks the row nearest in log-space to the requested instance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .objectives import ObjectiveSpec, Problem
from .pga import OptimizerConfig
from .solver import PoolConfig, SolverConfig

__all__ = ["Preset", "MIS_TABLE", "MAXCUT_TABLE", "MIS_MAX_ITERS", "MAXCUT_CONV_TOL", "lookup", "make_config"]

# MIS trajectories that have not reached a maximal set by now are usually caught
# in a synchronous limit cycle; cut them short and repair instead.
MIS_MAX_ITERS = 150
# Zero-gain vertices under the perturbed bias drift at a rate of about alpha * lam;
# a 1e-6 tolerance would wait for that drift, which never changes the cut.
MAXCUT_CONV_TOL = 1e-4


@dataclass(frozen=True)
class Preset:
    n: int
    d: float
    alpha: float
    momentum: float
    rho: float
    t_gs: int


MIS_TABLE = (
    Preset(1000, 100, 0.80, 0.30, 0.70, 60),
    Preset(1000, 300, 0.80, 0.45, 0.70, 60),
    Preset(1000, 500, 0.80, 0.45, 0.60, 60),
    Preset(3000, 100, 0.80, 0.30, 0.60, 60),
    Preset(3000, 300, 0.80, 0.45, 0.60, 60),
    Preset(3000, 1000, 0.80, 0.45, 0.50, 60),
    Preset(10000, 5000, 0.80, 0.75, 0.50, 60),
    Preset(20000, 10000, 0.80, 0.75, 0.50, 60),
    Preset(30000, 15000, 0.80, 0.75, 0.50, 60),
)

MAXCUT_TABLE = (
    Preset(100, 50, 0.0025, 0.9, 0.80, 90),
    Preset(1000, 100, 0.0025, 0.8, 0.80, 90),
    Preset(1000, 500, 0.0025, 0.8, 0.80, 90),
    Preset(1000, 800, 0.0025, 0.8, 0.80, 90),
    Preset(30000, 15000, 5e-5, 0.8, 0.80, 90),
    Preset(30000, 24000, 5e-5, 0.8, 0.80, 90),
    Preset(40000, 20000, 5e-5, 0.8, 0.80, 90),
    Preset(40000, 32000, 5e-5, 0.8, 0.80, 90),
)


def lookup(problem: Problem | str, n: int, mean_degree: float) -> Preset:
    table = MIS_TABLE if Problem(problem) is Problem.MIS else MAXCUT_TABLE
    ln, ld = math.log(max(n, 1)), math.log(max(mean_degree, 1e-9))
    return min(table, key=lambda p: (math.log(p.n) - ln) ** 2 + (math.log(p.d) - ld) ** 2)


def make_config(
    problem: Problem | str,
    n: int,
    mean_degree: float,
    *,
    objective: ObjectiveSpec | None = None,
    time_budget: float = 60.0,
    seed: int = 0,
    sigma: float = 0.15,
    local_search: bool = True,
    pool: PoolConfig | None = None,
    max_outer_loops: int | None = None,
    **overrides,
) -> SolverConfig:
    """Build a solver config from the nearest preset row.

    ``overrides`` may set ``alpha``, ``beta``, ``rho``, ``t_gs``, ``gamma``,
    ``lam``, ``max_iters`` or ``conv_tol``; ``None`` values are ignored.
    """
    problem = Problem(problem)
    row = lookup(problem, n, mean_degree)
    ov = {k: v for k, v in overrides.items() if v is not None}
    unknown = set(ov) - {"alpha", "beta", "rho", "t_gs", "gamma", "lam", "max_iters", "conv_tol"}
    if unknown:
        raise TypeError(f"unknown overrides: {sorted(unknown)}")
    if objective is None:
        if problem is Problem.MIS:
            objective = ObjectiveSpec.mis_qubo(ov.get("gamma", 2.0))
        else:
            objective = ObjectiveSpec.perturbed_bias(ov.get("lam", 0.001))
    opt_kw = {}
    if "max_iters" in ov:
        opt_kw["max_iters"] = ov["max_iters"]
    elif problem is Problem.MIS:
        opt_kw["max_iters"] = MIS_MAX_ITERS
    if "conv_tol" in ov:
        opt_kw["conv_tol"] = ov["conv_tol"]
    elif problem is Problem.MAXCUT:
        opt_kw["conv_tol"] = MAXCUT_CONV_TOL
    optimizer = OptimizerConfig(alpha=ov.get("alpha", row.alpha), beta=ov.get("beta", row.momentum), **opt_kw)
    return SolverConfig(
        objective=objective,
        optimizer=optimizer,
        rho=ov.get("rho", row.rho),
        t_gs=ov.get("t_gs", row.t_gs),
        sigma=sigma,
        time_budget=time_budget,
        seed=seed,
        local_search=local_search,
        pool=pool or PoolConfig(),
        max_outer_loops=max_outer_loops,
    )
