"""Relaxed-QUBO solvers for Maximum Independent Set and MaxCut with global resets."""
from .graph import Graph, GraphGenSpec, generate, parse_dimacs, read_graph
from .objectives import ObjectiveSpec, Problem, Solution
from .pga import OptimizerConfig, run_trajectory
from .presets import make_config
from .solver import PoolConfig, RunReport, SolverConfig, solve, solve_maxcut, solve_mis, solve_pooled

__version__ = "0.1.0"

__all__ = [
    "Graph",
    "GraphGenSpec",
    "generate",
    "parse_dimacs",
    "read_graph",
    "ObjectiveSpec",
    "Problem",
    "Solution",
    "OptimizerConfig",
    "run_trajectory",
    "make_config",
    "PoolConfig",
    "RunReport",
    "SolverConfig",
    "solve",
    "solve_mis",
    "solve_maxcut",
    "solve_pooled",
]
