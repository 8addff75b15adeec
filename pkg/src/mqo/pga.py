"""Projected gradient ascent on the relaxed objectives.

The update is Polyak heavy-ball on the ascent direction::

    v <- beta * v + grad f(x)
    x <- clip(x + alpha * v, box)

With ``beta = 0`` this is plain projected gradient ascent.
"""
from __future__ import annotations

import enum
import os
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .graph import Graph
from .objectives import Domain, ObjectiveSpec, Problem, RelaxedState, _gradient

__all__ = [
    "OptimizerConfig",
    "StopReason",
    "TrajectoryOutcome",
    "project",
    "step",
    "run_trajectory",
    "mis_fixed_point_check",
    "maxcut_binary_fixed_point_check",
    "is_pga_fixed_point",
]

_DEBUG = bool(os.environ.get("MQO_DEBUG"))


@dataclass(frozen=True)
class OptimizerConfig:
    alpha: float
    beta: float = 0.0
    max_iters: int = 5000
    conv_tol: float = 1e-6
    check_every: int = 1
    # how often the wall-clock deadline is polled inside a trajectory
    time_check_every: int = 256

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"step size must be > 0, got {self.alpha}")
        if not 0 <= self.beta < 1:
            raise ValueError(f"momentum must lie in [0, 1), got {self.beta}")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.conv_tol < 0:
            raise ValueError("conv_tol must be >= 0")
        if self.check_every < 1 or self.time_check_every < 1:
            raise ValueError("check intervals must be >= 1")


class StopReason(str, enum.Enum):
    CONVERGED = "converged"
    CHECKER_ACCEPTED = "checker_accepted"
    ITER_CAP = "iter_cap"
    DEADLINE = "deadline"


@dataclass
class TrajectoryOutcome:
    x: np.ndarray
    iterations: int
    reason: StopReason


def project(state, domain: Domain | None = None):
    """Clamp coordinatewise into the box.

    Accepts a :class:`RelaxedState` (returns a new one) or a raw vector plus
    ``domain`` (returns an array).
    """
    if isinstance(state, RelaxedState):
        lo, hi = state.domain.value
        return RelaxedState(np.clip(state.x, lo, hi), state.domain)
    if domain is None:
        raise TypeError("domain is required for a raw vector")
    lo, hi = domain.value
    return np.clip(np.asarray(state, dtype=np.float64), lo, hi)


def step(spec: ObjectiveSpec, g: Graph, x, velocity: np.ndarray | None,
         cfg: OptimizerConfig) -> tuple[np.ndarray, np.ndarray]:
    """One (momentum) ascent step; returns the new state and velocity."""
    lo, hi = spec.domain.value
    x = np.asarray(x.x if isinstance(x, RelaxedState) else x, dtype=np.float64)
    grad = _gradient(spec, g, x)
    v = grad if velocity is None or cfg.beta == 0 else cfg.beta * velocity + grad
    return np.clip(x + cfg.alpha * v, lo, hi), v


def _binarize_mis(x: np.ndarray) -> np.ndarray:
    return (x > 0.5).astype(np.float64)


def _mis_fixed(g: Graph, xb: np.ndarray, gamma: float, alpha: float) -> bool:
    grad = 1.0 - gamma * (g.adjacency @ xb)
    return bool(np.array_equal(np.clip(xb + alpha * grad, 0.0, 1.0), xb))


def mis_fixed_point_check(g: Graph, x, gamma: float = 2.0, alpha: float = 1.0) -> bool:
    """True iff binary ``x`` is a PGA fixed point of the MIS QUBO.

    For ``gamma > 1`` this holds exactly when ``x`` indicates a maximal
    independent set.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (g.n,):
        raise ValueError(f"state has shape {x.shape}, graph has n={g.n}")
    if not np.all((x == 0.0) | (x == 1.0)):
        raise ValueError("MIS fixed-point check needs a binary 0/1 vector")
    return _mis_fixed(g, x, gamma, alpha)


def maxcut_binary_fixed_point_check(spec: ObjectiveSpec, g: Graph, x) -> bool:
    """True iff ``x_i * grad_i f(x) >= 0`` for all i at a binary +/-1 point."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (g.n,):
        raise ValueError(f"state has shape {x.shape}, graph has n={g.n}")
    if not np.all(np.abs(x) == 1.0):
        raise ValueError("MaxCut fixed-point check needs a binary +/-1 vector")
    if spec.problem is not Problem.MAXCUT:
        raise ValueError(f"{spec.kind} is not a MaxCut objective")
    return bool(np.all(x * _gradient(spec, g, x) >= 0))


def is_pga_fixed_point(spec: ObjectiveSpec, g: Graph, x, alpha: float = 0.1) -> bool:
    """Literal test ``x == clip(x + alpha * grad f(x))`` for any state."""
    x = np.asarray(x, dtype=np.float64)
    lo, hi = spec.domain.value
    return bool(np.array_equal(np.clip(x + alpha * _gradient(spec, g, x), lo, hi), x))


def _settled(spec, g, x, alpha, lo, hi, tol) -> bool:
    moved = np.clip(x + alpha * _gradient(spec, g, x), lo, hi)
    return float(np.max(np.abs(moved - x))) <= tol if x.size else True


def run_trajectory(
    spec: ObjectiveSpec,
    g: Graph,
    x0,
    cfg: OptimizerConfig,
    stop: Callable[[np.ndarray], bool] | None = None,
    deadline: float | None = None,
) -> TrajectoryOutcome:
    """Iterate ascent steps from ``x0`` until a stop condition fires.

    For the MIS objective (without a custom ``stop``) the run ends when the
    binarized state passes the fixed-point checker, tested every
    ``cfg.check_every`` iterations. Otherwise it ends on convergence: the last
    move and a plain projected-gradient step from the current point both stay
    within ``conv_tol`` in max-norm. The second condition keeps a momentum
    run from stopping while clipped coordinates still carry velocity. A
    custom ``stop(x)`` predicate is tested at the checker cadence.
    ``deadline`` is a ``time.monotonic()`` value polled every
    ``cfg.time_check_every`` iterations.
    """
    lo, hi = spec.domain.value
    x = np.array(x0.x if isinstance(x0, RelaxedState) else x0, dtype=np.float64)
    if x.shape != (g.n,):
        raise ValueError(f"initial state has shape {x.shape}, graph has n={g.n}")
    if x.size and (x.min() < lo or x.max() > hi):
        raise ValueError("initial state is outside the box")

    is_mis = spec.kind == "mis_qubo"
    alpha, beta, tol = cfg.alpha, cfg.beta, cfg.conv_tol
    check_conv = not is_mis or stop is not None
    if is_mis and stop is None:
        gamma = spec.gamma

        def stop(z):
            return _mis_fixed(g, _binarize_mis(z), gamma, alpha)

    if stop is not None and stop(x):
        return TrajectoryOutcome(x, 0, StopReason.CHECKER_ACCEPTED)

    v = np.zeros_like(x)
    x_new = np.empty_like(x)
    for it in range(1, cfg.max_iters + 1):
        grad = _gradient(spec, g, x)
        if beta:
            v *= beta
            v += grad
        else:
            v = grad
        np.multiply(v, alpha, out=x_new)
        x_new += x
        np.clip(x_new, lo, hi, out=x_new)
        if _DEBUG:
            assert x_new.min() >= lo and x_new.max() <= hi
        delta = float(np.max(np.abs(x_new - x))) if x.size else 0.0
        x, x_new = x_new, x
        if stop is not None and it % cfg.check_every == 0 and stop(x):
            return TrajectoryOutcome(x, it, StopReason.CHECKER_ACCEPTED)
        if check_conv and delta <= tol and _settled(spec, g, x, alpha, lo, hi, tol):
            return TrajectoryOutcome(x, it, StopReason.CONVERGED)
        if deadline is not None and it % cfg.time_check_every == 0 and time.monotonic() >= deadline:
            return TrajectoryOutcome(x, it, StopReason.DEADLINE)
    return TrajectoryOutcome(x, cfg.max_iters, StopReason.ITER_CAP)
