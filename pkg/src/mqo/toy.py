"""Separable double-well experiment comparing coordinate resets with full restarts.

The objective is ``F(x) = sum_i phi(x_i)`` on ``[-1, 1]^n``, minimized by
projected gradient descent. ``phi`` has local minima at -1 and 1 with
``phi(1) < phi(-1)`` and an unstable stationary point at 0 that splits the
two basins.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["phi", "phi_prime", "descend", "attempt_budget", "ToyResult", "toy_reset_experiment"]

TILT = 0.5


def phi(t):
    return (t * t - 1.0) ** 2 - TILT * (t ** 3 / 3.0 - t ** 5 / 5.0)


def phi_prime(t):
    # = t (t^2 - 1)(4 + TILT t); the last factor is positive on [-1, 1]
    return t * (t * t - 1.0) * (4.0 + TILT * t)


def descend(x: np.ndarray, eta: float = 0.1, tol: float = 1e-10, max_iters: int = 10_000) -> np.ndarray:
    """Projected gradient descent on ``F``, applied to every row of ``x`` at once."""
    x = np.clip(np.array(x, dtype=np.float64), -1.0, 1.0)
    for _ in range(max_iters):
        nxt = np.clip(x - eta * phi_prime(x), -1.0, 1.0)
        if np.max(np.abs(nxt - x), initial=0.0) <= tol:
            return nxt
        x = nxt
    return x


def attempt_budget(n: int, delta: float) -> int:
    return math.ceil(2 * n * math.log(n / delta))


@dataclass
class ToyResult:
    n: int
    delta: float
    budget: int
    trials: int
    # attempts needed to reach the all-ones optimum, -1 if never reached
    reset_attempts: np.ndarray
    restart_attempts: np.ndarray

    @property
    def reset_success_rate(self) -> float:
        return float(np.mean(self.reset_attempts >= 0))

    @property
    def restart_success_rate(self) -> float:
        return float(np.mean(self.restart_attempts >= 0))


def _at_optimum(x: np.ndarray) -> np.ndarray:
    return np.all(x > 0.5, axis=1)


def toy_reset_experiment(n: int, delta: float, rng: np.random.Generator,
                         trials: int = 200, budget: int | None = None) -> ToyResult:
    """Run both strategies for ``trials`` independent trials of ``budget`` attempts.

    Coordinate reset starts from one descended uniform sample; each attempt
    redraws one uniformly chosen coordinate from U[-1, 1], descends, and keeps
    the result only if ``F`` strictly decreases. Full restart draws a fresh
    uniform point each attempt. The budget defaults to ``ceil(2 n ln(n/delta))``.
    """
    if not 1 <= n <= 30:
        raise ValueError("toy experiment supports 1 <= n <= 30")
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    budget = attempt_budget(n, delta) if budget is None else budget
    rows = np.arange(trials)

    best = descend(rng.uniform(-1.0, 1.0, size=(trials, n)))
    best_f = phi(best).sum(axis=1)
    reset_hit = np.where(_at_optimum(best), 0, -1)
    for attempt in range(1, budget + 1):
        cand = best.copy()
        cand[rows, rng.integers(n, size=trials)] = rng.uniform(-1.0, 1.0, size=trials)
        cand = descend(cand)
        f = phi(cand).sum(axis=1)
        take = f < best_f
        best[take], best_f[take] = cand[take], f[take]
        reset_hit[(reset_hit < 0) & _at_optimum(best)] = attempt

    restart_hit = np.full(trials, -1)
    for attempt in range(1, budget + 1):
        x = descend(rng.uniform(-1.0, 1.0, size=(trials, n)))
        restart_hit[(restart_hit < 0) & _at_optimum(x)] = attempt

    return ToyResult(n, delta, budget, trials, reset_hit, restart_hit)
