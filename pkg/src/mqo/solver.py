"""Mutation-based quadratic optimization (mQO) solvers for MIS and MaxCut.

One outer loop of the solver:

1. run gradient trajectories from a degree-based noisy initialization and
   keep the thresholded solution if it beats the incumbent;
2. repeat ``t_gs`` global-reset rounds: re-encode a retained solution as a box
   vector, zero a uniformly random ``floor(rho * n)`` subset of coordinates,
   re-run the trajectory and accept only a strict improvement;
3. polish the retained solutions with discrete local search.

Loops repeat until the wall-clock budget (or ``max_outer_loops``) runs out.
With ``pool.batch == pool.keep == 1`` this is the sequential algorithm; larger
values give the pooled variant, where ``batch`` trajectories run side by side
and reset rounds draw their base solutions from the top-``keep`` pool.
"""
from __future__ import annotations

import logging
import math
import os
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .graph import Graph, strip_isolated
from .localsearch import one_two_flip, one_two_swap, repair_independent
from .objectives import Domain, ObjectiveSpec, Problem, RelaxedState, Solution
from .pga import OptimizerConfig, StopReason, run_trajectory

__all__ = [
    "PoolConfig",
    "SolverConfig",
    "PhaseScores",
    "RunReport",
    "init_state",
    "global_reset",
    "reset_size",
    "solve",
    "solve_mis",
    "solve_maxcut",
    "solve_pooled",
    "solve_from",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PoolConfig:
    batch: int = 1
    keep: int = 1

    def __post_init__(self):
        if self.batch < 1 or self.keep < 1:
            raise ValueError("pool batch and keep must both be >= 1")


@dataclass(frozen=True)
class SolverConfig:
    objective: ObjectiveSpec
    optimizer: OptimizerConfig
    rho: float = 0.6
    t_gs: int = 60
    sigma: float = 0.15
    time_budget: float = 60.0
    seed: int = 0
    local_search: bool = True
    pool: PoolConfig = field(default_factory=PoolConfig)
    max_outer_loops: int | None = None
    threads: int | None = None

    def __post_init__(self):
        # rho = 0 is allowed so that "no reset" ablations can run through the same path
        if not 0 <= self.rho < 1:
            raise ValueError(f"reset fraction must lie in [0, 1), got {self.rho}")
        if self.t_gs < 0:
            raise ValueError("t_gs must be >= 0")
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")
        if not self.time_budget > 0:
            raise ValueError("time budget must be positive")
        if self.max_outer_loops is not None and self.max_outer_loops < 1:
            raise ValueError("max_outer_loops must be >= 1")

    @property
    def problem(self) -> Problem:
        return self.objective.problem

    def describe(self) -> dict:
        d = {
            "objective": self.objective.describe(),
            "optimizer": asdict(self.optimizer),
            "rho": self.rho,
            "t_gs": self.t_gs,
            "sigma": self.sigma,
            "time_budget": self.time_budget,
            "seed": self.seed,
            "local_search": self.local_search,
            "pool": asdict(self.pool),
            "max_outer_loops": self.max_outer_loops,
        }
        return d


@dataclass
class PhaseScores:
    """Incumbent score after each phase of one outer loop."""

    after_gradient: int
    after_reset_loop: int
    after_local_search: int


@dataclass
class RunReport:
    problem: Problem
    best: Solution
    loops: list[PhaseScores]
    resets_accepted: int
    resets_rejected: int
    iterations: int
    trajectories: int
    elapsed: float
    config: dict
    seed: int
    stop_reasons: dict[str, int]
    pool_scores: list[int] = field(default_factory=list)
    empty: bool = False

    @property
    def score(self) -> int:
        return self.best.score

    @property
    def outer_loops(self) -> int:
        return len(self.loops)

    @property
    def phase_gains(self) -> dict[str, int]:
        """Total incumbent improvement credited to each phase, summed over loops.

        The three gains add up to the final score.
        """
        grad = reset = ls = 0
        prev = self.base_score
        for p in self.loops:
            grad += p.after_gradient - prev
            reset += p.after_reset_loop - p.after_gradient
            ls += p.after_local_search - p.after_reset_loop
            prev = p.after_local_search
        return {"gradient": grad, "reset_loop": reset, "local_search": ls}

    base_score: int = 0


# ---------------------------------------------------------------------------
# building blocks

def init_state(problem: Problem | str, g: Graph, sigma: float, rng: np.random.Generator) -> RelaxedState:
    """Degree-based noisy start: low-degree vertices lean towards selection / side S.

    MIS uses ``1 - d(v)/Delta``; MaxCut rescales it to ``2(1 - d(v)/Delta) - 1``.
    Gaussian noise of standard deviation ``sigma`` is added before projection.
    """
    problem = Problem(problem)
    if g.n == 0:
        raise ValueError("cannot initialize on an empty graph")
    delta = g.max_degree
    if delta < 1:
        raise ValueError("initialization needs max degree >= 1 (strip isolated vertices first)")
    base = 1.0 - g.degrees / delta
    if problem is Problem.MAXCUT:
        base = 2.0 * base - 1.0
    domain = Domain.for_problem(problem)
    noise = rng.normal(0.0, sigma, size=g.n) if sigma > 0 else 0.0
    return RelaxedState(np.clip(base + noise, domain.lower, domain.upper), domain)


def reset_size(n: int, rho: float) -> int:
    return int(math.floor(rho * n))


def global_reset(solution, rho: float, rng: np.random.Generator, reset_set=None) -> RelaxedState:
    """Encode ``solution`` in the box and zero ``floor(rho * n)`` random coordinates.

    ``solution`` may be a :class:`Solution` or a box vector. ``reset_set``
    overrides the random draw (used in tests).
    """
    if isinstance(solution, Solution):
        x = solution.encoding()
        domain = Domain.for_problem(solution.problem)
    else:
        x = np.array(solution.x if isinstance(solution, RelaxedState) else solution, dtype=np.float64)
        domain = solution.domain if isinstance(solution, RelaxedState) else (
            Domain.SYMMETRIC_BOX if x.min(initial=0) < 0 else Domain.UNIT_BOX)
    n = x.size
    if reset_set is None:
        k = reset_size(n, rho)
        if k == 0:
            warnings.warn(f"reset fraction {rho} zeroes no coordinates for n={n}", RuntimeWarning, stacklevel=2)
        reset_set = rng.choice(n, size=k, replace=False) if k else np.zeros(0, dtype=np.int64)
    x[np.asarray(reset_set, dtype=np.int64)] = 0.0
    return RelaxedState(x, domain)


class _Pool:
    """Top-K distinct solutions; ties keep the older entry."""

    def __init__(self, keep: int):
        self.keep = keep
        self.members: list[Solution] = []
        self._keys: set[bytes] = set()

    def update(self, candidates: list[Solution]) -> None:
        for c in candidates:
            k = c.key()
            if k in self._keys:
                continue
            self.members.append(c)
            self._keys.add(k)
        # stable sort: older entries win ties
        self.members.sort(key=lambda s: -s.score)
        for dropped in self.members[self.keep:]:
            self._keys.discard(dropped.key())
        del self.members[self.keep:]

    def sample(self, rng: np.random.Generator) -> Solution:
        if len(self.members) == 1:
            return self.members[0]
        return self.members[int(rng.integers(len(self.members)))]

    @property
    def best(self) -> Solution | None:
        return self.members[0] if self.members else None


class _Run:
    """Mutable bookkeeping for one solve on the isolated-free core graph."""

    def __init__(self, core: Graph, cfg: SolverConfig, deadline: float):
        self.g = core
        self.cfg = cfg
        self.problem = cfg.problem
        self.deadline = deadline
        self.best: Solution | None = None
        self.iterations = 0
        self.trajectories = 0
        self.reasons: dict[str, int] = {}
        self.k_reset = reset_size(core.n, cfg.rho)
        root = np.random.SeedSequence(cfg.seed & (2**64 - 1))
        traj_seq, pool_seq = root.spawn(2)
        self.rngs = [np.random.Generator(np.random.PCG64(s)) for s in traj_seq.spawn(cfg.pool.batch)]
        self.pool_rng = np.random.Generator(np.random.PCG64(pool_seq))
        self.pool = _Pool(cfg.pool.keep)
        threads = cfg.threads or int(os.environ.get("MQO_THREADS", "0") or 0) or (os.cpu_count() or 1)
        self.workers = max(1, min(cfg.pool.batch, threads))

    def expired(self) -> bool:
        return time.monotonic() >= self.deadline

    def _to_solution(self, x: np.ndarray, reason: StopReason) -> Solution:
        if self.problem is Problem.MIS:
            mask = x > 0.5
            if reason is not StopReason.CHECKER_ACCEPTED:
                mask = repair_independent(self.g, mask)
            return Solution.independent_set(self.g, mask)
        return Solution.cut(self.g, x > 0.0)

    def _trajectory(self, x0: np.ndarray):
        out = run_trajectory(self.cfg.objective, self.g, x0, self.cfg.optimizer, deadline=self.deadline)
        return self._to_solution(out.x, out.reason), out

    def run_batch(self, starts: list[np.ndarray]) -> list[Solution]:
        if self.workers > 1 and len(starts) > 1:
            with ThreadPoolExecutor(max_workers=self.workers) as ex:
                results = list(ex.map(self._trajectory, starts))
        else:
            results = [self._trajectory(x0) for x0 in starts]
        sols = []
        for sol, out in results:  # merged in submission order for determinism
            self.iterations += out.iterations
            self.trajectories += 1
            self.reasons[out.reason.value] = self.reasons.get(out.reason.value, 0) + 1
            sols.append(sol)
        return sols

    def offer(self, candidates: list[Solution]) -> bool:
        """Feed candidates to the pool; True if the incumbent strictly improved."""
        self.pool.update(candidates)
        top = self.pool.best
        if top is not None and (self.best is None or top.score > self.best.score):
            self.best = top
            return True
        return False

    def reset_starts(self) -> list[np.ndarray]:
        starts = []
        for rng in self.rngs:
            base = self.pool.sample(self.pool_rng)
            x = base.encoding()
            if self.k_reset:
                x[rng.choice(self.g.n, size=self.k_reset, replace=False)] = 0.0
            starts.append(x)
        return starts

    def fresh_starts(self) -> list[np.ndarray]:
        return [init_state(self.problem, self.g, self.cfg.sigma, rng).x for rng in self.rngs]

    def local_search(self) -> None:
        search = one_two_swap if self.problem is Problem.MIS else one_two_flip
        improved = [search(self.g, s) for s in list(self.pool.members)]
        self.offer(improved)


def _lift(sol: Solution, g: Graph, core: Graph, index_map: np.ndarray, removed: np.ndarray) -> Solution:
    mask = np.zeros(g.n, dtype=bool)
    mask[index_map[sol.mask]] = True
    if sol.problem is Problem.MIS:
        mask[removed] = True
        return Solution(Problem.MIS, mask, int(mask.sum()))
    return Solution(Problem.MAXCUT, mask, sol.score)


def solve(g: Graph, cfg: SolverConfig) -> RunReport:
    """Run mQO on ``g`` (problem chosen by ``cfg.objective``)."""
    t0 = time.monotonic()
    deadline = t0 + cfg.time_budget
    problem = cfg.problem
    core, removed, index_map = strip_isolated(g)
    offset = int(removed.size) if problem is Problem.MIS else 0
    if core.n > 0 and cfg.rho > 0 and reset_size(core.n, cfg.rho) == 0 and cfg.t_gs > 0:
        warnings.warn(f"reset fraction {cfg.rho} zeroes no coordinates for n={core.n}", RuntimeWarning, stacklevel=2)

    loops: list[PhaseScores] = []
    accepted = rejected = 0
    run = None
    if core.n > 0:
        run = _Run(core, cfg, deadline)
        while not run.expired() and (cfg.max_outer_loops is None or len(loops) < cfg.max_outer_loops):
            run.offer(run.run_batch(run.fresh_starts()))
            after_gradient = run.best.score
            for _ in range(cfg.t_gs):
                if run.expired():
                    break
                if run.offer(run.run_batch(run.reset_starts())):
                    accepted += 1
                else:
                    rejected += 1
            after_reset = run.best.score
            if cfg.local_search:
                run.local_search()
            loops.append(PhaseScores(after_gradient + offset, after_reset + offset, run.best.score + offset))
            log.debug("loop %d: %s", len(loops), loops[-1])

    empty = False
    if run is None:  # edgeless graph: every vertex is isolated
        if problem is Problem.MIS:
            best = Solution.independent_set(g, np.ones(g.n, dtype=bool))
        else:
            best = Solution.cut(g, np.zeros(g.n, dtype=bool))
    elif run.best is None:
        best, empty = Solution.empty(problem, g.n), True
    else:
        best = _lift(run.best, g, core, index_map, removed)

    return RunReport(
        problem=problem,
        best=best,
        loops=loops,
        resets_accepted=accepted,
        resets_rejected=rejected,
        iterations=run.iterations if run else 0,
        trajectories=run.trajectories if run else 0,
        elapsed=time.monotonic() - t0,
        config=cfg.describe(),
        seed=cfg.seed,
        stop_reasons=dict(sorted(run.reasons.items())) if run else {},
        pool_scores=[s.score + offset for s in run.pool.members] if run else [],
        empty=empty,
        base_score=offset,
    )


def solve_mis(g: Graph, cfg: SolverConfig) -> RunReport:
    if cfg.problem is not Problem.MIS:
        raise ValueError(f"solve_mis needs the MIS objective, got {cfg.objective.kind}")
    return solve(g, cfg)


def solve_maxcut(g: Graph, cfg: SolverConfig) -> RunReport:
    if cfg.problem is not Problem.MAXCUT:
        raise ValueError(f"solve_maxcut needs a MaxCut objective, got {cfg.objective.kind}")
    return solve(g, cfg)


def solve_pooled(g: Graph, cfg: SolverConfig) -> RunReport:
    """Pooled variant; identical to :func:`solve`, which already honours ``cfg.pool``."""
    return solve(g, cfg)


def solve_from(g: Graph, cfg: SolverConfig, x0) -> RunReport:
    """Run a single trajectory from ``x0`` and score its endpoint.

    No resets and no local search; used to probe stationary points.
    """
    t0 = time.monotonic()
    problem = cfg.problem
    out = run_trajectory(cfg.objective, g, x0, cfg.optimizer, deadline=t0 + cfg.time_budget)
    if problem is Problem.MIS:
        mask = out.x > 0.5
        if out.reason is not StopReason.CHECKER_ACCEPTED:
            mask = repair_independent(g, mask)
        best = Solution.independent_set(g, mask)
    else:
        best = Solution.cut(g, out.x > 0.0)
    return RunReport(
        problem=problem,
        best=best,
        loops=[PhaseScores(best.score, best.score, best.score)],
        resets_accepted=0,
        resets_rejected=0,
        iterations=out.iterations,
        trajectories=1,
        elapsed=time.monotonic() - t0,
        config=cfg.describe(),
        seed=cfg.seed,
        stop_reasons={out.reason.value: 1},
        pool_scores=[best.score],
    )
