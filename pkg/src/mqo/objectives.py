"""Relaxed QUBO objectives for MIS and MaxCut, their gradients, and discrete scoring.

Five objectives are supported (MIS on ``[0, 1]^n``, the rest on ``[-1, 1]^n``)::

    mis_qubo              1'x - (gamma/2) x'Ax
    laplacian             (1/4) x'Lx
    perturbed_laplacian   x'(L + lam I)x
    adjacency             -x'Ax
    perturbed_bias        -lam 1'x - x'Ax

All values and gradients cost one sparse matvec, O(m).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph, adjacency_apply, laplacian_apply

__all__ = [
    "Problem",
    "Domain",
    "ObjectiveSpec",
    "RelaxedState",
    "Solution",
    "DomainMismatch",
    "value",
    "gradient",
    "extract_solution",
    "cut_value",
    "is_independent",
    "is_maximal_independent",
    "OBJECTIVE_KINDS",
]


class Problem(str, enum.Enum):
    MIS = "mis"
    MAXCUT = "maxcut"


class Domain(enum.Enum):
    UNIT_BOX = (0.0, 1.0)
    SYMMETRIC_BOX = (-1.0, 1.0)

    @property
    def lower(self) -> float:
        return self.value[0]

    @property
    def upper(self) -> float:
        return self.value[1]

    @classmethod
    def for_problem(cls, problem: Problem) -> "Domain":
        return cls.UNIT_BOX if Problem(problem) is Problem.MIS else cls.SYMMETRIC_BOX


class DomainMismatch(ValueError):
    pass


OBJECTIVE_KINDS = ("mis_qubo", "laplacian", "perturbed_laplacian", "adjacency", "perturbed_bias")


@dataclass(frozen=True)
class ObjectiveSpec:
    """Tagged objective choice.

    ``gamma`` is the MIS edge penalty (must exceed 1); ``lam`` is the
    diagonal/bias perturbation of the two perturbed MaxCut forms.
    """

    kind: str
    gamma: float = 2.0
    lam: float = 0.001

    def __post_init__(self):
        if self.kind not in OBJECTIVE_KINDS:
            raise ValueError(f"unknown objective {self.kind!r}; expected one of {OBJECTIVE_KINDS}")
        if self.kind == "mis_qubo" and not self.gamma > 1:
            raise ValueError(f"MIS penalty gamma must be > 1, got {self.gamma}")
        if self.kind == "perturbed_laplacian" and not self.lam > 0:
            raise ValueError(f"perturbed Laplacian requires lam > 0, got {self.lam}")
        if self.kind == "perturbed_bias" and not 0 < self.lam < 2:
            raise ValueError(f"perturbed bias requires 0 < lam < 2, got {self.lam}")

    @classmethod
    def mis_qubo(cls, gamma: float = 2.0) -> "ObjectiveSpec":
        return cls("mis_qubo", gamma=gamma)

    @classmethod
    def laplacian(cls) -> "ObjectiveSpec":
        return cls("laplacian")

    @classmethod
    def perturbed_laplacian(cls, lam: float = 0.001) -> "ObjectiveSpec":
        return cls("perturbed_laplacian", lam=lam)

    @classmethod
    def adjacency(cls) -> "ObjectiveSpec":
        return cls("adjacency")

    @classmethod
    def perturbed_bias(cls, lam: float = 0.001) -> "ObjectiveSpec":
        return cls("perturbed_bias", lam=lam)

    @property
    def problem(self) -> Problem:
        return Problem.MIS if self.kind == "mis_qubo" else Problem.MAXCUT

    @property
    def domain(self) -> Domain:
        return Domain.for_problem(self.problem)

    def describe(self) -> dict:
        d = {"kind": self.kind}
        if self.kind == "mis_qubo":
            d["gamma"] = self.gamma
        elif self.kind in ("perturbed_laplacian", "perturbed_bias"):
            d["lam"] = self.lam
        return d


@dataclass
class RelaxedState:
    """A continuous assignment together with the box it lives in."""

    x: np.ndarray
    domain: Domain

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=np.float64)
        lo, hi = self.domain.value
        if self.x.size and (self.x.min() < lo or self.x.max() > hi):
            raise ValueError(f"state leaves the box [{lo}, {hi}]")


def _unwrap(spec: ObjectiveSpec, g: Graph, state) -> np.ndarray:
    if isinstance(state, RelaxedState):
        if state.domain is not spec.domain:
            raise DomainMismatch(f"{spec.kind} is defined on {spec.domain.name}, state is on {state.domain.name}")
        x = state.x
    else:
        x = np.asarray(state, dtype=np.float64)
    if x.shape != (g.n,):
        raise ValueError(f"state has shape {x.shape}, graph has n={g.n}")
    return x


def value(spec: ObjectiveSpec, g: Graph, state) -> float:
    """Objective value at ``state`` (a ``RelaxedState`` or a raw vector)."""
    x = _unwrap(spec, g, state)
    k = spec.kind
    if k == "mis_qubo":
        return float(x.sum() - 0.5 * spec.gamma * (x @ adjacency_apply(g, x)))
    if k == "laplacian":
        return float(0.25 * (x @ laplacian_apply(g, x)))
    if k == "perturbed_laplacian":
        return float(x @ laplacian_apply(g, x) + spec.lam * (x @ x))
    ax = adjacency_apply(g, x)
    if k == "adjacency":
        return float(-(x @ ax))
    return float(-spec.lam * x.sum() - x @ ax)


def gradient(spec: ObjectiveSpec, g: Graph, state) -> np.ndarray:
    """Exact gradient of :func:`value`.

    For the Laplacian form this is ``(1/2) L x``; some texts write ``L x``,
    which only rescales the step size.
    """
    x = _unwrap(spec, g, state)
    return _gradient(spec, g, x)


def _gradient(spec: ObjectiveSpec, g: Graph, x: np.ndarray) -> np.ndarray:
    # unchecked fast path used inside the optimizer loop
    k = spec.kind
    if k == "mis_qubo":
        return 1.0 - spec.gamma * (g.adjacency @ x)
    if k == "laplacian":
        return 0.5 * laplacian_apply(g, x)
    if k == "perturbed_laplacian":
        return 2.0 * (laplacian_apply(g, x) + spec.lam * x)
    if k == "adjacency":
        return -2.0 * (g.adjacency @ x)
    return -2.0 * (g.adjacency @ x) - spec.lam


# ---------------------------------------------------------------------------
# discrete side

@dataclass(frozen=True, eq=False)
class Solution:
    """A discrete solution encoded as a boolean vertex mask.

    For MIS the mask marks members of the independent set; for MaxCut it
    marks the side ``S`` (``x_v > 0``). ``score`` is ``|I|`` or ``Cut(S)``.
    """

    problem: Problem
    mask: np.ndarray = field(repr=False)
    score: int

    @classmethod
    def independent_set(cls, g: Graph, members) -> "Solution":
        mask = _as_mask(g.n, members)
        return cls(Problem.MIS, mask, int(mask.sum()))

    @classmethod
    def cut(cls, g: Graph, side) -> "Solution":
        mask = _as_mask(g.n, side)
        return cls(Problem.MAXCUT, mask, cut_value(g, mask))

    @classmethod
    def empty(cls, problem: Problem, n: int) -> "Solution":
        return cls(Problem(problem), np.zeros(n, dtype=bool), 0)

    @property
    def members(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    def encoding(self) -> np.ndarray:
        """Box encoding: ``1(v in I)`` for MIS, ``+/-1`` by side for MaxCut."""
        if self.problem is Problem.MIS:
            return self.mask.astype(np.float64)
        return np.where(self.mask, 1.0, -1.0)

    def rescore(self, g: Graph) -> int:
        if self.problem is Problem.MIS:
            return int(self.mask.sum())
        return cut_value(g, self.mask)

    def key(self) -> bytes:
        return np.packbits(self.mask).tobytes()

    def __eq__(self, other):
        if not isinstance(other, Solution):
            return NotImplemented
        return self.problem is other.problem and np.array_equal(self.mask, other.mask)

    def __hash__(self):
        return hash((self.problem, self.key()))


def _as_mask(n: int, members) -> np.ndarray:
    a = np.asarray(members)
    if a.dtype == bool:
        if a.shape != (n,):
            raise ValueError(f"mask has shape {a.shape}, expected ({n},)")
        return a.copy()
    mask = np.zeros(n, dtype=bool)
    if a.size:
        mask[a.astype(np.int64)] = True
    return mask


def extract_solution(problem: Problem | str, g: Graph, state) -> Solution:
    """Threshold a relaxed state: MIS keeps ``x_v > 0.5``, MaxCut puts ``x_v > 0`` in ``S``.

    Values exactly at the threshold are not selected. MIS extraction does not
    verify independence.
    """
    problem = Problem(problem)
    x = state.x if isinstance(state, RelaxedState) else np.asarray(state, dtype=np.float64)
    if problem is Problem.MIS:
        return Solution.independent_set(g, x > 0.5)
    return Solution.cut(g, x > 0.0)


def cut_value(g: Graph, side) -> int:
    """Number of edges with endpoints on opposite sides of ``side`` (a boolean mask)."""
    mask = _as_mask(g.n, side)
    if g.m == 0:
        return 0
    e = g.edges
    return int(np.count_nonzero(mask[e[:, 0]] != mask[e[:, 1]]))


def is_independent(g: Graph, members) -> bool:
    mask = _as_mask(g.n, members)
    if g.m == 0:
        return True
    e = g.edges
    return not bool(np.any(mask[e[:, 0]] & mask[e[:, 1]]))


def is_maximal_independent(g: Graph, members) -> bool:
    mask = _as_mask(g.n, members)
    if not is_independent(g, mask):
        return False
    covered = (g.adjacency @ mask.astype(np.float64)) > 0
    return bool(np.all(mask | covered))
