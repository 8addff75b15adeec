"""Sparse undirected graphs, random generators and DIMACS/canonical file I/O.

Graphs are immutable CSR structures. The adjacency matrix ``A`` is held once
as a ``scipy.sparse`` matrix; the Laplacian ``L = D - A`` is only ever
applied as an action and never materialized.
"""
from __future__ import annotations

import io
import os
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components as _cc

__all__ = [
    "Graph",
    "GraphGenSpec",
    "GraphFormatError",
    "DimacsWarning",
    "generate",
    "parse_dimacs",
    "read_dimacs",
    "read_graph",
    "write_graph",
    "format_graph",
    "parse_graph",
    "adjacency_apply",
    "laplacian_apply",
    "strip_isolated",
    "connected_components",
    "er_probability",
]


class GraphFormatError(ValueError):
    """Raised for malformed graph files; carries the offending line number."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class DimacsWarning(UserWarning):
    pass


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


class Graph:
    """Immutable simple undirected graph in CSR form.

    Vertices are ``0..n-1``. Neighbor lists are sorted ascending, contain no
    self-loops and no duplicates, and are symmetric.
    """

    __slots__ = ("n", "indptr", "indices", "degrees", "__dict__")

    def __init__(self, n: int, indptr: np.ndarray, indices: np.ndarray):
        self.n = int(n)
        self.indptr = _readonly(np.asarray(indptr, dtype=np.int64))
        self.indices = _readonly(np.asarray(indices, dtype=np.int64))
        self.degrees = _readonly(np.diff(self.indptr))
        self._check()

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]] | np.ndarray) -> "Graph":
        """Build a graph from an edge list, deduplicating reversed/repeated pairs."""
        n = int(n)
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        e = np.asarray(edges, dtype=np.int64)
        if e.size == 0:
            e = e.reshape(0, 2)
        if e.ndim != 2 or e.shape[1] != 2:
            raise ValueError("edges must be an (m, 2) array of vertex pairs")
        if e.size and (e.min() < 0 or e.max() >= n):
            raise ValueError(f"edge endpoint out of range [0, {n})")
        if np.any(e[:, 0] == e[:, 1]):
            raise ValueError("self-loops are not allowed")
        lo = np.minimum(e[:, 0], e[:, 1])
        hi = np.maximum(e[:, 0], e[:, 1])
        und = np.unique(lo * max(n, 1) + hi)
        lo, hi = und // max(n, 1), und % max(n, 1)
        return cls._from_canonical(n, lo, hi)

    @classmethod
    def _from_canonical(cls, n: int, lo: np.ndarray, hi: np.ndarray) -> "Graph":
        # lo < hi, unique pairs
        rows = np.concatenate([lo, hi])
        cols = np.concatenate([hi, lo])
        order = np.lexsort((cols, rows))
        rows, cols = rows[order], cols[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
        return cls(n, indptr, cols)

    def _check(self) -> None:
        n = self.n
        if self.indptr.shape != (n + 1,) or self.indptr[0] != 0:
            raise ValueError("malformed indptr")
        if self.indptr[-1] != self.indices.size:
            raise ValueError("indptr does not match indices")
        if self.indices.size:
            if self.indices.min() < 0 or self.indices.max() >= n:
                raise ValueError("neighbor index out of range")
        rows = np.repeat(np.arange(n, dtype=np.int64), self.degrees)
        if np.any(rows == self.indices):
            raise ValueError("self-loop in adjacency")
        # sorted, strictly increasing within each row
        if self.indices.size > 1:
            step = np.diff(self.indices)
            same_row = np.diff(rows) == 0
            if np.any(step[same_row] <= 0):
                raise ValueError("neighbor lists must be strictly increasing")
        if self.degrees.sum() % 2:
            raise ValueError("degree sum must be even")
        a = self.adjacency
        if (a != a.T).nnz:
            raise ValueError("adjacency is not symmetric")

    @property
    def m(self) -> int:
        return int(self.indices.size // 2)

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max()) if self.n else 0

    @property
    def mean_degree(self) -> float:
        return 2.0 * self.m / self.n if self.n else 0.0

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    @cached_property
    def adjacency(self) -> sp.csr_matrix:
        data = np.ones(self.indices.size, dtype=np.float64)
        mat = sp.csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))
        mat.has_sorted_indices = True
        return mat

    @cached_property
    def edges(self) -> np.ndarray:
        """(m, 2) array of edges ``(u, v)`` with ``u < v``, lexicographically sorted."""
        rows = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees)
        keep = rows < self.indices
        e = np.stack([rows[keep], self.indices[keep]], axis=1)
        return _readonly(e)

    @cached_property
    def fingerprint(self) -> str:
        import hashlib

        h = hashlib.sha256()
        h.update(np.int64(self.n).tobytes())
        h.update(np.ascontiguousarray(self.edges).tobytes())
        return h.hexdigest()[:16]

    def has_edge(self, u: int, v: int) -> bool:
        nb = self.neighbors(u)
        i = np.searchsorted(nb, v)
        return bool(i < nb.size and nb[i] == v)

    def subgraph(self, vertices: Sequence[int]) -> "Graph":
        """Induced subgraph, relabelled ``0..k-1`` in the given vertex order."""
        vertices = np.asarray(vertices, dtype=np.int64)
        sub = self.adjacency[vertices][:, vertices].tocsr()
        sub.sort_indices()
        return Graph(len(vertices), sub.indptr, sub.indices)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.edges, other.edges)

    def __hash__(self) -> int:
        return hash((self.n, self.fingerprint))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


# ---------------------------------------------------------------------------
# generators

@dataclass(frozen=True)
class GraphGenSpec:
    """Random graph model plus seed.

    ``kind`` is one of ``"er"`` (uses ``p``), ``"ba"`` (uses ``m_attach``) or
    ``"sbm"`` (uses ``k``, ``p_in``, ``p_out``).
    """

    kind: str
    n: int
    p: float | None = None
    m_attach: int | None = None
    k: int | None = None
    p_in: float | None = None
    p_out: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("er", "ba", "sbm"):
            raise ValueError(f"unknown graph kind {self.kind!r}")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.kind == "er":
            _check_prob("p", self.p)
        elif self.kind == "ba":
            if self.m_attach is None or self.m_attach < 1:
                raise ValueError("BA requires m_attach >= 1")
            if self.m_attach >= self.n:
                raise ValueError("BA requires m_attach < n")
        else:
            if self.k is None or not 1 <= self.k <= self.n:
                raise ValueError("SBM requires 1 <= k <= n")
            _check_prob("p_in", self.p_in)
            _check_prob("p_out", self.p_out)
            if not self.p_in > self.p_out:
                raise ValueError("SBM requires p_in > p_out")

    def describe(self) -> dict:
        d = {"kind": self.kind, "n": self.n, "seed": self.seed}
        if self.kind == "er":
            d["p"] = self.p
        elif self.kind == "ba":
            d["m_attach"] = self.m_attach
        else:
            d.update(k=self.k, p_in=self.p_in, p_out=self.p_out)
        return d


def _check_prob(name: str, p: float | None) -> None:
    if p is None or not 0.0 <= p <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {p!r}")


def er_probability(n: int, d: float) -> float:
    """Edge probability for an ER graph of order ``n`` and average degree ``d`` (p = d/n)."""
    return min(1.0, float(d) / n)


def _pair_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed & (2**64 - 1))))


def _bernoulli_pairs(n: int, seed: int, prob_row) -> tuple[np.ndarray, np.ndarray]:
    """Per-pair Bernoulli draws over ``u < v`` in canonical row-major order.

    ``prob_row(u)`` returns the edge probabilities for pairs ``(u, u+1..n-1)``.
    One uniform is consumed per pair regardless of its probability, so the
    stream position of every pair is fixed.
    """
    rng = _pair_rng(seed)
    lo_parts, hi_parts = [], []
    for u in range(n - 1):
        r = rng.random(n - u - 1)
        hit = np.flatnonzero(r < prob_row(u))
        if hit.size:
            lo_parts.append(np.full(hit.size, u, dtype=np.int64))
            hi_parts.append(hit + (u + 1))
    if not lo_parts:
        return np.zeros(0, np.int64), np.zeros(0, np.int64)
    return np.concatenate(lo_parts), np.concatenate(hi_parts)


def _sbm_blocks(n: int, k: int) -> np.ndarray:
    sizes = np.full(k, n // k)
    sizes[: n % k] += 1
    return np.repeat(np.arange(k), sizes)


def generate(spec: GraphGenSpec) -> Graph:
    """Sample a graph from ``spec``; bit-deterministic for a fixed spec and seed."""
    n = spec.n
    if spec.kind == "er":
        p = spec.p
        lo, hi = _bernoulli_pairs(n, spec.seed, lambda u: p)
        return Graph._from_canonical(n, lo, hi)
    if spec.kind == "sbm":
        block = _sbm_blocks(n, spec.k)
        p_in, p_out = spec.p_in, spec.p_out

        def prob_row(u):
            return np.where(block[u + 1:] == block[u], p_in, p_out)

        lo, hi = _bernoulli_pairs(n, spec.seed, prob_row)
        return Graph._from_canonical(n, lo, hi)
    import networkx as nx

    nxg = nx.barabasi_albert_graph(n, spec.m_attach, seed=spec.seed % (2**32))
    return Graph.from_edges(n, np.array(list(nxg.edges()), dtype=np.int64).reshape(-1, 2))


# ---------------------------------------------------------------------------
# file formats

def parse_dimacs(text: bytes | str) -> Graph:
    """Parse the DIMACS edge format (``c``/``p edge n m``/``e u v``, 1-based)."""
    if isinstance(text, bytes):
        text = text.decode("utf-8", errors="replace")
    n = declared_m = None
    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line[0] == "c":
            continue
        parts = line.split()
        tag = parts[0]
        if tag == "p":
            if n is not None:
                raise GraphFormatError("duplicate 'p' header", lineno)
            if len(parts) != 4:
                raise GraphFormatError(f"malformed header {line!r}", lineno)
            try:
                n, declared_m = int(parts[2]), int(parts[3])
            except ValueError:
                raise GraphFormatError(f"non-integer header fields {line!r}", lineno) from None
            if n < 0 or declared_m < 0:
                raise GraphFormatError("negative header fields", lineno)
        elif tag == "e":
            if n is None:
                raise GraphFormatError("missing 'p edge n m' header before first edge line", lineno)
            if len(parts) < 3:
                raise GraphFormatError(f"malformed edge line {line!r}", lineno)
            try:
                u, v = int(parts[1]), int(parts[2])
            except ValueError:
                raise GraphFormatError(f"non-integer vertex in {line!r}", lineno) from None
            if not (1 <= u <= n and 1 <= v <= n):
                raise GraphFormatError(f"vertex index out of [1, {n}] in {line!r}", lineno)
            if u == v:
                raise GraphFormatError(f"self-loop on vertex {u}", lineno)
            edges.append((u - 1, v - 1))
        else:
            raise GraphFormatError(f"unrecognized line {line!r}", lineno)
    if n is None:
        raise GraphFormatError("missing 'p edge n m' header")
    g = Graph.from_edges(n, np.array(edges, dtype=np.int64).reshape(-1, 2))
    if g.m != declared_m:
        warnings.warn(
            f"DIMACS header declares m={declared_m} but {g.m} distinct edges were parsed",
            DimacsWarning,
            stacklevel=2,
        )
    return g


def read_dimacs(path: str | os.PathLike) -> Graph:
    with open(path, "rb") as fh:
        return parse_dimacs(fh.read())


def format_graph(g: Graph) -> str:
    """Canonical text form: ``n m`` header, then ``u v`` per edge (0-based, u < v)."""
    buf = io.StringIO()
    buf.write(f"{g.n} {g.m}\n")
    if g.m:
        np.savetxt(buf, g.edges, fmt="%d")
    return buf.getvalue()


def parse_graph(text: str) -> Graph:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise GraphFormatError("empty graph file")
    try:
        n, m = (int(t) for t in lines[0].split())
    except ValueError:
        raise GraphFormatError("header must be 'n m'", 1) from None
    edges = np.zeros((len(lines) - 1, 2), dtype=np.int64)
    for i, ln in enumerate(lines[1:], start=2):
        parts = ln.split()
        if len(parts) != 2:
            raise GraphFormatError(f"expected 'u v', got {ln!r}", i)
        try:
            edges[i - 2] = (int(parts[0]), int(parts[1]))
        except ValueError:
            raise GraphFormatError(f"non-integer vertex in {ln!r}", i) from None
    if len(edges) != m:
        raise GraphFormatError(f"header declares {m} edges, file has {len(edges)}")
    return Graph.from_edges(n, edges)


def write_graph(g: Graph, path: str | os.PathLike) -> None:
    with open(path, "w") as fh:
        fh.write(format_graph(g))


def read_graph(path: str | os.PathLike) -> Graph:
    """Read a canonical graph file, or a DIMACS file if it starts like one."""
    with open(path, "rb") as fh:
        data = fh.read()
    text = data.decode("utf-8", errors="replace")
    first = next((ln.strip() for ln in text.splitlines() if ln.strip()), "")
    if first[:1] in ("c", "p"):
        return parse_dimacs(text)
    return parse_graph(text)


# ---------------------------------------------------------------------------
# linear actions and structure

def _check_dim(g: Graph, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim not in (1, 2) or x.shape[0] != g.n:
        raise ValueError(f"expected leading dimension {g.n}, got shape {x.shape}")
    return x


def adjacency_apply(g: Graph, x: np.ndarray) -> np.ndarray:
    """``A @ x``; accepts a vector or an ``(n, B)`` batch."""
    x = _check_dim(g, x)
    return g.adjacency @ x


def laplacian_apply(g: Graph, x: np.ndarray) -> np.ndarray:
    """``L @ x = D x - A x`` without forming ``L``."""
    x = _check_dim(g, x)
    deg = g.degrees.astype(np.float64)
    if x.ndim == 2:
        deg = deg[:, None]
    return deg * x - g.adjacency @ x


@dataclass(frozen=True)
class StrippedGraph:
    core: Graph
    removed: np.ndarray  # original ids of isolated vertices
    index_map: np.ndarray = field(repr=False)  # core id -> original id

    def __iter__(self):
        return iter((self.core, self.removed, self.index_map))


def strip_isolated(g: Graph) -> StrippedGraph:
    """Remove degree-0 vertices; ``index_map[i]`` is the original id of core vertex ``i``."""
    keep = np.flatnonzero(g.degrees > 0)
    removed = np.flatnonzero(g.degrees == 0)
    if removed.size == 0:
        return StrippedGraph(g, removed, np.arange(g.n, dtype=np.int64))
    return StrippedGraph(g.subgraph(keep), removed, keep)


def connected_components(g: Graph) -> list[np.ndarray]:
    """Vertex sets of the connected components, ordered by smallest member."""
    if g.n == 0:
        return []
    _, labels = _cc(g.adjacency, directed=False)
    order = np.argsort(labels, kind="stable")
    splits = np.flatnonzero(np.diff(labels[order])) + 1
    comps = np.split(order, splits)
    comps.sort(key=lambda c: c[0])
    return comps
