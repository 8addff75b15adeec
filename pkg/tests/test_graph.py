import warnings
from collections import deque

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mqo.graph import (
    DimacsWarning,
    Graph,
    GraphFormatError,
    GraphGenSpec,
    adjacency_apply,
    connected_components,
    er_probability,
    format_graph,
    generate,
    laplacian_apply,
    parse_dimacs,
    parse_graph,
    read_graph,
    strip_isolated,
    write_graph,
)

from helpers import complete, dense, edgeless, path, star


@st.composite
def small_graphs(draw, max_n=64):
    n = draw(st.integers(1, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), max_size=min(len(pairs), 200))) if pairs else []
    return Graph.from_edges(n, np.array(chosen, dtype=np.int64).reshape(-1, 2))


def assert_well_formed(g: Graph):
    a = dense(g)
    assert np.array_equal(a, a.T)
    assert np.all(np.diag(a) == 0)
    assert g.degrees.sum() == 2 * g.m
    assert g.max_degree == (g.degrees.max() if g.n else 0)
    for v in range(g.n):
        nb = g.neighbors(v)
        assert np.all(np.diff(nb) > 0)


# construction


def test_from_edges_dedups_reversed_pairs():
    g = Graph.from_edges(3, [(0, 1), (1, 0), (1, 2), (1, 2)])
    assert g.m == 2
    assert g.edges.tolist() == [[0, 1], [1, 2]]


def test_from_edges_rejects_self_loop():
    with pytest.raises(ValueError, match="self-loop"):
        Graph.from_edges(3, [(1, 1)])


def test_from_edges_rejects_out_of_range():
    with pytest.raises(ValueError):
        Graph.from_edges(3, [(0, 3)])


def test_graph_arrays_are_read_only():
    g = complete(3)
    with pytest.raises(ValueError):
        g.indices[0] = 2


@given(small_graphs())
@settings(max_examples=60, deadline=None)
def test_constructed_graphs_are_well_formed(g):
    assert_well_formed(g)


def test_subgraph_relabels_in_given_order():
    g = path(4)
    sub = g.subgraph([3, 2, 1])
    assert sub.edges.tolist() == [[0, 1], [1, 2]]


# generators


def test_er_p_one_is_complete():
    g = generate(GraphGenSpec("er", 4, p=1.0, seed=123))
    assert g == complete(4)
    assert g.m == 6


def test_er_is_deterministic_per_seed():
    a = generate(GraphGenSpec("er", 100, p=0.1, seed=5))
    b = generate(GraphGenSpec("er", 100, p=0.1, seed=5))
    c = generate(GraphGenSpec("er", 100, p=0.1, seed=6))
    assert np.array_equal(a.edges, b.edges)
    assert a.fingerprint == b.fingerprint
    assert a != c


def test_er_edge_count_near_binomial_mean():
    n, p = 400, 0.05
    pairs = n * (n - 1) // 2
    mean, sd = p * pairs, np.sqrt(pairs * p * (1 - p))
    for seed in range(5):
        g = generate(GraphGenSpec("er", n, p=p, seed=seed))
        assert abs(g.m - mean) <= 4 * sd


def test_sbm_edge_count_near_expectation():
    # two blocks of 50: within-block pairs 2 * C(50, 2), cross pairs 50 * 50
    within, cross = 2 * (50 * 49 // 2), 50 * 50
    mean = 0.5 * within + 0.05 * cross
    sd = np.sqrt(within * 0.25 + cross * 0.05 * 0.95)
    g = generate(GraphGenSpec("sbm", 100, k=2, p_in=0.5, p_out=0.05, seed=3))
    assert abs(g.m - mean) <= 4 * sd
    assert_well_formed(g)


def test_ba_attaches_m_edges_per_new_vertex():
    g = generate(GraphGenSpec("ba", 200, m_attach=3, seed=1))
    # networkx starts from a star on m+1 vertices, then adds m edges per vertex
    assert g.m == 3 + 3 * (200 - 4)
    assert g.degrees[4:].min() >= 3
    assert g.degrees.min() >= 1
    assert_well_formed(g)


def test_ba_is_deterministic():
    a = generate(GraphGenSpec("ba", 100, m_attach=2, seed=9))
    b = generate(GraphGenSpec("ba", 100, m_attach=2, seed=9))
    assert a == b


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(kind="er", n=10, p=1.5),
        dict(kind="er", n=10, p=-0.1),
        dict(kind="ba", n=5, m_attach=5),
        dict(kind="ba", n=5, m_attach=0),
        dict(kind="sbm", n=10, k=2, p_in=0.1, p_out=0.2),
        dict(kind="xx", n=10),
    ],
)
def test_invalid_generator_specs_raise(kwargs):
    with pytest.raises(ValueError):
        GraphGenSpec(**kwargs)


def test_er_probability_is_degree_over_n():
    assert er_probability(1000, 100) == pytest.approx(0.1)
    assert er_probability(10, 50) == 1.0


# DIMACS


def test_dimacs_triangle():
    g = parse_dimacs("c comment\np edge 3 3\ne 1 2\ne 2 3\ne 1 3\n")
    assert g == complete(3)


def test_dimacs_dedup_warns_on_declared_mismatch():
    with pytest.warns(DimacsWarning):
        g = parse_dimacs(b"p edge 3 2\ne 1 2\ne 2 1\n")
    assert (g.n, g.m) == (3, 1)


def test_dimacs_missing_header():
    with pytest.raises(GraphFormatError, match="missing 'p edge n m' header"):
        parse_dimacs("e 1 2\n")


@pytest.mark.parametrize(
    "text,lineno",
    [
        ("p edge 3 1\ne 1 4\n", 2),
        ("p edge 3 1\ne 1 x\n", 2),
        ("p edge 3 1\nc ok\ne 2 2\n", 3),
        ("p edge 3 1\nq 1 2\n", 2),
    ],
)
def test_dimacs_errors_carry_line_numbers(text, lineno):
    with pytest.raises(GraphFormatError) as info:
        parse_dimacs(text)
    assert info.value.lineno == lineno


def test_dimacs_keeps_declared_vertex_count():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        g = parse_dimacs("p edge 5 1\ne 1 2\n")
    assert g.n == 5


def test_canonical_round_trip(tmp_path):
    g = generate(GraphGenSpec("er", 30, p=0.2, seed=2))
    assert parse_graph(format_graph(g)) == g
    f = tmp_path / "g.txt"
    write_graph(g, f)
    assert read_graph(f) == g


def test_read_graph_detects_dimacs(tmp_path):
    f = tmp_path / "k3.col"
    f.write_text("p edge 3 3\ne 1 2\ne 2 3\ne 1 3\n")
    assert read_graph(f) == complete(3)


# linear actions


def test_adjacency_apply_triangle():
    assert adjacency_apply(complete(3), np.array([1.0, -1.0, -1.0])).tolist() == [-2.0, 0.0, 0.0]


def test_laplacian_apply_triangle():
    assert laplacian_apply(complete(3), np.array([1.0, -1.0, -1.0])).tolist() == [4.0, -2.0, -2.0]


def test_actions_of_zero_vector():
    g = generate(GraphGenSpec("er", 20, p=0.3, seed=0))
    assert not adjacency_apply(g, np.zeros(20)).any()
    assert not laplacian_apply(g, np.zeros(20)).any()


def test_actions_reject_wrong_dimension():
    with pytest.raises(ValueError):
        adjacency_apply(complete(3), np.ones(4))
    with pytest.raises(ValueError):
        laplacian_apply(complete(3), np.ones(2))


def test_adjacency_apply_matches_dense_er():
    g = generate(GraphGenSpec("er", 20, p=0.3, seed=11))
    x = np.random.default_rng(0).normal(size=20)
    np.testing.assert_allclose(adjacency_apply(g, x), dense(g) @ x, rtol=0, atol=1e-12)


@given(small_graphs(), st.integers(0, 2**32 - 1))
@settings(max_examples=60, deadline=None)
def test_actions_match_dense_oracle(g, seed):
    x = np.random.default_rng(seed).normal(size=g.n)
    a = dense(g)
    np.testing.assert_allclose(adjacency_apply(g, x), a @ x, atol=1e-12)
    lap = np.diag(a.sum(axis=1)) - a
    np.testing.assert_allclose(laplacian_apply(g, x), lap @ x, atol=1e-12)
    # compositional route
    np.testing.assert_allclose(laplacian_apply(g, x), g.degrees * x - adjacency_apply(g, x), atol=1e-12)


@given(small_graphs())
@settings(max_examples=60, deadline=None)
def test_laplacian_kills_ones_exactly(g):
    assert not laplacian_apply(g, np.ones(g.n)).any()


def test_laplacian_of_constant_vector_is_tiny():
    g = generate(GraphGenSpec("er", 100, p=0.66, seed=0))
    for c in (0.3, -0.77, 0.123456789):
        assert np.max(np.abs(laplacian_apply(g, np.full(100, c)))) < 1e-12


def test_batched_actions():
    g = generate(GraphGenSpec("er", 15, p=0.4, seed=4))
    x = np.random.default_rng(1).normal(size=(15, 3))
    np.testing.assert_allclose(laplacian_apply(g, x), (np.diag(g.degrees) - dense(g)) @ x, atol=1e-12)


# structure


def test_strip_isolated_single_edge():
    g = Graph.from_edges(3, [(0, 1)])
    core, removed, index_map = strip_isolated(g)
    assert core.n == 2 and core.m == 1
    assert removed.tolist() == [2]
    assert index_map.tolist() == [0, 1]


def test_strip_isolated_identity_when_none():
    core, removed, index_map = strip_isolated(complete(4))
    assert core == complete(4)
    assert removed.size == 0
    assert index_map.tolist() == [0, 1, 2, 3]


def test_strip_isolated_keeps_star_leaves():
    core, removed, _ = strip_isolated(star(3))
    assert removed.size == 0 and core.n == 4


def test_strip_isolated_map_restores_edges():
    g = Graph.from_edges(7, [(1, 4), (4, 6), (1, 6)])
    core, removed, index_map = strip_isolated(g)
    assert core.degrees.min() >= 1
    assert removed.tolist() == [0, 2, 3, 5]
    restored = {tuple(sorted((int(index_map[u]), int(index_map[v])))) for u, v in core.edges}
    assert restored == {(1, 4), (4, 6), (1, 6)}


def test_components_two_triangles():
    g = Graph.from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    comps = connected_components(g)
    assert [c.tolist() for c in comps] == [[0, 1, 2], [3, 4, 5]]


def test_components_edgeless():
    comps = connected_components(edgeless(5))
    assert [c.tolist() for c in comps] == [[0], [1], [2], [3], [4]]


def bfs_components(g: Graph) -> list[list[int]]:
    seen, out = set(), []
    for s in range(g.n):
        if s in seen:
            continue
        comp, queue = [], deque([s])
        seen.add(s)
        while queue:
            v = queue.popleft()
            comp.append(v)
            for u in g.neighbors(v):
                if int(u) not in seen:
                    seen.add(int(u))
                    queue.append(int(u))
        out.append(sorted(comp))
    return out


def test_components_connected_er_matches_bfs():
    g = generate(GraphGenSpec("er", 50, p=0.2, seed=1))
    comps = [c.tolist() for c in connected_components(g)]
    assert comps == bfs_components(g)
    assert len(comps) == 1


@given(small_graphs(max_n=40))
@settings(max_examples=60, deadline=None)
def test_components_match_bfs(g):
    comps = [sorted(c.tolist()) for c in connected_components(g)]
    assert comps == bfs_components(g)
