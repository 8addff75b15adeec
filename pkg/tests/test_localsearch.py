import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mqo.graph import GraphGenSpec, generate
from mqo.localsearch import (
    GainTable,
    RepairKind,
    TightnessTable,
    detect_repairable,
    greedy_maximalize,
    one_flip_pass,
    one_two_flip,
    one_two_swap,
    repair_independent,
    two_flip_pass,
)
from mqo.objectives import Solution, is_independent, is_maximal_independent
from mqo.oracle import naive_flip_gains, naive_pair_gains

from helpers import complete, cut_of, cycle, dense, path, petersen, star


def er(n, p, seed):
    return generate(GraphGenSpec("er", n, p=p, seed=seed))


def brute_swap_exists(g, mask) -> bool:
    # any I - v + {u, w} that is still independent
    members = np.flatnonzero(mask)
    outside = np.flatnonzero(~mask)
    for v in members:
        for u, w in itertools.combinations(outside, 2):
            trial = mask.copy()
            trial[v] = False
            trial[u] = trial[w] = True
            if is_independent(g, trial):
                return True
    return False


# MIS


def test_greedy_maximalize_prefers_low_degree():
    g = star(4)
    assert np.flatnonzero(greedy_maximalize(g, [])).tolist() == [1, 2, 3, 4]


def test_greedy_keeps_existing_members():
    g = path(5)
    mask = greedy_maximalize(g, [1])
    assert mask[1]
    assert is_maximal_independent(g, mask)


def test_repair_drops_conflicts_then_fills():
    g = complete(4)
    mask = repair_independent(g, np.ones(4, dtype=bool))
    assert mask.sum() == 1


def test_swap_on_star_center():
    g = star(3)
    sol = one_two_swap(g, np.array([True, False, False, False]))
    assert sol.score == 3
    assert sol.members.tolist() == [1, 2, 3]


def test_p5_inner_pair_has_no_one_two_swap():
    # the middle vertex touches both members, so neither member has two 1-tight neighbors;
    # reaching {0, 2, 4} takes a (2,3)-swap
    g = path(5)
    mask = np.array([False, True, False, True, False])
    assert not brute_swap_exists(g, mask)
    assert detect_repairable(g, mask, "one_two_swap") is None
    assert one_two_swap(g, mask).score == 2


def test_swap_on_star_k14():
    g = star(4)
    w = detect_repairable(g, np.array([True, False, False, False, False]), RepairKind.ONE_TWO_SWAP)
    assert w is not None and w.vertices[0] == 0
    assert one_two_swap(g, [0]).score == 4


def test_petersen_optimum_has_no_swap():
    g = petersen()
    # outer 0, 2 and inner 8, 9 are pairwise non-adjacent
    mask = np.zeros(10, dtype=bool)
    mask[[0, 2, 8, 9]] = True
    assert is_maximal_independent(g, mask)
    assert detect_repairable(g, mask, "one_two_swap") is None


def test_swap_on_c5_is_stuck_at_two():
    g = cycle(5)
    assert detect_repairable(g, np.array([1, 0, 1, 0, 0], dtype=bool), "one_two_swap") is None
    assert one_two_swap(g, [0, 2]).score == 2


def test_swap_requires_maximal_independent_input():
    with pytest.raises(ValueError):
        one_two_swap(path(3), [0, 1])
    with pytest.raises(ValueError):
        one_two_swap(path(5), [0])


def test_swap_witness_on_petersen():
    g = petersen()
    # 0 and 2 on the outer ring, plus inner 8: maximal? verify then improve to 4
    mask = greedy_maximalize(g, [0])
    sol = one_two_swap(g, mask)
    assert sol.score >= mask.sum()
    assert is_maximal_independent(g, sol.mask)
    assert not brute_swap_exists(g, sol.mask)


@given(st.integers(2, 40), st.floats(0.05, 0.6), st.integers(0, 2**32 - 1))
@settings(max_examples=60, deadline=None)
def test_mis_local_search_invariants(n, p, seed):
    g = er(n, p, seed)
    rng = np.random.default_rng(seed)
    raw = rng.random(n) < 0.5
    repaired = repair_independent(g, raw)
    assert is_maximal_independent(g, repaired)
    sol = one_two_swap(g, repaired)
    assert sol.score >= repaired.sum()
    assert is_maximal_independent(g, sol.mask)
    if n <= 18:
        assert not brute_swap_exists(g, sol.mask)
    assert detect_repairable(g, sol, RepairKind.ONE_TWO_SWAP) is None


def test_swap_detector_agrees_with_brute_force():
    rng = np.random.default_rng(3)
    for seed in range(30):
        g = er(10, 0.35, seed)
        mask = repair_independent(g, rng.random(10) < 0.5)
        w = detect_repairable(g, mask, "one_two_swap")
        assert (w is not None) == brute_swap_exists(g, mask)
        if w is not None:
            v, u, x = w.vertices
            trial = mask.copy()
            trial[v] = False
            trial[u] = trial[x] = True
            assert is_independent(g, trial)


def test_tightness_table_tracks_counts():
    g = er(20, 0.3, 1)
    mask = repair_independent(g, np.zeros(20, dtype=bool))
    t = TightnessTable(g, mask)
    np.testing.assert_array_equal(t.count, dense(g) @ mask)
    v = int(np.flatnonzero(mask)[0])
    t.remove(v)
    mask[v] = False
    np.testing.assert_array_equal(t.count, dense(g) @ mask)


# MaxCut


def test_one_flip_on_triangle():
    g = complete(3)
    sol = one_flip_pass(g, np.ones(3))
    assert sol.score == 2


def test_one_flip_reaches_bipartition_of_even_cycle_from_alternating_pairs():
    g = cycle(4)
    # sides (+,+,-,-): every vertex has one same-side neighbor, zero gain, so nothing moves
    sol = one_flip_pass(g, np.array([1, 1, -1, -1]))
    assert sol.score == 2
    assert detect_repairable(g, sol, "one_flip") is None


def test_two_flip_gain_on_a_stuck_state():
    g = cycle(4)
    side = np.array([True, True, False, False])
    w = detect_repairable(g, side, RepairKind.TWO_FLIP)
    assert w is not None and w.gain == 2
    sol = two_flip_pass(g, side)
    assert sol.score == 4


def test_pair_gain_worked_example():
    # edge (0, 1) on opposite sides; flipping both keeps it cut and switches edge (1, 2)
    g = path(4)
    side = np.array([True, False, False, True])
    t = GainTable(g, side)
    assert t.pair_gain(0, 1) == naive_pair_gains(g, side)[(0, 1)] == 1


def test_two_flip_on_p3_optimum_is_unchanged():
    g = path(3)
    side = np.array([False, True, False])
    assert two_flip_pass(g, side).mask.tolist() == side.tolist()


def test_two_flip_witness_found_on_six_vertex_graph():
    # search random 6-vertex graphs for a 1-flip irreparable but 2-flip repairable state
    found = 0
    for seed in range(200):
        g = er(6, 0.5, seed)
        for code in range(1 << 6):
            side = np.array([(code >> v) & 1 for v in range(6)], dtype=bool)
            if np.any(naive_flip_gains(g, side) > 0):
                continue
            pairs = naive_pair_gains(g, side)
            if any(gain > 0 for gain in pairs.values()):
                w = detect_repairable(g, side, "two_flip")
                assert w is not None and w.gain == pairs[w.vertices]
                after = two_flip_pass(g, side)
                assert after.score >= cut_of(g, side) + w.gain
                found += 1
    assert found > 0


@given(st.integers(2, 30), st.floats(0.05, 0.8), st.integers(0, 2**32 - 1))
@settings(max_examples=60, deadline=None)
def test_gain_table_matches_recomputed_gains(n, p, seed):
    g = er(n, p, seed)
    rng = np.random.default_rng(seed)
    side = rng.random(n) < 0.5
    t = GainTable(g, side)
    np.testing.assert_array_equal(t.gain, naive_flip_gains(g, side))
    for (u, v), gain in naive_pair_gains(g, side).items():
        assert t.pair_gain(u, v) == gain
    # incremental updates stay consistent
    for v in rng.integers(0, n, size=10):
        t.flip(int(v))
        side[v] = not side[v]
        np.testing.assert_array_equal(t.gain, naive_flip_gains(g, side))
        np.testing.assert_array_equal(t.side, side)


@given(st.integers(2, 40), st.floats(0.05, 0.8), st.integers(0, 2**32 - 1))
@settings(max_examples=60, deadline=None)
def test_maxcut_local_search_invariants(n, p, seed):
    g = er(n, p, seed)
    side = np.random.default_rng(seed).random(n) < 0.5
    start = cut_of(g, side)
    a = one_flip_pass(g, side)
    assert a.score >= start and a.score == cut_of(g, a.mask)
    assert np.all(naive_flip_gains(g, a.mask) <= 0)
    b = one_two_flip(g, side)
    assert b.score >= start and b.score == cut_of(g, b.mask)
    assert np.all(naive_flip_gains(g, b.mask) <= 0)
    assert all(gain <= 0 for gain in naive_pair_gains(g, b.mask).values())
    assert detect_repairable(g, b, "one_flip") is None
    assert detect_repairable(g, b, "two_flip") is None


def test_local_search_accepts_pm1_vectors_and_solutions():
    g = cycle(5)
    x = np.array([1, -1, 1, -1, 1])
    assert one_flip_pass(g, x) == one_flip_pass(g, x > 0)
    sol = Solution.cut(g, x > 0)
    assert one_two_flip(g, sol).score == 4


def test_detector_rejects_wrong_problem():
    g = cycle(5)
    with pytest.raises(ValueError):
        detect_repairable(g, Solution.cut(g, [0]), "one_two_swap")
    with pytest.raises(ValueError):
        detect_repairable(g, Solution.independent_set(g, [0]), "one_flip")
