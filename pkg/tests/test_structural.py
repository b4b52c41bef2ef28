from __future__ import annotations

import numpy as np
import pytest
from conftest import trees
from hypothesis import given, settings
from oracles import brute_assignment

from treesim.structural import (
    child_parent_profile,
    match_moves,
    min_cost_assignment,
    structural_similarity,
)
from treesim.tree_core import GameTree, parse_tree


def test_profiles_worked_example(worked_trees):
    t1, t2 = worked_trees
    assert np.allclose(child_parent_profile(t1, "cont", 1).values, [1 / 6, 1 / 4, 2 / 3], atol=1e-12, rtol=0)
    assert np.allclose(child_parent_profile(t2, "cont", 1).values, [1 / 5, 1 / 5, 0], atol=1e-12, rtol=0)


def test_assignment_worked_example(worked_trees):
    p1 = child_parent_profile(worked_trees[0]).values
    p2 = child_parent_profile(worked_trees[1]).values
    a = min_cost_assignment(np.abs(p1[:, None] - p2[None, :]))
    assert a.total_cost == pytest.approx(41 / 60, abs=1e-12)
    # two pairings reach the optimum; the smaller pair list wins
    assert a.pairs == ((0, 2), (1, 0), (2, 1))


def test_structural_worked_example(worked_trees):
    assert structural_similarity(*worked_trees) == pytest.approx(1 - (41 / 60) / 3, abs=1e-12)


def test_assignment_matches_brute_force():
    rng = np.random.default_rng(2024)
    for _ in range(200):
        n, m = rng.integers(1, 7, size=2)
        cost = rng.random((n, m)).round(rng.integers(1, 4))  # rounding forces ties
        a = min_cost_assignment(cost)
        best, pairs = brute_assignment(cost.tolist())
        assert a.total_cost == pytest.approx(best, abs=1e-12)
        assert a.pairs == pairs


def test_assignment_dominates_random_bijections():
    rng = np.random.default_rng(5)
    cost = rng.random((8, 8))
    best = min_cost_assignment(cost).total_cost
    for _ in range(1000):
        perm = rng.permutation(8)
        assert best <= cost[np.arange(8), perm].sum() + 1e-12


def test_assignment_edge_cases():
    assert min_cost_assignment(np.zeros((0, 3))).pairs == ()
    assert min_cost_assignment(np.zeros((0, 0))).total_cost == 0.0
    eye = 1 - np.eye(4)
    a = min_cost_assignment(eye)
    assert a.pairs == tuple((i, i) for i in range(4)) and a.total_cost == 0.0
    with pytest.raises(ValueError):
        min_cost_assignment([[np.inf]])


def test_structural_childless_cases():
    three = parse_tree("(a b c)")
    assert structural_similarity(three, GameTree()) == 0.0
    assert structural_similarity(GameTree(), GameTree()) == 1.0
    assert structural_similarity(GameTree(reward=1.0), GameTree(reward=-1.0)) == 0.0


@settings(max_examples=500)
@given(trees(max_depth=3, max_children=4), trees(max_depth=3, max_children=4))
def test_structural_symmetric_in_range(a, b):
    s = structural_similarity(a, b)
    assert 0.0 <= s <= 1.0
    assert s == pytest.approx(structural_similarity(b, a), abs=1e-12)
    assert structural_similarity(a, a) == 1.0


def _rename(t: GameTree, f) -> GameTree:
    return GameTree(None if t.label is None else f(t.label), tuple(_rename(c, f) for c in t.children), t.reward)


@settings(max_examples=300)
@given(trees(max_depth=3, max_children=4), trees(max_depth=3, max_children=4))
def test_structural_ignores_label_identity(a, b):
    renamed = _rename(b, lambda s: "z" + s[::-1])
    assert structural_similarity(a, renamed) == pytest.approx(structural_similarity(a, b), abs=1e-12)


def test_match_self_gives_identical_pairs():
    t = parse_tree("(a(b(c) c(d)) b(a(e) d) c)")
    table = match_moves(t, t, depth=2)
    assert all(r.label1 == r.label2 for r in table.rows)
    assert sum(r.frequency for r in table.rows) == table.matched_pairs


def test_match_pairs_terminal_branches():
    # under each first move, the mating reply has an empty move set (profile 0)
    # and the other reply shares one move with its parent (profile 1/3); the
    # mating replies sit first in one tree and last in the other, so only the
    # assignment, not the tie-break, can pair them
    t1 = parse_tree("(a(m=1 p(m q)) b(m=1 r(m q)) c(m=1 s(m q)))")
    t2 = parse_tree("(d(e(y u) y=1) f(h(y u) y=1) g(k(y u) y=1))")
    table = match_moves(t1, t2, depth=2)
    assert table.rows[0].label1 == "m" and table.rows[0].label2 == "y"
    assert table.rows[0].frequency == 3
    assert sum(r.frequency for r in table.rows) == table.matched_pairs == 9


def test_match_top_k():
    t = parse_tree("(a(b) b(a))")
    full = match_moves(t, t, depth=2, top_k=10)
    assert [(r.label1, r.frequency) for r in full.rows] == [("a", 2), ("b", 2)]
    assert len(match_moves(t, t, depth=2, top_k=1).rows) == 1
    with pytest.raises(ValueError):
        match_moves(t, t, top_k=0)
