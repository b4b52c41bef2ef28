"""Label-agnostic structural similarity and cross-position move matching.

Each node is summarised by how similar each of its children is to it (its
child-parent profile).  Two nodes are compared by pairing their children so
that matched profile values are as close as possible; moves that end up
paired are treated as playing the same strategic role.
"""
from __future__ import annotations

from collections import Counter
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .measures import Measure, _degenerate, get_measure
from .tree_core import GameTree, check_depth

_TIE_TOL = 1e-9


@dataclass(frozen=True)
class Assignment:
    pairs: tuple[tuple[int, int], ...]
    total_cost: float


@dataclass(frozen=True)
class Profile:
    labels: tuple[str, ...]
    values: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.labels)


def _resolve(measure: str | Measure) -> Measure:
    return get_measure(measure) if isinstance(measure, str) else measure


def child_parent_profile(t: GameTree, measure: str | Measure = "cont", d: int = 1) -> Profile:
    check_depth(d)
    fn = _resolve(measure)
    vals = np.array([fn(t, c, d) for c in t.children], dtype=float)
    return Profile(tuple(c.label for c in t.children), vals)


def _optimum(cost: np.ndarray) -> float:
    if cost.size == 0:
        return 0.0
    r, c = linear_sum_assignment(cost)
    return float(cost[r, c].sum())


def min_cost_assignment(cost) -> Assignment:
    """Minimum-cost pairing of ``min(rows, cols)`` rows with distinct columns.

    Among optimal pairings the lexicographically smallest list of
    ``(row, col)`` pairs is returned; costs within ``1e-9`` (relative) of the
    optimum count as optimal so the choice does not hinge on rounding noise.
    """
    cost = np.asarray(cost, dtype=float)
    if cost.ndim != 2:
        raise ValueError("cost must be a 2-D matrix")
    if not np.all(np.isfinite(cost)):
        raise ValueError("cost entries must be finite")
    n, m = cost.shape
    k = min(n, m)
    if k == 0:
        return Assignment((), 0.0)
    best = _optimum(cost)
    tol = _TIE_TOL * max(1.0, abs(best))

    pairs: list[tuple[int, int]] = []
    spent = 0.0
    free_cols = list(range(m))
    for i in range(n):
        need = k - len(pairs)
        if need == 0:
            break
        later = list(range(i + 1, n))
        # the sub-problem always pairs exactly need - 1 more rows; if no
        # column keeps the optimum, row i stays unmatched
        for j in free_cols:
            rest_cols = [c for c in free_cols if c != j]
            rest = _optimum(cost[np.ix_(later, rest_cols)]) if need > 1 else 0.0
            if spent + cost[i, j] + rest <= best + tol:
                pairs.append((i, j))
                spent += cost[i, j]
                free_cols = rest_cols
                break
    total = float(sum(cost[i, j] for i, j in pairs))
    return Assignment(tuple(pairs), total)


def _assignment_from_profiles(p1: Profile, p2: Profile) -> Assignment:
    cost = np.abs(p1.values[:, None] - p2.values[None, :])
    return min_cost_assignment(cost)


def structural_similarity(t1: GameTree, t2: GameTree, measure: str | Measure = "cont", d: int = 1) -> float:
    c1, c2 = len(t1.children), len(t2.children)
    if c1 == 0 and c2 == 0:
        return _degenerate(t1, t2)
    p1 = child_parent_profile(t1, measure, d)
    p2 = child_parent_profile(t2, measure, d)
    a = _assignment_from_profiles(p1, p2)
    value = 1.0 - (abs(c1 - c2) + a.total_cost) / max(c1, c2)
    return min(1.0, max(0.0, value))


# ---------------------------------------------------------------------------
# move matching


@dataclass(frozen=True)
class MatchRow:
    label1: str
    label2: str
    frequency: int


@dataclass(frozen=True)
class MoveMatchTable:
    rows: tuple[MatchRow, ...]
    matched_pairs: int  # node pairs matched over all levels

    def top(self, k: int) -> tuple[MatchRow, ...]:
        return self.rows[:k]


def match_moves(
    t1: GameTree,
    t2: GameTree,
    measure: str | Measure = "cont",
    depth: int = 2,
    top_k: int | None = None,
    d: int = 1,
    on_match: Callable[[tuple[str, ...], tuple[str, ...]], None] | None = None,
) -> MoveMatchTable:
    """Pair moves of two trees level by level and count how often each label pair occurs.

    ``t1`` and ``t2`` must be expanded to ``depth + d`` plies.  ``on_match``
    is called with the two move paths of every matched node pair.
    """
    check_depth(depth)
    fn = _resolve(measure)
    counts: Counter = Counter()
    total = 0

    def walk(n1: GameTree, n2: GameTree, path1: tuple, path2: tuple, level: int) -> None:
        nonlocal total
        if not n1.children or not n2.children:
            return
        a = _assignment_from_profiles(child_parent_profile(n1, fn, d), child_parent_profile(n2, fn, d))
        for i, j in a.pairs:
            c1, c2 = n1.children[i], n2.children[j]
            counts[(c1.label, c2.label)] += 1
            total += 1
            p1, p2 = path1 + (c1.label,), path2 + (c2.label,)
            if on_match is not None:
                on_match(p1, p2)
            if level < depth:
                walk(c1, c2, p1, p2, level + 1)

    walk(t1, t2, (), (), 1)
    rows = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    if top_k is not None:
        if top_k < 1:
            raise ValueError("top_k must be positive")
        rows = rows[:top_k]
    return MoveMatchTable(tuple(MatchRow(a, b, f) for (a, b), f in rows), total)
