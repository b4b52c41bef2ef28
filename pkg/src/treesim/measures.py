"""Pairwise similarity of game trees.

Three move-based measures (continuations, sequences, tree edit) and the
reward-based measure used when two positions are both terminal.  Every
measure returns a float in [0, 1] with 1 meaning identical.
"""
from __future__ import annotations

from collections import Counter
from collections.abc import Callable

from .ted import tree_edit_distance
from .tree_core import GameTree, check_depth, leaf_sequences, move_set, node_count, truncate

DEFAULT_REWARD_RANGE = (-1.0, 1.0)

SimplifiedTree = Counter  # sorted move tuple -> multiplicity


def sim_terminal(r1: float, r2: float, s0: float = -1.0, s1: float = 1.0) -> float:
    if not s0 < s1:
        raise ValueError(f"reward range must satisfy s0 < s1, got [{s0}, {s1}]")
    for r in (r1, r2):
        if not s0 <= r <= s1:
            raise ValueError(f"reward {r} outside [{s0}, {s1}]")
    return 1.0 - abs(r2 - r1) / abs(s1 - s0)


def _degenerate(t1: GameTree, t2: GameTree, reward_range=DEFAULT_REWARD_RANGE) -> float:
    # two childless roots: only rewards can tell them apart
    if t1.is_terminal and t2.is_terminal:
        return sim_terminal(t1.reward, t2.reward, *reward_range)
    return 1.0


def sim_continuations(t1: GameTree, t2: GameTree, d: int = 1) -> float:
    """Jaccard index of the move sets reachable within ``d`` plies."""
    m1, m2 = move_set(t1, d), move_set(t2, d)
    union = m1 | m2
    if not union:
        return _degenerate(t1, t2)
    return len(m1 & m2) / len(union)


def simplify_tree(t: GameTree, d: int, annotated: bool = True) -> SimplifiedTree:
    """Collapse move sequences equal up to permutation, counting how many map to each.

    With ``annotated`` the node annotations (capture markers for chess) are
    folded into the moves before sorting.
    """
    return Counter(tuple(sorted(seq)) for seq in leaf_sequences(t, d, annotated=annotated))


def sim_sequences(t1: GameTree, t2: GameTree, d: int = 2, annotated: bool = True) -> float:
    s1, s2 = simplify_tree(t1, d, annotated), simplify_tree(t2, d, annotated)
    total = sum(s1.values()) + sum(s2.values())
    if total == 0:
        return _degenerate(t1, t2)
    shared = sum(s1[k] + s2[k] for k in s1.keys() & s2.keys())
    return shared / total


def sim_tree_edit(t1: GameTree, t2: GameTree, d: int | None = None, ordered: bool = False) -> float:
    """``1 - 2e / (|T1| + |T2| + e)``, counting moves (non-root nodes) as size.

    ``e`` is the unordered edit distance unless ``ordered`` is set.
    """
    if d is not None:
        check_depth(d)
        t1, t2 = truncate(t1, d), truncate(t2, d)
    e = tree_edit_distance(t1, t2, ordered=ordered)
    denom = node_count(t1) + node_count(t2) + e
    if denom == 0:
        return _degenerate(t1, t2)
    return 1.0 - 2.0 * e / denom


Measure = Callable[[GameTree, GameTree, int], float]

MEASURES: dict[str, Measure] = {
    "cont": sim_continuations,
    "seq": sim_sequences,
    "edit": sim_tree_edit,
}


def get_measure(name: str) -> Measure:
    try:
        return MEASURES[name]
    except KeyError:
        raise ValueError(f"unknown measure {name!r}; expected one of {sorted(MEASURES)}") from None
