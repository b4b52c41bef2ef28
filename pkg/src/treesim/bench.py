"""Chess trap experiments: threshold analysis, structural sampling, move matching.

Also builds the synthetic trees used to compare the measures analytically.
"""
from __future__ import annotations

import csv
import json
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal
from functools import lru_cache
from pathlib import Path

import numpy as np

from .chessgame import (
    MOVE_CLASSES,
    ChessAdapter,
    Position,
    apply_move,
    cross_correlation,
    legal_moves,
    mate_in,
    move_class,
    parse_fen,
)
from .measures import sim_continuations, sim_sequences, sim_tree_edit
from .structural import MoveMatchTable, match_moves, structural_similarity
from .tree_core import GameTree, expand

ADAPTER = ChessAdapter()


@dataclass(frozen=True)
class Trap:
    name: str
    fen: str
    line: tuple[str, ...]  # tempting move first, ending in mate

    @property
    def tempting(self) -> str:
        return self.line[0]

    @property
    def winner(self) -> str:
        """Side that delivers mate: the one not to move at the root."""
        return "b" if self.fen.split()[1] == "w" else "w"


TRAPS: dict[str, Trap] = {
    t.name: t
    for t in (
        Trap("budapest", "rnbqk2r/pppp1ppp/8/2bPp1B1/2P1n3/8/PP2PPPP/RN1QKBNR w KQkq - 3 5", ("Bg5d8", "Bc5f2")),
        Trap("carokann", "r2qkb1r/pp2pppp/nnp1P3/4N2b/2P5/7P/PP1N1PP1/R1BQKB1R b KQkq - 2 10", ("Bh5d1", "Pe6f7")),
        Trap("kieninger", "r1b1k2r/ppppqppp/2n5/4n3/1bP2B2/P4N2/1P1NPPPP/R2QKB1R w KQkq - 0 8", ("Pa3b4", "Ne5d3")),
        Trap("legal", "r2qkbnr/ppp2ppp/2np4/4N3/2B1P1b1/2N5/PPPP1PPP/R1BQK2R b KQkq - 0 5", ("Bg4d1", "Bc4f7", "Ke8e7", "Nc3d5")),
    )
}

# pairings evaluated for move matching, in the order reported
TRAP_PAIRS: tuple[tuple[str, str], ...] = (
    ("legal", "budapest"),
    ("legal", "kieninger"),
    ("legal", "carokann"),
    ("budapest", "kieninger"),
    ("budapest", "carokann"),
    ("carokann", "kieninger"),
)

TABLE_MEASURES = ("cont", "seq", "edit", "corr")
DEFAULT_DEPTHS = {"cont": 1, "seq": 2, "edit": 2, "struct": 1}


# ---------------------------------------------------------------------------
# children and trap labels


def enumerate_children(root: Position, plies: int = 2) -> list[Position]:
    """Distinct positions exactly ``plies`` moves away, in label order of the moves.

    Positions equal up to the clock fields are kept once (first occurrence).
    """
    frontier = [root]
    for _ in range(plies):
        nxt = []
        for p in frontier:
            nxt.extend(apply_move(p, m) for m in legal_moves(p))
        frontier = nxt
    seen: set[str] = set()
    out = []
    for p in frontier:
        if p.key not in seen:
            seen.add(p.key)
            out.append(p)
    return out


def tempting_moves(root: Position, horizon: int = 4) -> tuple[str, ...]:
    """Root moves after which the opponent forces mate within ``horizon - 1`` plies."""
    mover = root.side_to_move
    out = []
    for m in legal_moves(root):
        res = mate_in(apply_move(root, m), horizon - 1)
        if res is not None and res.winner != mover:
            out.append(m.label)
    return tuple(out)


def classify_trap(child: Position, tempting: Sequence[str], winner: str, horizon: int = 4) -> bool:
    """Whether the trap is still set in ``child``.

    True when the victim (the side to move) is already mated, or when one of
    the ``tempting`` moves is still legal and still lets ``winner`` force
    mate within ``horizon`` plies counted from ``child`` (the tempting move
    included).
    """
    return _classify(child.fen, tuple(tempting), winner, horizon)


@lru_cache(maxsize=None)
def _classify(fen: str, tempting: tuple[str, ...], winner: str, horizon: int) -> bool:
    child = parse_fen(fen)
    if child.is_checkmate():
        return child.side_to_move != winner
    labels = {m.label for m in legal_moves(child)}
    for t in tempting:
        if t in labels:
            res = mate_in(apply_move(child, t), horizon - 1)
            if res is not None and res.winner == winner:
                return True
    return False


# ---------------------------------------------------------------------------
# threshold analysis


@dataclass(frozen=True)
class TrapScanRow:
    child_fen: str
    values: dict[str, float]
    is_trap: bool
    above_mean: dict[str, bool]


@dataclass(frozen=True)
class TrapScanSummary:
    measure: str
    rho: float
    fn_rate: float
    fp_rate: float
    n: int
    n_traps: int
    note: str = ""


def threshold_rates(values: Sequence[float], is_trap: Sequence[bool]) -> tuple[float, float, float, str]:
    """``(rho, fn_rate, fp_rate, note)`` with ``rho`` the mean; ties count as above."""
    if len(values) != len(is_trap):
        raise ValueError("values and trap flags differ in length")
    if not values:
        return math.nan, 0.0, 0.0, "empty sample"
    rho = math.fsum(values) / len(values)
    traps = [v for v, t in zip(values, is_trap) if t]
    others = [v for v, t in zip(values, is_trap) if not t]
    note = "" if traps else "no traps in sample"
    fn = sum(v < rho for v in traps) / len(traps) if traps else 0.0
    fp = sum(v >= rho for v in others) / len(others) if others else 0.0
    return rho, fn, fp, note


def _measure_values(root: Position, children: Sequence[Position], measures: Sequence[str], depths: dict) -> dict:
    need_tree = [m for m in measures if m != "corr"]
    out: dict[str, list[float]] = {m: [] for m in measures}
    # the structural measure looks one ply deeper than its base measure
    tree_depth = max([depths[m] + (m == "struct") for m in need_tree], default=1)
    root_tree = expand(ADAPTER, root, tree_depth) if need_tree else None
    for c in children:
        tree = expand(ADAPTER, c, tree_depth) if need_tree else None
        for m in measures:
            out[m].append(_one(m, root, c, root_tree, tree, depths[m]))
    return out


def _one(m: str, root: Position, child: Position, t_root, t_child, d: int) -> float:
    if m == "cont":
        return sim_continuations(t_root, t_child, d)
    if m == "seq":
        return sim_sequences(t_root, t_child, d)
    if m == "edit":
        return sim_tree_edit(t_root, t_child, d)
    if m == "struct":
        return structural_similarity(t_root, t_child, "cont", d)
    if m == "corr":
        return cross_correlation(root, child)
    raise ValueError(f"unknown measure {m!r}")


def trap_scan(
    root: Position,
    measures: Sequence[str] = TABLE_MEASURES,
    depths: dict | None = None,
    tempting: Sequence[str] | None = None,
    horizon: int = 4,
) -> tuple[list[TrapScanRow], list[TrapScanSummary]]:
    """Similarity of every two-ply child to ``root`` and mean-threshold error rates.

    ``tempting`` defaults to every root move that loses by force within
    ``horizon`` plies (see :func:`tempting_moves`).
    """
    depths = {**DEFAULT_DEPTHS, **(depths or {})}
    depths.setdefault("corr", 0)
    for m in measures:
        if m not in depths:
            raise ValueError(f"unknown measure {m!r}")
    if tempting is None:
        tempting = tempting_moves(root, horizon)
    winner = "b" if root.side_to_move == "w" else "w"
    children = enumerate_children(root)
    flags = [classify_trap(c, tempting, winner, horizon) for c in children]
    values = _measure_values(root, children, measures, depths)

    summaries, rhos = [], {}
    for m in measures:
        rho, fn, fp, note = threshold_rates(values[m], flags)
        rhos[m] = rho
        summaries.append(TrapScanSummary(m, rho, fn, fp, len(children), sum(flags), note))
    rows = [
        TrapScanRow(
            c.fen,
            {m: values[m][i] for m in measures},
            flags[i],
            {m: values[m][i] >= rhos[m] for m in measures},
        )
        for i, c in enumerate(children)
    ]
    return rows, summaries


def scan_trap(name: str, measures: Sequence[str] = TABLE_MEASURES, horizon: int = 4):
    trap = TRAPS[name]
    return trap_scan(parse_fen(trap.fen), measures, tempting=(trap.tempting,), horizon=horizon)


def write_scan_reports(name: str, rows: Sequence[TrapScanRow], summaries: Sequence[TrapScanSummary], out_dir) -> list[Path]:
    """One ``<name>_<measure>.csv`` plus ``<name>_<measure>.json`` per measure."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for s in summaries:
        path = out_dir / f"{name}_{s.measure}.csv"
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["fen", s.measure, "is_trap"])
            for r in rows:
                w.writerow([r.child_fen, format_value(r.values[s.measure]), int(r.is_trap)])
        jpath = out_dir / f"{name}_{s.measure}.json"
        jpath.write_text(json.dumps(summary_dict(s), indent=2) + "\n")
        written += [path, jpath]
    return written


def summary_dict(s: TrapScanSummary) -> dict:
    d = {
        "measure": s.measure,
        "rho": round_half_even(s.rho),
        "fn_rate": round_half_even(s.fn_rate),
        "fp_rate": round_half_even(s.fp_rate),
        "n": s.n,
    }
    if s.note:
        d["note"] = s.note
    return d


def round_half_even(x: float, places: int = 6) -> float:
    if math.isnan(x):
        return x
    return float(Decimal(repr(x)).quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_EVEN))


def format_value(x: float, places: int = 6) -> str:
    return str(Decimal(repr(float(x))).quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_EVEN))


# ---------------------------------------------------------------------------
# structural sampling


@dataclass(frozen=True)
class SamplingReport:
    seed: int
    proportions: tuple[float | None, ...]  # None marks a sample without traps
    mean: float


def structural_sampling(
    root: Position,
    sample_size: int = 40,
    repeats: int = 5,
    seed: int = 0,
    tempting: Sequence[str] | None = None,
    horizon: int = 4,
    d: int = 1,
) -> SamplingReport:
    """Share of sampled trap children at or above the sample's mean structural similarity."""
    children = enumerate_children(root)
    if len(children) < sample_size:
        raise ValueError(f"need at least {sample_size} children, found {len(children)}")
    if tempting is None:
        tempting = tempting_moves(root, horizon)
    winner = "b" if root.side_to_move == "w" else "w"
    root_tree = expand(ADAPTER, root, d + 1)
    streams = np.random.SeedSequence(seed).spawn(repeats)
    props: list[float | None] = []
    for ss in streams:
        rng = np.random.default_rng(ss)
        idx = sorted(rng.choice(len(children), size=sample_size, replace=False).tolist())
        sample = [children[i] for i in idx]
        vals = [structural_similarity(root_tree, expand(ADAPTER, c, d + 1), "cont", d) for c in sample]
        flags = [classify_trap(c, tempting, winner, horizon) for c in sample]
        rho = math.fsum(vals) / len(vals)
        trap_vals = [v for v, f in zip(vals, flags) if f]
        props.append(sum(v >= rho for v in trap_vals) / len(trap_vals) if trap_vals else None)
    kept = [p for p in props if p is not None]
    return SamplingReport(seed, tuple(props), math.fsum(kept) / len(kept) if kept else math.nan)


# ---------------------------------------------------------------------------
# move matching


@dataclass(frozen=True)
class MatchReportRow:
    label1: str
    label2: str
    frequency: int
    class1: str
    class2: str

    @property
    def equally_decisive(self) -> bool:
        # checks, mates and captures are decisive; quiet moves are not
        return (self.class1 == "quiet") == (self.class2 == "quiet")


@dataclass(frozen=True)
class MatchReport:
    rows: tuple[MatchReportRow, ...]
    table: MoveMatchTable = field(repr=False)

    @property
    def tally(self) -> int:
        return sum(r.equally_decisive for r in self.rows)


def _strongest(a: str, b: str) -> str:
    return a if MOVE_CLASSES.index(a) >= MOVE_CLASSES.index(b) else b


def move_match_report(p1: Position, p2: Position, top_k: int = 5, depth: int = 2, d: int = 1) -> MatchReport:
    """Top matched move pairs, each tagged with its most forcing class.

    A label can occur at several matched nodes; the class reported is the
    strongest one it has at any of them.
    """
    t1 = expand(ADAPTER, p1, depth + d)
    t2 = expand(ADAPTER, p2, depth + d)
    occurrences: dict[tuple[str, str], list] = {}

    def record(path1: tuple, path2: tuple) -> None:
        occurrences.setdefault((path1[-1], path2[-1]), []).append((path1, path2))

    table = match_moves(t1, t2, "cont", depth, None, d, on_match=record)
    rows = []
    for r in table.top(top_k):
        c1 = c2 = "quiet"
        for path1, path2 in occurrences[(r.label1, r.label2)]:
            c1 = _strongest(c1, _class_at(p1, path1))
            c2 = _strongest(c2, _class_at(p2, path2))
        rows.append(MatchReportRow(r.label1, r.label2, r.frequency, c1, c2))
    return MatchReport(tuple(rows), table)


def _class_at(root: Position, path: tuple[str, ...]) -> str:
    return _class_cached(root.fen, path)


@lru_cache(maxsize=None)
def _class_cached(fen: str, path: tuple[str, ...]) -> str:
    p = parse_fen(fen)
    for lab in path[:-1]:
        p = apply_move(p, lab)
    return move_class(p, path[-1])


# ---------------------------------------------------------------------------
# synthetic trees


def build_example1_family(b: int) -> tuple[GameTree, GameTree, GameTree, GameTree]:
    """Four synthetic trees over the moves ``m1..mb``, all of branching ``b``.

    T1 and T2 are full two-ply trees that differ in a single reply (``x`` in
    T1, ``y`` in T2).  T4 is the full two-ply tree; T3 equals T4 except that
    its first move ends the game at once (a win for the mover).
    """
    if isinstance(b, bool) or not isinstance(b, int) or b < 3:
        raise ValueError("branching factor must be an integer >= 3")
    moves = [f"m{i}" for i in range(1, b + 1)]

    def full(odd: str | None = None) -> GameTree:
        kids = []
        for i, m in enumerate(moves):
            replies = list(moves)
            if i == 0 and odd is not None:
                replies[-1] = odd
            kids.append(GameTree(m, tuple(GameTree(r) for r in replies)))
        return GameTree(None, tuple(kids))

    t1, t2, t4 = full("x"), full("y"), full()
    t3 = GameTree(None, (GameTree(moves[0], (), 1.0),) + t4.children[1:])
    return t1, t2, t3, t4


def example1_orderings(b: int) -> dict[str, bool]:
    t1, t2, t3, t4 = build_example1_family(b)
    cont12, seq12, tree12 = sim_continuations(t1, t2, 2), sim_sequences(t1, t2, 2), sim_tree_edit(t1, t2)
    cont34, seq34, tree34 = sim_continuations(t3, t4, 2), sim_sequences(t3, t4, 2), sim_tree_edit(t3, t4)
    return {
        "cont(T1,T2) < seq(T1,T2)": cont12 < seq12,
        "cont(T3,T4) > seq(T3,T4)": cont34 > seq34,
        "tree(T1,T2) > seq(T1,T2)": tree12 > seq12,
        "tree(T3,T4) < seq(T3,T4)": tree34 < seq34,
    }
