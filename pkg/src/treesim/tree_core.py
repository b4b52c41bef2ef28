"""Game-tree representation, expansion and the text fixture format.

Trees store the move on the node it leads to (``label``); the root has no
label.  Children are kept sorted by label so that two trees built from the
same positions compare equal regardless of the order in which moves were
generated.
"""
from __future__ import annotations

import re
from abc import ABC, abstractmethod
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from decimal import Decimal
from typing import Any

LABEL_RE = re.compile(r"[A-Za-z0-9_#+=\-]+")
_TOKEN_RE = re.compile(r"[A-Za-z0-9_#+=\-.]+")
_REWARD_TAIL_RE = re.compile(r"^(.*)=([+-]?\d+(?:\.\d+)?)$")
_ROOT_REWARD_RE = re.compile(r"=([+-]?\d+(?:\.\d+)?)")


class TreeSyntaxError(ValueError):
    """Raised by :func:`parse_tree`; ``offset`` is the byte offset of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at byte {offset}")
        self.offset = offset


class ExpansionError(ValueError):
    pass


@dataclass(frozen=True)
class GameTree:
    label: str | None = None
    children: tuple[GameTree, ...] = ()
    reward: float | None = None
    # extra token used only by the sequence measure (e.g. "xP" for a capture)
    annotation: str = ""

    def __post_init__(self):
        kids = tuple(sorted(self.children, key=_child_key))
        for a, b in zip(kids, kids[1:]):
            if a.label == b.label:
                raise ValueError(f"duplicate sibling move {a.label!r}")
        if kids and kids[0].label is None:
            raise ValueError("only the root may omit its move label")
        if self.reward is not None and kids:
            raise ValueError("a terminal node cannot have children")
        object.__setattr__(self, "children", kids)

    @property
    def is_terminal(self) -> bool:
        return self.reward is not None

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def child(self, label: str) -> GameTree:
        for c in self.children:
            if c.label == label:
                return c
        raise KeyError(label)

    def __repr__(self) -> str:
        return f"GameTree({serialize_tree(self)!r})"


def _child_key(t: GameTree) -> str:
    return "" if t.label is None else t.label


def check_depth(d: int) -> int:
    if isinstance(d, bool) or not isinstance(d, int) or d < 1:
        raise ValueError(f"depth must be a positive integer, got {d!r}")
    return d


def iter_nodes(t: GameTree) -> Iterator[GameTree]:
    stack = [t]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(node.children))


def node_count(t: GameTree) -> int:
    """Number of moves in the tree, i.e. every node except the root."""
    return sum(1 for _ in iter_nodes(t)) - 1


def height(t: GameTree) -> int:
    if not t.children:
        return 0
    return 1 + max(height(c) for c in t.children)


def truncate(t: GameTree, d: int) -> GameTree:
    """Copy of ``t`` cut to ``d`` plies below the root (``d`` may be 0)."""
    if d <= 0 or not t.children:
        if t.children:
            return GameTree(t.label, (), None, t.annotation)
        return t
    if height(t) <= d:
        return t
    return GameTree(t.label, tuple(truncate(c, d - 1) for c in t.children), t.reward, t.annotation)


def move_set(t: GameTree, d: int) -> frozenset[str]:
    check_depth(d)
    out: set[str] = set()
    frontier = [t]
    for _ in range(d):
        nxt = []
        for node in frontier:
            for c in node.children:
                out.add(c.label)
                nxt.append(c)
        frontier = nxt
    return frozenset(out)


def leaf_sequences(t: GameTree, d: int, annotated: bool = False) -> list[tuple[str, ...]]:
    """All root paths of length ``d``; paths that end earlier are kept at their length."""
    check_depth(d)
    out: list[tuple[str, ...]] = []

    def walk(node: GameTree, prefix: tuple[str, ...]) -> None:
        if len(prefix) == d or not node.children:
            if prefix:
                out.append(prefix)
            return
        for c in node.children:
            tok = c.label + c.annotation if annotated else c.label
            walk(c, prefix + (tok,))

    walk(t, ())
    return out


# ---------------------------------------------------------------------------
# expansion


class GameAdapter(ABC):
    """Rules of a two-player perfect-information game.

    ``legal_moves`` must return moves in a stable order for a given state.
    Rewards are reported from the point of view of the player to move at the
    root of the expansion and lie in ``reward_range``.
    """

    reward_range: tuple[float, float] = (-1.0, 1.0)

    @abstractmethod
    def initial_position(self) -> Any: ...

    @abstractmethod
    def legal_moves(self, state: Any) -> Sequence[Any]: ...

    @abstractmethod
    def apply(self, state: Any, move: Any) -> Any: ...

    @abstractmethod
    def move_label(self, state: Any, move: Any) -> str: ...

    @abstractmethod
    def terminal_reward(self, state: Any, root: Any) -> float:
        """Reward of a state with no legal moves, seen by the root's mover."""

    def move_annotation(self, state: Any, move: Any) -> str:
        return ""

    def validate(self, state: Any) -> None:
        """Raise ``ValueError`` if ``state`` is not a legal position."""


def expand(adapter: GameAdapter, position: Any, d: int) -> GameTree:
    """Full-width tree of every move sequence of length ``d`` from ``position``.

    States at the horizon are not examined, so only nodes above depth ``d``
    can come out terminal.
    """
    check_depth(d)
    try:
        adapter.validate(position)
    except ValueError as exc:
        raise ExpansionError(f"cannot expand illegal position: {exc}") from exc

    def grow(state: Any, label: str | None, ann: str, remaining: int) -> GameTree:
        moves = adapter.legal_moves(state)
        if not moves:
            return GameTree(label, (), float(adapter.terminal_reward(state, position)), ann)
        if remaining == 1:
            kids = [
                GameTree(adapter.move_label(state, m), annotation=adapter.move_annotation(state, m))
                for m in moves
            ]
        else:
            kids = [
                grow(
                    adapter.apply(state, m),
                    adapter.move_label(state, m),
                    adapter.move_annotation(state, m),
                    remaining - 1,
                )
                for m in moves
            ]
        return GameTree(label, tuple(kids), None, ann)

    return grow(position, None, "", d)


# ---------------------------------------------------------------------------
# text format
#
#   tree   := '(' entry* ')' ['=' reward]      (root reward: terminal root)
#   entry  := label ['=' reward] [tree-body]


def _fmt_reward(r: float) -> str:
    if float(r).is_integer():
        return str(int(r))
    return format(Decimal(repr(float(r))), "f")


def serialize_tree(t: GameTree) -> str:
    def body(node: GameTree) -> str:
        return "(" + " ".join(entry(c) for c in node.children) + ")"

    def entry(node: GameTree) -> str:
        lab = node.label
        if not LABEL_RE.fullmatch(lab) or _REWARD_TAIL_RE.match(lab):
            raise ValueError(f"label {lab!r} cannot be written in tree format")
        if node.reward is not None:
            return f"{lab}={_fmt_reward(node.reward)}"
        if node.children:
            return lab + body(node)
        return lab

    out = body(t)
    if t.reward is not None:
        out += "=" + _fmt_reward(t.reward)
    return out


def parse_tree(text: str) -> GameTree:
    data = text.encode("utf-8")
    src = data.decode("ascii", errors="replace")  # byte offsets == char offsets
    pos = 0
    n = len(src)

    def skip() -> None:
        nonlocal pos
        while pos < n and src[pos].isspace():
            pos += 1

    def split_reward(tok: str) -> tuple[str, float | None]:
        m = _REWARD_TAIL_RE.match(tok)
        if m is None:
            return tok, None
        return m.group(1), float(m.group(2))

    def parse_body(label: str | None, ann: str = "") -> GameTree:
        nonlocal pos
        if pos >= n or src[pos] != "(":
            raise TreeSyntaxError("expected '('", pos)
        pos += 1
        kids: list[GameTree] = []
        seen: dict[str, int] = {}
        while True:
            skip()
            if pos >= n:
                raise TreeSyntaxError("unterminated tree, expected ')'", pos)
            if src[pos] == ")":
                pos += 1
                break
            start = pos
            m = _TOKEN_RE.match(src, pos)
            if m is None:
                raise TreeSyntaxError(f"unexpected character {src[pos]!r}", pos)
            pos = m.end()
            lab, reward = split_reward(m.group(0))
            if not LABEL_RE.fullmatch(lab):
                raise TreeSyntaxError(f"bad move label {lab!r}", start)
            if lab in seen:
                raise TreeSyntaxError(f"duplicate sibling move {lab!r}", start)
            seen[lab] = start
            if pos < n and src[pos] == "(":
                if reward is not None:
                    raise TreeSyntaxError("terminal node cannot have children", pos)
                kids.append(parse_body(lab))
            else:
                kids.append(GameTree(lab, (), reward))
        reward = None
        if label is None and pos < n and src[pos] == "=":
            m = _ROOT_REWARD_RE.match(src, pos)
            if m is None:
                raise TreeSyntaxError("bad root reward", pos)
            reward = float(m.group(1))
            if kids:
                raise TreeSyntaxError("terminal root cannot have children", pos)
            pos = m.end()
        return GameTree(label, tuple(kids), reward, ann)

    skip()
    tree = parse_body(None)
    skip()
    if pos != n:
        raise TreeSyntaxError("trailing characters after tree", pos)
    return tree
