"""Chess positions, move labels and a forced-mate search.

Rules (move generation, legality, FEN) come from python-chess; this module
adds the position-independent move labels used by the similarity measures,
a :class:`~treesim.tree_core.GameAdapter`, the cross-correlation control and
a full-width mate prover.

Labels are ``<piece><from><to>[=<promo>]`` with the piece letter upper-case
for both colours, e.g. ``Bc4f7`` or ``Pe7e8=Q``.  Castling is the king's move
(``Ke1g1``).  Unlike SAN, a label never depends on what else is on the board,
so the same move gets the same label in different positions.
"""
from __future__ import annotations

import re
from collections.abc import Iterable
from dataclasses import dataclass
from functools import lru_cache

import chess

from .tree_core import GameAdapter

START_FEN = chess.STARTING_FEN
MAX_MATE_HORIZON = 6

_CASTLING_RE = re.compile(r"-|K?Q?k?q?")
_EP_RE = re.compile(r"-|[a-h][36]")

MOVE_CLASSES = ("quiet", "capture", "check", "mate")


class FenError(ValueError):
    """Malformed or illegal FEN; ``field`` names the offending part."""

    def __init__(self, field: str, message: str):
        super().__init__(f"invalid FEN {field}: {message}")
        self.field = field


class IllegalMoveError(ValueError):
    pass


@dataclass(frozen=True)
class ChessMove:
    piece: str  # upper-case kind letter of the moving piece
    from_square: str
    to_square: str
    promotion: str | None = None
    captured: str | None = None  # kind letter of the captured piece
    uci: str = ""

    @property
    def is_capture(self) -> bool:
        return self.captured is not None

    @property
    def label(self) -> str:
        promo = f"={self.promotion}" if self.promotion else ""
        return f"{self.piece}{self.from_square}{self.to_square}{promo}"

    @property
    def annotated_label(self) -> str:
        return self.label + capture_suffix(self.captured)


def capture_suffix(captured: str | None) -> str:
    return f"x{captured}" if captured else ""


def _label(board: chess.Board, move: chess.Move) -> str:
    piece = board.piece_type_at(move.from_square)
    out = chess.piece_symbol(piece).upper() + chess.SQUARE_NAMES[move.from_square] + chess.SQUARE_NAMES[move.to_square]
    if move.promotion:
        out += "=" + chess.piece_symbol(move.promotion).upper()
    return out


def _captured(board: chess.Board, move: chess.Move) -> str | None:
    if board.is_en_passant(move):
        return "P"
    if board.is_castling(move):
        return None  # python-chess encodes castling as king-takes-rook in chess960 only
    victim = board.piece_type_at(move.to_square)
    return chess.piece_symbol(victim).upper() if victim else None


class Position:
    """Immutable chess position.  Equality and hashing go through the FEN."""

    __slots__ = ("_board", "_fen")

    def __init__(self, board: chess.Board):
        self._board = board
        self._fen = board.fen(en_passant="fen")

    # construction --------------------------------------------------------
    @classmethod
    def from_fen(cls, text: str) -> Position:
        return parse_fen(text)

    @classmethod
    def start(cls) -> Position:
        return cls(chess.Board())

    # views ---------------------------------------------------------------
    @property
    def fen(self) -> str:
        return self._fen

    @property
    def side_to_move(self) -> str:
        return "w" if self._board.turn == chess.WHITE else "b"

    @property
    def key(self) -> str:
        """FEN without the two clock fields, with en passant only when capturable."""
        return " ".join(self._board.fen(en_passant="legal").split()[:4])

    def piece_at(self, square: str) -> str | None:
        p = self._board.piece_at(chess.parse_square(square))
        return p.symbol() if p else None

    def board(self) -> chess.Board:
        """A private copy of the underlying python-chess board."""
        return self._board.copy(stack=False)

    def is_checkmate(self) -> bool:
        return self._board.is_checkmate()

    def is_stalemate(self) -> bool:
        return self._board.is_stalemate()

    def is_check(self) -> bool:
        return self._board.is_check()

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Position) and self._fen == other._fen

    def __hash__(self) -> int:
        return hash(self._fen)

    def __repr__(self) -> str:
        return f"Position({self._fen!r})"


def parse_fen(text: str) -> Position:
    fields = text.split()
    if len(fields) != 6:
        raise FenError("record", f"expected 6 space-separated fields, got {len(fields)}")
    placement, side, castling, ep, half, full = fields
    if side not in ("w", "b"):
        raise FenError("side to move", f"expected 'w' or 'b', got {side!r}")
    if not _CASTLING_RE.fullmatch(castling) or castling == "":
        raise FenError("castling", f"bad castling field {castling!r}")
    if not _EP_RE.fullmatch(ep):
        raise FenError("en passant", f"bad en passant field {ep!r}")
    for name, value, low in (("halfmove clock", half, 0), ("fullmove number", full, 1)):
        if not value.isdigit() or int(value) < low:
            raise FenError(name, f"expected an integer >= {low}, got {value!r}")
    try:
        board = chess.Board(text)
    except ValueError as exc:
        raise FenError("piece placement", str(exc)) from None
    _check_status(board)
    return Position(board)


def _check_status(board: chess.Board) -> None:
    status = board.status()
    if status == chess.STATUS_VALID:
        return
    placement = (
        chess.STATUS_NO_WHITE_KING
        | chess.STATUS_NO_BLACK_KING
        | chess.STATUS_TOO_MANY_KINGS
        | chess.STATUS_TOO_MANY_WHITE_PAWNS
        | chess.STATUS_TOO_MANY_BLACK_PAWNS
        | chess.STATUS_PAWNS_ON_BACKRANK
        | chess.STATUS_TOO_MANY_WHITE_PIECES
        | chess.STATUS_TOO_MANY_BLACK_PIECES
        | chess.STATUS_EMPTY
    )
    if status & placement:
        raise FenError("piece placement", f"illegal piece configuration ({chess.Status(status & placement)!r})")
    if status & chess.STATUS_OPPOSITE_CHECK:
        raise FenError("side to move", "the side not to move is in check")
    if status & chess.STATUS_BAD_CASTLING_RIGHTS:
        raise FenError("castling", "castling rights do not match king and rook placement")
    if status & chess.STATUS_INVALID_EP_SQUARE:
        raise FenError("en passant", "no pawn could have just made a double step there")
    # remaining flags (impossible check geometry and the like) are board-level
    raise FenError("piece placement", f"unreachable position ({chess.Status(status)!r})")


def to_fen(p: Position) -> str:
    return p.fen


# ---------------------------------------------------------------------------
# moves


def _to_move(board: chess.Board, m: chess.Move) -> ChessMove:
    return ChessMove(
        piece=chess.piece_symbol(board.piece_type_at(m.from_square)).upper(),
        from_square=chess.SQUARE_NAMES[m.from_square],
        to_square=chess.SQUARE_NAMES[m.to_square],
        promotion=chess.piece_symbol(m.promotion).upper() if m.promotion else None,
        captured=_captured(board, m),
        uci=m.uci(),
    )


def legal_moves(p: Position) -> list[ChessMove]:
    """Every legal move, sorted by label."""
    board = p._board
    return sorted((_to_move(board, m) for m in board.legal_moves), key=lambda mv: mv.label)


def _resolve(board: chess.Board, move: ChessMove | str) -> chess.Move:
    token = move.uci if isinstance(move, ChessMove) else move
    for m in board.legal_moves:
        if m.uci() == token or _label(board, m) == token:
            return m
    raise IllegalMoveError(f"{token!r} is not legal in {board.fen()}")


def apply_move(p: Position, move: ChessMove | str) -> Position:
    """Play ``move`` (a :class:`ChessMove`, a label or a UCI string)."""
    board = p.board()
    board.push(_resolve(board, move))
    return Position(board)


def play_line(p: Position, moves: Iterable[ChessMove | str]) -> Position:
    for m in moves:
        p = apply_move(p, m)
    return p


def move_class(p: Position, move: ChessMove | str) -> str:
    """Most forcing class of ``move``: mate > check > capture > quiet."""
    board = p.board()
    m = _resolve(board, move)
    capture = board.is_capture(m)
    if board.gives_check(m):
        board.push(m)
        return "mate" if board.is_checkmate() else "check"
    return "capture" if capture else "quiet"


def perft(p: Position, depth: int) -> int:
    board = p.board()

    def count(d: int) -> int:
        if d == 1:
            return board.legal_moves.count()
        total = 0
        for m in list(board.legal_moves):
            board.push(m)
            total += count(d - 1)
            board.pop()
        return total

    if depth < 0:
        raise ValueError("perft depth must be non-negative")
    return 1 if depth == 0 else count(depth)


def cross_correlation(p1: Position, p2: Position) -> float:
    """``1 - k/64`` where ``k`` counts squares whose content differs."""
    b1, b2 = p1._board, p2._board
    diff = sum(b1.piece_at(s) != b2.piece_at(s) for s in chess.SQUARES)
    return 1.0 - diff / 64


# ---------------------------------------------------------------------------
# mate search


@dataclass(frozen=True)
class MateResult:
    winner: str  # "w" or "b"
    plies: int


def _side(color: chess.Color) -> str:
    return "w" if color == chess.WHITE else "b"


def _mates_now(board: chess.Board) -> bool:
    # a mating move always gives check, which prunes most candidates
    for m in board.legal_moves:
        if board.gives_check(m):
            board.push(m)
            done = board.is_checkmate()
            board.pop()
            if done:
                return True
    return False


def _wins(board: chess.Board, n: int) -> bool:
    """Side to move can force mate within ``n`` plies (``n`` odd)."""
    if n < 1:
        return False
    if n == 1:
        return _mates_now(board)
    for m in list(board.legal_moves):
        board.push(m)
        ok = _loses(board, n - 1)
        board.pop()
        if ok:
            return True
    return False


def _loses(board: chess.Board, n: int) -> bool:
    """Side to move is mated now or within ``n`` plies whatever it plays."""
    if board.is_checkmate():
        return True
    if n < 2:
        return False
    moves = list(board.legal_moves)
    if not moves:
        return False
    for m in moves:
        board.push(m)
        ok = _wins(board, n - 1)
        board.pop()
        if not ok:
            return False
    return True


def mate_in(p: Position, horizon: int) -> MateResult | None:
    """Shortest forced mate within ``horizon`` plies, found by full-width search."""
    if isinstance(horizon, bool) or not isinstance(horizon, int) or not 0 <= horizon <= MAX_MATE_HORIZON:
        raise ValueError(f"horizon must be an integer in [0, {MAX_MATE_HORIZON}], got {horizon!r}")
    return _mate_in(p.fen, horizon)


@lru_cache(maxsize=65536)
def _mate_in(fen: str, horizon: int) -> MateResult | None:
    board = chess.Board(fen)
    stm = board.turn
    for n in range(horizon + 1):
        if n % 2:
            if _wins(board, n):
                return MateResult(_side(stm), n)
        elif _loses(board, n):
            return MateResult(_side(not stm), n)
    return None


# ---------------------------------------------------------------------------
# adapter


class ChessAdapter(GameAdapter):
    """Expands :class:`Position` values; moves are python-chess ``Move`` objects."""

    reward_range = (-1.0, 1.0)

    def initial_position(self) -> Position:
        return Position.start()

    def legal_moves(self, state: Position) -> list[chess.Move]:
        board = state._board
        return sorted(board.legal_moves, key=lambda m: _label(board, m))

    def apply(self, state: Position, move: chess.Move) -> Position:
        board = state._board.copy(stack=False)
        board.push(move)
        return Position(board)

    def move_label(self, state: Position, move: chess.Move) -> str:
        return _label(state._board, move)

    def move_annotation(self, state: Position, move: chess.Move) -> str:
        return capture_suffix(_captured(state._board, move))

    def terminal_reward(self, state: Position, root: Position) -> float:
        board = state._board
        if board.is_checkmate():
            return -1.0 if board.turn == root._board.turn else 1.0
        return 0.0

    def validate(self, state: Position) -> None:
        if not isinstance(state, Position):
            raise ValueError(f"expected a Position, got {type(state).__name__}")
        _check_status(state._board)
