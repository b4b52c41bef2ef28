"""``treesim`` command line.

Exit codes: 0 success, 1 a checked property failed (``example1``),
2 usage or parse error, 3 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from . import bench
from .chessgame import ChessAdapter, FenError, Position, cross_correlation, parse_fen, perft
from .measures import get_measure
from .structural import structural_similarity
from .tree_core import ExpansionError, GameTree, TreeSyntaxError, expand, parse_tree

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3
MEASURE_CHOICES = ("cont", "seq", "edit", "struct", "corr")
FORMATS = ("text", "json", "csv")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class CliConfig:
    command: str
    measures: tuple[str, ...]
    depth: int | None
    horizon: int
    seed: int
    input_kind: str
    out: str | None
    fmt: str
    top_k: int


def _config(ns: argparse.Namespace) -> CliConfig:
    measures = tuple(m for chunk in (ns.measure or []) for m in chunk.split(",") if m)
    for m in measures:
        if m not in MEASURE_CHOICES:
            raise UsageError(f"unknown measure {m!r}; expected one of {', '.join(MEASURE_CHOICES)}")
    if ns.depth is not None and ns.depth < 1:
        raise UsageError("--depth must be >= 1")
    if ns.horizon not in (2, 4, 6):
        raise UsageError("--horizon must be 2, 4 or 6")
    if ns.top_k < 1:
        raise UsageError("--top-k must be >= 1")
    return CliConfig(ns.command, measures, ns.depth, ns.horizon, ns.seed, ns.input, ns.out, ns.format, ns.top_k)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--measure", action="append", help="cont, seq, edit, struct or corr (comma list or repeat)")
    common.add_argument("--depth", type=int, default=None, help="plies used by the measure")
    common.add_argument("--horizon", type=int, default=4, help="mate-search horizon for trap labels (2, 4 or 6)")
    common.add_argument("--seed", type=int, default=0, help="seed for sampled reports")
    common.add_argument("--input", choices=("fen", "tree"), default="fen", help="how positional arguments are read")
    common.add_argument("--out", default=None, help="output file (compare, match-moves) or directory (trap-scan)")
    common.add_argument("--format", choices=FORMATS, default="text")
    common.add_argument("--top-k", type=int, default=5)

    p = argparse.ArgumentParser(prog="treesim", description="Game-tree similarity of chess positions and tree fixtures.")
    sub = p.add_subparsers(dest="command", required=True)
    c = sub.add_parser("compare", parents=[common], help="similarity of two positions or tree files")
    c.add_argument("a")
    c.add_argument("b")
    t = sub.add_parser("trap-scan", parents=[common], help="threshold analysis over all two-ply children")
    t.add_argument("position", help="FEN, or one of: " + ", ".join(bench.TRAPS))
    t.add_argument("--sample", type=int, default=None, help="structural sampling: children per sample")
    t.add_argument("--repeats", type=int, default=5)
    m = sub.add_parser("match-moves", parents=[common], help="most frequently matched move pairs")
    m.add_argument("a")
    m.add_argument("b")
    f = sub.add_parser("perft", parents=[common], help="count leaf nodes of the legal move tree")
    f.add_argument("position", nargs="?", default=None)
    e = sub.add_parser("example1", parents=[common], help="check the measure orderings on the synthetic family")
    e.add_argument("branching", nargs="*", type=int, help="branching factors (default 3..12)")
    return p


# ---------------------------------------------------------------------------
# input helpers


def _position(text: str) -> Position:
    if text in bench.TRAPS:
        return parse_fen(bench.TRAPS[text].fen)
    return parse_fen(text)


def _read_tree(path: str) -> GameTree:
    text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    return parse_tree(text)


def _trap_name(pos: Position, given: str) -> str:
    if given in bench.TRAPS:
        return given
    for name, trap in bench.TRAPS.items():
        if trap.fen == pos.fen:
            return name
    return "position"


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _table(header: list[str], rows: list[list], fmt: str, text_rows: list[str]) -> str:
    if fmt == "json":
        return json.dumps([dict(zip(header, r)) for r in rows], indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        return buf.getvalue()
    return "".join(line + "\n" for line in text_rows)


# ---------------------------------------------------------------------------
# commands


def cmd_compare(cfg: CliConfig, a: str, b: str) -> int:
    measure = cfg.measures[0] if cfg.measures else "cont"
    if len(cfg.measures) > 1:
        raise UsageError("compare takes a single --measure")
    d = 0 if measure == "corr" else cfg.depth or bench.DEFAULT_DEPTHS.get(measure, 1)
    if cfg.input_kind == "tree":
        if measure == "corr":
            raise UsageError("corr compares board positions and needs --input fen")
        t1, t2 = _read_tree(a), _read_tree(b)
        value = _tree_value(measure, t1, t2, d)
    else:
        p1, p2 = _position(a), _position(b)
        if measure == "corr":
            value = cross_correlation(p1, p2)
        else:
            depth = d + 1 if measure == "struct" else d
            adapter = ChessAdapter()
            value = _tree_value(measure, expand(adapter, p1, depth), expand(adapter, p2, depth), d)
    if cfg.fmt == "json":
        text = json.dumps({"measure": measure, "depth": d, "value": bench.round_half_even(value)}) + "\n"
    elif cfg.fmt == "csv":
        text = f"measure,depth,value\n{measure},{d},{bench.format_value(value)}\n"
    else:
        text = bench.format_value(value) + "\n"
    _emit(text, cfg.out)
    return EXIT_OK


def _tree_value(measure: str, t1: GameTree, t2: GameTree, d: int) -> float:
    if measure == "struct":
        return structural_similarity(t1, t2, "cont", d)
    return get_measure(measure)(t1, t2, d)


def cmd_trap_scan(cfg: CliConfig, position: str, sample: int | None, repeats: int) -> int:
    pos = _position(position)
    name = _trap_name(pos, position)
    tempting = (bench.TRAPS[name].tempting,) if name in bench.TRAPS else None
    if sample is not None:
        if sample < 1 or repeats < 1:
            raise UsageError("--sample and --repeats must be >= 1")
        rep = bench.structural_sampling(pos, sample, repeats, cfg.seed, tempting, cfg.horizon, cfg.depth or 1)
        payload = {
            "position": name,
            "seed": rep.seed,
            "proportions": [None if p is None else bench.round_half_even(p) for p in rep.proportions],
            "mean": bench.round_half_even(rep.mean),
        }
        _emit(json.dumps(payload, indent=2) + "\n" if cfg.fmt != "text" else
              f"seed {rep.seed}  mean proportion {bench.format_value(rep.mean)}\n", None)
        return EXIT_OK
    measures = cfg.measures or bench.TABLE_MEASURES
    depths = {m: cfg.depth for m in measures if cfg.depth is not None and m != "corr"}
    rows, summaries = bench.trap_scan(pos, measures, depths, tempting, cfg.horizon)
    bench.write_scan_reports(name, rows, summaries, cfg.out or ".")
    header = ["measure", "rho", "fn_rate", "fp_rate", "n"]
    data = [[s.measure, bench.round_half_even(s.rho), bench.round_half_even(s.fn_rate),
             bench.round_half_even(s.fp_rate), s.n] for s in summaries]
    lines = [
        f"{s.measure:6s} rho {bench.format_value(s.rho)}  fn {bench.format_value(s.fn_rate)}  "
        f"fp {bench.format_value(s.fp_rate)}  n {s.n}  traps {s.n_traps}" + (f"  ({s.note})" if s.note else "")
        for s in summaries
    ]
    sys.stdout.write(_table(header, data, cfg.fmt, lines))
    return EXIT_OK


def cmd_match_moves(cfg: CliConfig, a: str, b: str) -> int:
    rep = bench.move_match_report(_position(a), _position(b), cfg.top_k, cfg.depth or 2)
    header = ["label1", "label2", "frequency", "class1", "class2"]
    data = [[r.label1, r.label2, r.frequency, r.class1, r.class2] for r in rep.rows]
    lines = [f"{r.label1:8s} {r.label2:8s} {r.frequency:5d}  {r.class1}/{r.class2}" for r in rep.rows]
    lines.append(f"equally decisive: {rep.tally} of {len(rep.rows)}")
    _emit(_table(header, data, cfg.fmt, lines), cfg.out)
    return EXIT_OK


def cmd_perft(cfg: CliConfig, position: str | None) -> int:
    pos = Position.start() if position is None else _position(position)
    depth = cfg.depth or 1
    n = perft(pos, depth)
    if cfg.fmt == "json":
        text = json.dumps({"fen": pos.fen, "depth": depth, "nodes": n}) + "\n"
    elif cfg.fmt == "csv":
        text = f"depth,nodes\n{depth},{n}\n"
    else:
        text = f"{n}\n"
    _emit(text, cfg.out)
    return EXIT_OK


def cmd_example1(cfg: CliConfig, branching: list[int]) -> int:
    bs = branching or list(range(3, 13))
    if any(b < 3 for b in bs):
        raise UsageError("branching factors must be >= 3")
    header = ["b", "relation", "holds"]
    data, lines, ok = [], [], True
    for b in bs:
        for rel, holds in bench.example1_orderings(b).items():
            data.append([b, rel, holds])
            lines.append(f"b={b:<3d} {rel:28s} {'ok' if holds else 'FAILED'}")
            ok &= holds
    _emit(_table(header, data, cfg.fmt, lines), cfg.out)
    return EXIT_OK if ok else EXIT_FAILED


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed the message
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = _config(ns)
        if cfg.command == "compare":
            return cmd_compare(cfg, ns.a, ns.b)
        if cfg.command == "trap-scan":
            return cmd_trap_scan(cfg, ns.position, ns.sample, ns.repeats)
        if cfg.command == "match-moves":
            return cmd_match_moves(cfg, ns.a, ns.b)
        if cfg.command == "perft":
            return cmd_perft(cfg, ns.position)
        return cmd_example1(cfg, ns.branching)
    except (UsageError, FenError, TreeSyntaxError, ExpansionError, ValueError) as exc:
        print(f"treesim: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"treesim: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
