"""Top matched move pairs for every pairing of the benchmark traps."""
from __future__ import annotations

import argparse

from treesim.bench import TRAP_PAIRS, TRAPS, move_match_report
from treesim.chessgame import parse_fen


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--top-k", type=int, default=5)
    args = ap.parse_args()
    for a, b in TRAP_PAIRS:
        rep = move_match_report(parse_fen(TRAPS[a].fen), parse_fen(TRAPS[b].fen), args.top_k)
        print(f"{a} vs {b}: equally decisive {rep.tally} of {len(rep.rows)}")
        for r in rep.rows:
            print(f"    {r.label1:8s} {r.label2:8s} x{r.frequency:<4d} {r.class1}/{r.class2}")


if __name__ == "__main__":
    main()
