"""Structural similarity on repeated random samples of children (seeded)."""
from __future__ import annotations

import argparse

from treesim.bench import TRAPS, structural_sampling
from treesim.chessgame import parse_fen


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--traps", nargs="*", default=["budapest", "carokann"], choices=list(TRAPS))
    ap.add_argument("--sample", type=int, default=40)
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--seed", type=int, default=20240)
    args = ap.parse_args()
    for name in args.traps:
        trap = TRAPS[name]
        rep = structural_sampling(parse_fen(trap.fen), args.sample, args.repeats, args.seed, (trap.tempting,))
        props = " ".join("-" if p is None else f"{p:.3f}" for p in rep.proportions)
        print(f"{name:10s} seed {rep.seed}  per-sample {props}  mean {rep.mean:.3f}")


if __name__ == "__main__":
    main()
