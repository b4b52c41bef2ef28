"""Threshold analysis over all two-ply children of each benchmark trap.

Writes per-measure CSV/JSON reports to --out and prints FN/FP rates.
"""
from __future__ import annotations

import argparse
import time

from treesim.bench import TABLE_MEASURES, TRAPS, scan_trap, write_scan_reports


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--traps", nargs="*", default=list(TRAPS), choices=list(TRAPS))
    ap.add_argument("--measures", nargs="*", default=list(TABLE_MEASURES))
    ap.add_argument("--horizon", type=int, default=4)
    ap.add_argument("--out", default="results/scan")
    args = ap.parse_args()
    print(f"{'trap':10s} {'measure':7s} {'FN':>6s} {'FP':>6s} {'n':>5s} {'traps':>5s}")
    for name in args.traps:
        t = time.perf_counter()
        rows, summaries = scan_trap(name, args.measures, args.horizon)
        write_scan_reports(name, rows, summaries, args.out)
        for s in summaries:
            print(f"{name:10s} {s.measure:7s} {s.fn_rate:6.3f} {s.fp_rate:6.3f} {s.n:5d} {s.n_traps:5d}")
        print(f"# {name}: {time.perf_counter() - t:.0f}s")


if __name__ == "__main__":
    main()
