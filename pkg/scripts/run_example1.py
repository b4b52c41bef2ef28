"""Measure orderings on the synthetic Example 1 family for a range of branching factors."""
from __future__ import annotations

import sys

from treesim.bench import build_example1_family, example1_orderings
from treesim.measures import sim_continuations


def main(bs: list[int]) -> int:
    ok = True
    for b in bs:
        res = example1_orderings(b)
        t1, t2, _, _ = build_example1_family(b)
        cont = sim_continuations(t1, t2, 2)
        ok &= all(res.values())
        flags = "  ".join(f"{k}: {'ok' if v else 'FAILED'}" for k, v in res.items())
        print(f"b={b:<3d} P_cont(T1,T2)={cont:.4f} (b-2)/b={(b - 2) / b:.4f}  {flags}")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main([int(x) for x in sys.argv[1:]] or list(range(3, 13))))
