"""Compare matrix-problem equivalence with simultaneous conjugacy on random pairs.

    python scripts/wild_demo.py --size 2 --trials 20 --seed 0
"""

from __future__ import annotations

import argparse
from collections import Counter

from patoms.wild import verdict_table


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=int, default=3)
    ap.add_argument("--size", type=int, default=2)
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args()

    rows = verdict_table(a.p, a.size, a.trials, a.seed)
    tally = Counter((r["equivalent"], r["conjugate"]) for r in rows)
    for (e, c), m in sorted(tally.items()):
        print(f"equivalent={e!s:5}  conjugate={c!s:5}  {m}")
    agree = sum(m for (e, c), m in tally.items() if e == c)
    print(f"agreement {agree}/{len(rows)}")


if __name__ == "__main__":
    main()
