"""Build a scrambled direct sum and its construction multiset as JSON fixtures.

    python scripts/make_fixture.py --p 3 --n 7 --summands 5 --seed 11 --out tests/fixtures
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path

import numpy as np

from patoms.bunch import BunchSpec
from patoms.reduce import enumerate_indecomposables, scramble, sum_of


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=int, default=3)
    ap.add_argument("--n", type=int, default=7)
    ap.add_argument("--summands", type=int, default=5)
    ap.add_argument("--max-sub", type=int, default=1)
    ap.add_argument("--max-len", type=int, default=6)
    ap.add_argument("--seed", type=int, default=11)
    ap.add_argument("--moves", type=int, default=50)
    ap.add_argument("--out", type=Path, default=Path("tests/fixtures"))
    a = ap.parse_args()

    rng = np.random.default_rng(a.seed)
    bunch = BunchSpec(a.p, a.n)
    pool = enumerate_indecomposables(a.p, a.n, a.max_sub, a.max_len, 2)
    pick = sorted(pool[i] for i in rng.choice(len(pool), a.summands, replace=True))
    scrambled = scramble(sum_of(pick, bunch), bunch, rng, a.moves)
    a.out.mkdir(parents=True, exist_ok=True)
    stem = f"scrambled_p{a.p}_n{a.n}_seed{a.seed}"
    (a.out / f"{stem}.json").write_text(json.dumps(scrambled.to_json(), indent=2) + "\n")
    (a.out / f"{stem}.expected.json").write_text(json.dumps([x.to_json() for x in pick], indent=2, sort_keys=True) + "\n")
    print(f"wrote {stem}.json with summands:")
    for x in pick:
        print("  ", x)


if __name__ == "__main__":
    main()
