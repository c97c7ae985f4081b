"""List atoms (indecomposables that use the whole range) with their cell counts and genus.

    python scripts/enumerate_atoms.py --p 3 --n 6 --max-sub 1 --max-len 6 --max-zv 2
"""

from __future__ import annotations

import argparse
from collections import Counter

from patoms.canon import genus_count, is_atom
from patoms.diagram import gluing_diagram
from patoms.reduce import enumerate_indecomposables


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=int, default=3)
    ap.add_argument("--n", type=int, default=6)
    ap.add_argument("--max-sub", type=int, default=1)
    ap.add_argument("--max-len", type=int, default=6)
    ap.add_argument("--max-zv", type=int, default=1)
    a = ap.parse_args()

    atoms = [x for x in enumerate_indecomposables(a.p, a.n, a.max_sub, a.max_len, a.max_zv) if is_atom(x)]
    for x in atoms:
        print(f"{len(gluing_diagram(x).cells):3d} cells  g={genus_count(x)}  {x}")
    print(f"# {len(atoms)} atoms:", dict(Counter(x.variant for x in atoms)))


if __name__ == "__main__":
    main()
