"""Print the table of morphism groups between Moore polyhedra.

    python scripts/hom_table.py --p 5 --kmax 3
    python scripts/hom_table.py --p 3 --kmax 2 --json
"""

from __future__ import annotations

import argparse

from patoms.moore import hom_table_json, hom_table_text


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=int, default=3)
    ap.add_argument("--kmax", type=int, default=3)
    ap.add_argument("--json", action="store_true")
    a = ap.parse_args()
    print(hom_table_json(a.p, a.kmax) if a.json else hom_table_text(a.p, a.kmax))


if __name__ == "__main__":
    main()
