"""Render the small p = 3 atoms (strings, bands, n = 8 examples) as gluing diagrams.

    python scripts/render_examples.py --format ascii
    python scripts/render_examples.py --format dot > atoms.dot
"""

from __future__ import annotations

import argparse

from patoms.arith import FpPolynomial
from patoms.bunch import BunchSpec, parse_word
from patoms.canon import BandDatum, Indecomposable
from patoms.diagram import FORMATS, emit, gluing_diagram

EXAMPLES = [
    (6, "e6*_1 f7_0", None),
    (6, "e6_0 f6*_2", None),
    (6, "e7_1 f7_2 -", (1, (2, 1))),
    (6, "e7_1 f7_2 -", (1, (1, 0, 1))),
    (6, "e7_1 f7_2 -", (2, (2, 1))),
    (8, "e8_0 f8,1_0 f11_0", None),
    (8, "e8*_1 f9*_1 e10*_1 f11_1 e10_1 f9_1 -", (1, (1, 1))),
    (8, "e8_0 f9_1 e10_1 f11_1 e11,inf_0", None),
]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--format", choices=FORMATS, default="ascii")
    a = ap.parse_args()
    for n, text, band in EXAMPLES:
        b = BunchSpec(3, n)
        w = parse_word(text, b)
        if band is None:
            x = Indecomposable.from_word(w, b)
        else:
            z, coeffs = band
            x = Indecomposable.band(BandDatum(w, z, FpPolynomial(coeffs, 3)), b)
        print(f"# {x}")
        print(emit(gluing_diagram(x), a.format))
        print()


if __name__ == "__main__":
    main()
