"""Command-line front end: ``patoms <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import sys

from .arith import check_odd_prime
from .blocks import BlockMatrix
from .bunch import BunchSpec
from .canon import Indecomposable, genus_count, is_atom
from .diagram import FORMATS, emit, gluing_diagram
from .errors import PatomsError
from .moore import MooreObject, hom_group, hom_table_json, hom_table_text
from .reduce import chang_from_json, decompose, decompose_chang, enumerate_indecomposables
from .wild import verdict_table


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def _read_json(path: str):
    try:
        with (sys.stdin if path == "-" else open(path, encoding="utf-8")) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        from .errors import ValidationError

        raise ValidationError(f"cannot read JSON from {path}: {exc}") from exc


def _read_indecomposables(path: str) -> list[Indecomposable]:
    obj = _read_json(path)
    items = obj if isinstance(obj, list) else [obj]
    return [Indecomposable.from_json(x) for x in items]


def cmd_hom(a) -> str:
    check_odd_prime(a.p)
    if a.table:
        return hom_table_json(a.p, a.k) if a.json else hom_table_text(a.p, a.k)
    h = hom_group(MooreObject(a.r, a.l), MooreObject(a.d, a.k), a.p)
    return _dump(h.to_json()) + "\n" if a.json else f"{h}\n"


def cmd_enumerate(a) -> str:
    check_odd_prime(a.p)
    items = enumerate_indecomposables(a.p, a.n, a.max_sub, a.max_len, a.max_zv)
    if a.atoms_only:
        items = [x for x in items if is_atom(x)]
    if a.json:
        return _dump([x.to_json() for x in items]) + "\n"
    return "".join(f"{x}\n" for x in items)


def cmd_decompose(a) -> str:
    obj = _read_json(a.input)
    p = a.p if a.p is not None else int(obj.get("p", 0))
    n = a.n if a.n is not None else int(obj.get("n", 0))
    check_odd_prime(p)
    if n == 2 * p - 1:
        items = decompose_chang(chang_from_json({**obj, "p": p}))
    else:
        bm = BlockMatrix.from_json({**obj, "p": p, "n": n})
        items = decompose(bm, BunchSpec(p, n), seed=a.seed)
    if a.json:
        return _dump([x.to_json() for x in items]) + "\n"
    return "".join(f"{x}\n" for x in items)


def cmd_diagram(a) -> str:
    return "".join(emit(gluing_diagram(x), a.format) for x in _read_indecomposables(a.input))


def cmd_genus(a) -> str:
    return "".join(f"{x}\t{genus_count(x)}\n" for x in _read_indecomposables(a.input))


def cmd_wild(a) -> str:
    rows = verdict_table(a.p, a.size, a.trials, a.seed)
    if a.json:
        return _dump(rows) + "\n"
    lines = [f"{'#':>3}  {'equivalent':<10}  {'conjugate':<9}  agree"]
    for i, r in enumerate(rows):
        lines.append(f"{i:>3}  {str(r['equivalent']):<10}  {str(r['conjugate']):<9}  {r['agree']}")
    lines.append(f"agreement: {sum(r['agree'] for r in rows)}/{len(rows)}")
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="patoms", description="p-primary polyhedra: Hom groups, atoms, decompositions, diagrams")
    sub = ap.add_subparsers(dest="command", required=True)

    h = sub.add_parser("hom", help="Hom group between Moore polyhedra M^r_l -> M^d_k")
    h.add_argument("--p", type=int, required=True)
    h.add_argument("--d", type=int, default=0)
    h.add_argument("--r", type=int, default=0)
    h.add_argument("--k", type=int, default=0)
    h.add_argument("--l", type=int, default=0)
    h.add_argument("--table", action="store_true", help="print the whole table for subscripts <= k")
    h.add_argument("--json", action="store_true")
    h.set_defaults(func=cmd_hom)

    e = sub.add_parser("enumerate", help="list indecomposables within bounds")
    e.add_argument("--p", type=int, required=True)
    e.add_argument("--n", type=int, required=True)
    e.add_argument("--max-sub", type=int, default=1)
    e.add_argument("--max-len", type=int, default=4)
    e.add_argument("--max-zv", type=int, default=1, help="bound on z*deg(pi) for bands")
    e.add_argument("--atoms-only", action="store_true")
    e.add_argument("--json", action="store_true")
    e.set_defaults(func=cmd_enumerate)

    d = sub.add_parser("decompose", help="decompose a block matrix given as JSON")
    d.add_argument("--p", type=int)
    d.add_argument("--n", type=int)
    d.add_argument("--input", required=True)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--json", action="store_true")
    d.set_defaults(func=cmd_decompose)

    g = sub.add_parser("diagram", help="gluing diagram of indecomposables given as JSON")
    g.add_argument("--input", required=True)
    g.add_argument("--format", default="ascii", help=f"one of {', '.join(FORMATS)}")
    g.set_defaults(func=cmd_diagram)

    gn = sub.add_parser("genus", help="genus count of indecomposables given as JSON")
    gn.add_argument("--input", required=True)
    gn.set_defaults(func=cmd_genus)

    w = sub.add_parser("wild-demo", help="equivalence vs simultaneous conjugacy verdicts")
    w.add_argument("--p", type=int, default=3)
    w.add_argument("--size", type=int, default=2)
    w.add_argument("--trials", type=int, default=20)
    w.add_argument("--seed", type=int, default=0)
    w.add_argument("--json", action="store_true")
    w.set_defaults(func=cmd_wild)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        sys.stdout.write(args.func(args))
    except PatomsError as exc:
        print(f"patoms: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
