"""Gluing diagrams: cells by dimension joined by labelled attaching maps."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .arith import INF
from .blocks import BlockMatrix
from .bunch import BunchSpec, Letter
from .canon import CHANG, MOORE, SPHERE, Indecomposable, letter_dim
from .errors import UnknownFormat

FORMATS = ("ascii", "dot", "json")


@dataclass(frozen=True)
class Edge:
    top: int
    bottom: int
    label: str
    kind: str  # "moore" (vertical p-power) or "attach" (matrix entry / composite)


@dataclass
class GluingDiagram:
    cells: list[tuple[int, int]] = field(default_factory=list)  # (id, dimension)
    edges: list[Edge] = field(default_factory=list)
    lo: int = 0
    hi: int = 0

    def dims(self) -> list[int]:
        return sorted(d for _, d in self.cells)

    def dim_of(self, cid: int) -> int:
        return dict(self.cells)[cid]

    def labels(self, kind: str | None = None) -> list[str]:
        return sorted(e.label for e in self.edges if kind is None or e.kind == kind)

    def edge_dims(self) -> list[tuple[int, int, str]]:
        d = dict(self.cells)
        return sorted((d[e.top], d[e.bottom], e.label) for e in self.edges)

    def to_json(self) -> dict:
        return {
            "cells": [{"id": i, "dim": d} for i, d in self.cells],
            "edges": [{"top": e.top, "bottom": e.bottom, "label": e.label, "kind": e.kind} for e in self.edges],
            "range": [self.lo, self.hi],
        }


class _Builder:
    def __init__(self, lo: int, hi: int) -> None:
        self.raw: list[tuple[int, tuple, ]] = []
        self.keys: dict = {}
        self.edges: list[tuple] = []
        self.lo, self.hi = lo, hi

    def cell(self, key, dim: int):
        if key not in self.keys:
            self.keys[key] = dim
        return key

    def edge(self, a, b, label: str, kind: str) -> None:
        self.edges.append((a, b, label, kind))

    def build(self) -> GluingDiagram:
        order = sorted(self.keys, key=lambda k: (-self.keys[k], repr(k)))
        ids = {k: i for i, k in enumerate(order)}
        edges = []
        for a, b, label, kind in self.edges:
            if self.keys[a] < self.keys[b]:
                a, b = b, a
            edges.append(Edge(ids[a], ids[b], label, kind))
        edges.sort(key=lambda e: (e.top, e.bottom, e.kind, e.label))
        return GluingDiagram([(ids[k], self.keys[k]) for k in order], edges, self.lo, self.hi)


def _signed(v: int, p: int) -> str:
    v %= p
    return str(v - p if v > p // 2 else v)


def diagram_of_matrix(bm: BlockMatrix, bunch: BunchSpec) -> GluingDiagram:
    """Cells: one per coordinate of each stripe (linked stripes give the two
    cells of a Moore polyhedron); edges: p-powers along links and one
    attaching edge per nonzero entry."""
    p = bunch.p
    b = _Builder(bunch.n, 2 * bunch.n - 1)
    rows = {x: s for x, s in bm.rows}
    cols = {y: s for y, s in bm.cols}
    for stripes in (rows, cols):
        for x, size in stripes.items():
            for i in range(size):
                b.cell((x.key, i), letter_dim(x, bunch))
            y = bunch.partner(x)
            if y is None:
                if x.side == "f" and x.kind == "diag" and x.s != INF and not bunch.top:
                    for i in range(size):
                        hidden = b.cell(("hidden", x.key, i), bunch.m)
                        b.edge((x.key, i), hidden, f"{p}^{int(x.s)}", "moore")
                continue
            if y in rows or y in cols:
                if x.kind == "diag":
                    if x.side == "e":
                        continue
                    label = f"{p}^{int(x.s)}"
                elif x.kind != "star":
                    continue
                else:
                    label = f"{p}^{x.sub}"
                for i in range(size):
                    b.edge((x.key, i), (y.key, i), label, "moore")
    rs, cs = bm.row_slices, bm.col_slices
    for x in rows:
        for y in cols:
            blk = bm.mat[rs[x], cs[y]]
            for i, j in zip(*blk.nonzero()):
                b.edge((y.key, int(j)), (x.key, int(i)), _signed(int(blk[i, j]), p), "attach")
    return b.build()


def gluing_diagram(x: Indecomposable) -> GluingDiagram:
    p = x.p
    if x.variant == CHANG and x.word is None:
        b = _Builder(2 * p - 1, 4 * p - 3)
        low = b.cell("b0", 2 * p - 1)
        if x.k:
            b.edge(b.cell("b1", 2 * p), low, f"{p}^{x.k}", "moore")
        top = b.cell("a1", 4 * p - 3)
        if x.l:
            b.edge(top, b.cell("a0", 4 * p - 4), f"{p}^{x.l}", "moore")
        b.edge(top, low, "1", "attach")
        return b.build()
    if x.word is not None:
        return diagram_of_matrix(x.matrix(), x.bunch)
    lo, hi = (2 * p - 1, 4 * p - 3) if x.is_chang_case else (x.n, 2 * x.n - 1)
    b = _Builder(lo, hi)
    if x.variant == SPHERE:
        b.cell("s", x.d)
    elif x.variant == MOORE:
        b.edge(b.cell("t", x.d), b.cell("b", x.d - 1), f"{p}^{x.k}", "moore")
    return b.build()


def _ascii(d: GluingDiagram) -> str:
    by_dim: dict[int, list[int]] = {}
    for cid, dim in d.cells:
        by_dim.setdefault(dim, []).append(cid)
    lo = min([d.lo] + list(by_dim)) if (d.lo or by_dim) else 0
    hi = max([d.hi] + list(by_dim)) if (d.hi or by_dim) else -1
    width = len(str(hi)) if hi >= 0 else 1
    lines = []
    for dim in range(hi, lo - 1, -1):
        cells = "  ".join(f"*c{c}" for c in sorted(by_dim.get(dim, [])))
        lines.append(f"{dim:>{width}} | {cells}".rstrip())
    for e in d.edges:
        label = "" if e.label == "1" else f"  [{e.label}]"
        lines.append(f"c{e.top} -- c{e.bottom}{label}")
    return "\n".join(lines) + "\n"


def _dot(d: GluingDiagram) -> str:
    out = ["graph gluing {", "  rankdir=BT;", "  node [shape=point];"]
    by_dim: dict[int, list[int]] = {}
    for cid, dim in d.cells:
        by_dim.setdefault(dim, []).append(cid)
    for dim in sorted(by_dim):
        nodes = " ".join(f"c{c};" for c in sorted(by_dim[dim]))
        out.append(f'  {{ rank=same; label="{dim}"; {nodes} }}')
    for cid, dim in d.cells:
        out.append(f'  c{cid} [xlabel="{dim}"];')
    for e in d.edges:
        attr = "" if e.label == "1" else f' [label="{e.label}"]'
        out.append(f"  c{e.top} -- c{e.bottom}{attr};")
    out.append("}")
    return "\n".join(out) + "\n"


def emit(d: GluingDiagram, fmt: str) -> str:
    if fmt == "ascii":
        return _ascii(d)
    if fmt == "dot":
        return _dot(d)
    if fmt == "json":
        return json.dumps(d.to_json(), indent=2, sort_keys=True) + "\n"
    raise UnknownFormat(f"unknown diagram format {fmt!r}; choose one of {', '.join(FORMATS)}")
