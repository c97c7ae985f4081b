"""Stripe-partitioned block matrices over F_p indexed by letters."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .arith import LocalInt, check_odd_prime
from .bunch import BunchSpec, Letter, parse_letter
from .errors import LinkageBroken, StructureError, ValidationError


@dataclass
class BlockMatrix:
    """Rows are grouped into stripes labelled by E-letters, columns by F-letters.

    Coordinates inside a stripe are ordered; the j-th coordinate of a stripe
    is identified with the j-th coordinate of its ~-partner stripe.  The
    optional ``zp_block`` holds the Z_(p)-valued block between the e^m_0 rows
    and the f^n_0 columns before it is diagonalized."""

    p: int
    n: int
    rows: list[tuple[Letter, int]]
    cols: list[tuple[Letter, int]]
    mat: np.ndarray
    zp_block: list[list[LocalInt]] | None = None

    def __post_init__(self) -> None:
        check_odd_prime(self.p)
        self.rows = [(x, int(s)) for x, s in self.rows]
        self.cols = [(x, int(s)) for x, s in self.cols]
        self.mat = np.asarray(self.mat, dtype=np.int64).reshape(self.height, self.width) % self.p
        for lst in (self.rows, self.cols):
            names = [x for x, _ in lst]
            if len(set(names)) != len(names):
                raise StructureError("duplicate stripe label")
            if any(s < 0 for _, s in lst):
                raise StructureError("negative stripe size")

    @property
    def height(self) -> int:
        return sum(s for _, s in self.rows)

    @property
    def width(self) -> int:
        return sum(s for _, s in self.cols)

    def _offsets(self, lst) -> dict[Letter, slice]:
        out, o = {}, 0
        for x, s in lst:
            out[x] = slice(o, o + s)
            o += s
        return out

    @property
    def row_slices(self) -> dict[Letter, slice]:
        return self._offsets(self.rows)

    @property
    def col_slices(self) -> dict[Letter, slice]:
        return self._offsets(self.cols)

    def size(self, x: Letter) -> int:
        for y, s in self.rows + self.cols:
            if y == x:
                return s
        return 0

    def block(self, e: Letter, f: Letter) -> np.ndarray:
        return self.mat[self.row_slices[e], self.col_slices[f]]

    def copy(self) -> "BlockMatrix":
        return BlockMatrix(
            self.p, self.n, list(self.rows), list(self.cols), self.mat.copy(),
            None if self.zp_block is None else [list(r) for r in self.zp_block],
        )

    def dims(self) -> dict[Letter, int]:
        out: dict[Letter, int] = {}
        for x, s in self.rows + self.cols:
            if s:
                out[x] = out.get(x, 0) + s
        return out

    def same(self, other: "BlockMatrix") -> bool:
        return (
            self.p == other.p
            and self.rows == other.rows
            and self.cols == other.cols
            and np.array_equal(self.mat, other.mat)
        )

    def validate(self, bunch: BunchSpec) -> "BlockMatrix":
        """Check stripe labels, sides, chain compatibility of nonzero blocks and linkage."""
        if bunch.p != self.p or bunch.n != self.n:
            raise StructureError("block matrix and bunch disagree on (p, n)")
        pre = self.zp_block is not None
        for x, _ in self.rows:
            if x.side != "e":
                raise StructureError(f"row stripe {x} is not an E-letter")
        for y, _ in self.cols:
            if y.side != "f":
                raise StructureError(f"column stripe {y} is not an F-letter")
        for x, s in self.rows + self.cols:
            if bunch.contains(x):
                continue
            if pre and x in (_em0(bunch), _fn0(bunch)):
                continue
            raise StructureError(f"stripe {x} is not a letter of the bunch")
        rs, cs = self.row_slices, self.col_slices
        for x, _ in self.rows:
            for y, _ in self.cols:
                blk = self.mat[rs[x], cs[y]]
                if blk.size and blk.any() and x.d != y.d:
                    raise StructureError(f"nonzero block between chains {x} and {y}")
        sizes = {x: s for x, s in self.rows + self.cols}
        for x, s in sizes.items():
            if not bunch.contains(x):
                continue
            y = bunch.partner(x)
            if y is not None and sizes.get(y, 0) != s:
                raise LinkageBroken(f"linked stripes {x} and {y} differ in size")
        if pre:
            h, w = sizes.get(_em0(bunch), 0), sizes.get(_fn0(bunch), 0)
            if len(self.zp_block) != h or any(len(r) != w for r in self.zp_block):
                raise StructureError("zp_block shape does not match the e^m_0 x f^n_0 stripes")
        return self

    # -- serialization ---------------------------------------------------

    def to_json(self) -> dict:
        rs, cs = self.row_slices, self.col_slices
        entries = []
        for i, (x, _) in enumerate(self.rows):
            for j, (y, _) in enumerate(self.cols):
                blk = self.mat[rs[x], cs[y]]
                for a, b in zip(*np.nonzero(blk)):
                    entries.append([i, j, int(a), int(b), int(blk[a, b])])
        out = {
            "p": self.p,
            "n": self.n,
            "row_stripes": [{"letter": str(x), "size": s} for x, s in self.rows],
            "col_stripes": [{"letter": str(x), "size": s} for x, s in self.cols],
            "entries": entries,
        }
        if self.zp_block is not None:
            out["zp_block"] = [[[v.numerator, v.denominator] for v in r] for r in self.zp_block]
        return out

    @classmethod
    def from_json(cls, obj: "dict | str") -> "BlockMatrix":
        if isinstance(obj, str):
            obj = json.loads(obj)
        try:
            p, n = int(obj["p"]), int(obj["n"])
            rows = [(parse_letter(r["letter"]), int(r["size"])) for r in obj["row_stripes"]]
            cols = [(parse_letter(c["letter"]), int(c["size"])) for c in obj["col_stripes"]]
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed block matrix JSON: {exc}") from exc
        h, w = sum(s for _, s in rows), sum(s for _, s in cols)
        mat = np.zeros((h, w), dtype=np.int64)
        roff = np.cumsum([0] + [s for _, s in rows])
        coff = np.cumsum([0] + [s for _, s in cols])
        for ent in obj.get("entries", []):
            i, j, a, b, v = (int(t) for t in ent)
            if not (0 <= i < len(rows) and 0 <= j < len(cols) and 0 <= a < rows[i][1] and 0 <= b < cols[j][1]):
                raise StructureError(f"entry {ent} outside the stripes")
            mat[roff[i] + a, coff[j] + b] = v % p
        zp = obj.get("zp_block")
        zp_block = None
        if zp is not None:
            zp_block = [[LocalInt(int(v[0]), int(v[1]), p) if isinstance(v, list) else LocalInt(int(v), 1, p) for v in r] for r in zp]
        return cls(p, n, rows, cols, mat, zp_block)


def _em0(bunch: BunchSpec) -> Letter:
    return Letter("e", bunch.m, "plain", 0)


def _fn0(bunch: BunchSpec) -> Letter:
    return Letter("f", bunch.n, "plain", 0)


def em0(bunch: BunchSpec) -> Letter:
    """Row label of the undiagonalized Z_(p) block."""
    return _em0(bunch)


def fn0(bunch: BunchSpec) -> Letter:
    """Column label of the undiagonalized Z_(p) block."""
    return _fn0(bunch)


def direct_sum(mats: list[BlockMatrix]) -> BlockMatrix:
    """Direct sum; stripes with the same label are concatenated in summand order."""
    if not mats:
        raise StructureError("empty direct sum")
    p, n = mats[0].p, mats[0].n
    row_labels = sorted({x for m in mats for x, s in m.rows}, key=lambda x: x.key)
    col_labels = sorted({x for m in mats for x, s in m.cols}, key=lambda x: x.key)
    rsize = {x: sum(m.size(x) for m in mats if x in dict(m.rows)) for x in row_labels}
    csize = {x: sum(m.size(x) for m in mats if x in dict(m.cols)) for x in col_labels}
    out = BlockMatrix(p, n, [(x, rsize[x]) for x in row_labels], [(x, csize[x]) for x in col_labels],
                      np.zeros((sum(rsize.values()), sum(csize.values())), dtype=np.int64))
    ro = {x: out.row_slices[x].start for x in row_labels}
    co = {x: out.col_slices[x].start for x in col_labels}
    for m in mats:
        ridx = np.concatenate([np.arange(ro[x], ro[x] + s) for x, s in m.rows] or [np.zeros(0, int)]).astype(int)
        cidx = np.concatenate([np.arange(co[x], co[x] + s) for x, s in m.cols] or [np.zeros(0, int)]).astype(int)
        if ridx.size and cidx.size:
            out.mat[np.ix_(ridx, cidx)] = m.mat
        for x, s in m.rows:
            ro[x] += s
        for x, s in m.cols:
            co[x] += s
    return out
