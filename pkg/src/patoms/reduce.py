"""The matrix-problem engine: admissible transformations, Z_(p) block
diagonalization, decomposition into canonical indecomposables, enumeration,
and the n = 2p-1 (Chang) case."""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from . import linalg as la
from .arith import INF, FpPolynomial, LocalInt, irreducible_polys, valuation
from .blocks import BlockMatrix, direct_sum, em0, fn0
from .bunch import DASH, TILDE, BunchSpec, Letter, Word, is_nonperiodic, validate_word
from .canon import (
    BAND,
    BandDatum,
    Indecomposable,
    band_matrix,
    canonical_band,
    canonical_word,
    string_matrix,
)
from .errors import InadmissibleMove, LinkageBroken, StructureError, ValidationError
from .reps import isomorphic_to_local, split_all

# ---------------------------------------------------------------------------
# Z_(p) block


@dataclass(frozen=True)
class ZpDiagonal:
    """Result of diagonalizing a Z_(p) block: D = P A Q with D diagonal."""

    s_values: tuple  # valuations of the diagonal entries, ascending, inf for zeros
    P: tuple  # row transform (rows x rows) of LocalInt
    Q: tuple  # column transform (cols x cols) of LocalInt
    rows: int
    cols: int

    def residue(self, which: str, p: int) -> np.ndarray:
        M = self.P if which == "P" else self.Q
        return np.array([[v.residue().value for v in r] for r in M], dtype=np.int64).reshape(
            len(M), len(M)
        ) % p


def _as_local(block, p: int) -> list[list[LocalInt]]:
    return [[LocalInt.of(v, p) for v in row] for row in block]


def diagonalize_zp(block, p: int) -> ZpDiagonal:
    """Smith form over Z_(p): diagonal entries p^s with s ascending (inf = 0)."""
    A = _as_local(block, p)
    h = len(A)
    w = len(A[0]) if h else 0
    P = [[LocalInt(int(i == j), 1, p) for j in range(h)] for i in range(h)]
    Q = [[LocalInt(int(i == j), 1, p) for j in range(w)] for i in range(w)]
    s_values = []
    for t in range(min(h, w)):
        best = None
        for i in range(t, h):
            for j in range(t, w):
                v = valuation(A[i][j])
                if v != INF and (best is None or v < best[0]):
                    best = (v, i, j)
        if best is None:
            break
        v, i, j = best
        A[t], A[i] = A[i], A[t]
        P[t], P[i] = P[i], P[t]
        for row in A:
            row[t], row[j] = row[j], row[t]
        for row in Q:
            row[t], row[j] = row[j], row[t]
        piv = A[t][t]
        unit = LocalInt.of(piv.fraction / (p ** v), p)
        inv = LocalInt.of(1, p) / unit
        A[t] = [x * inv for x in A[t]]
        P[t] = [x * inv for x in P[t]]
        scale = p ** v
        for i2 in range(h):
            if i2 != t and A[i2][t]:
                c = LocalInt.of(A[i2][t].fraction / scale, p)
                A[i2] = [a - c * b for a, b in zip(A[i2], A[t])]
                P[i2] = [a - c * b for a, b in zip(P[i2], P[t])]
        for j2 in range(w):
            if j2 != t and A[t][j2]:
                c = LocalInt.of(A[t][j2].fraction / scale, p)
                for r in range(h):
                    A[r][j2] = A[r][j2] - A[r][t] * c
                for r in range(w):
                    Q[r][j2] = Q[r][j2] - Q[r][t] * c
        s_values.append(v)
    s_values += [INF] * (min(h, w) - len(s_values))
    return ZpDiagonal(tuple(s_values), tuple(map(tuple, P)), tuple(map(tuple, Q)), h, w)


def preprocess_zp(bm: BlockMatrix, bunch: BunchSpec) -> tuple[BlockMatrix, list[Indecomposable]]:
    """Diagonalize the Z_(p) block and split e^m_0 / f^n_0 into the s-labelled stripes.

    Unit diagonal entries cancel (contractible summands).  For n < 4(p-1)
    the e^m_0 rows are not letters: rows with finite s stay glued to their
    f^{n,s}_0 column, rows with s = inf become S^m summands."""
    if bm.zp_block is None:
        return bm, []
    p = bunch.p
    E0, F0 = em0(bunch), fn0(bunch)
    rs, cs = bm.row_slices, bm.col_slices
    h, w = bm.size(E0), bm.size(F0)
    diag = diagonalize_zp(bm.zp_block, p) if h and w else ZpDiagonal((), (), (), h, w)
    mat = bm.mat.copy()
    if h and w:
        if E0 in rs:
            mat[rs[E0], :] = diag.residue("P", p) @ mat[rs[E0], :] % p
        if F0 in cs:
            mat[:, cs[F0]] = mat[:, cs[F0]] @ diag.residue("Q", p) % p
    svals = list(diag.s_values)
    row_s = svals + [INF] * (h - len(svals))
    col_s = svals + [INF] * (w - len(svals))
    extras: list[Indecomposable] = []
    new_rows, row_idx = [], []
    for x, size in bm.rows:
        sl = rs[x]
        if x != E0:
            new_rows.append((x, size))
            row_idx.append(list(range(sl.start, sl.stop)))
    groups: dict = {}
    if E0 in rs:
        for i, s in enumerate(row_s):
            if s == 0:
                continue
            if bunch.top:
                groups.setdefault(("e", s), []).append(rs[E0].start + i)
            elif s == INF:
                extras.append(Indecomposable.sphere(bunch.m, p, bunch.n))
    for (side, s), idx in sorted(groups.items(), key=lambda t: (t[0][1],)):
        new_rows.append((Letter("e", bunch.m, "diag", 0, s), len(idx)))
        row_idx.append(idx)
    new_cols, col_idx = [], []
    for y, size in bm.cols:
        sl = cs[y]
        if y != F0:
            new_cols.append((y, size))
            col_idx.append(list(range(sl.start, sl.stop)))
    cgroups: dict = {}
    if F0 in cs:
        for j, s in enumerate(col_s):
            if s == 0:
                continue
            cgroups.setdefault(s, []).append(cs[F0].start + j)
    for s, idx in sorted(cgroups.items()):
        new_cols.append((Letter("f", bunch.n, "diag", 0, s), len(idx)))
        col_idx.append(idx)
    ri = [i for idx in row_idx for i in idx]
    ci = [j for idx in col_idx for j in idx]
    sub = mat[np.ix_(ri, ci)] if ri and ci else np.zeros((len(ri), len(ci)), dtype=np.int64)
    order_r = sorted(range(len(new_rows)), key=lambda t: new_rows[t][0].key)
    order_c = sorted(range(len(new_cols)), key=lambda t: new_cols[t][0].key)
    r_perm = [i for t in order_r for i in _range_of(new_rows, t)]
    c_perm = [j for t in order_c for j in _range_of(new_cols, t)]
    sub = sub[np.ix_(r_perm, c_perm)] if r_perm and c_perm else np.zeros((len(r_perm), len(c_perm)), dtype=np.int64)
    out = BlockMatrix(p, bunch.n, [new_rows[t] for t in order_r], [new_cols[t] for t in order_c], sub)
    return out.validate(bunch), extras


def _range_of(stripes, t):
    start = sum(s for _, s in stripes[:t])
    return range(start, start + stripes[t][1])


# ---------------------------------------------------------------------------
# admissible transformations


@dataclass(frozen=True)
class Transformation:
    """RowBasis(e, T), ColBasis(f, T), RowAdd(e <- e', U) or ColAdd(f <- f', U).

    RowBasis: Phi_e -> T Phi_e.  ColBasis: Phi^f -> Phi^f T.  Basis changes
    propagate to the ~-partner: the same T on a linked stripe of the same
    side; for the link e^{m,s}_0 ~ f^{n,s}_0 the partner is transformed so
    that the shared space changes basis consistently (rows by T, columns by
    T^{-1}).  ``partner_matrix``, when given, must equal that matrix.
    RowAdd: Phi_e += U Phi_{e'} with e' < e.  ColAdd: Phi^f += Phi^{f'} U with f' > f."""

    kind: str
    target: Letter
    matrix: np.ndarray = field(compare=False)
    source: Letter | None = None
    partner_matrix: np.ndarray | None = field(default=None, compare=False)


def _expected_partner(t: Transformation, x: Letter, y: Letter, p: int) -> np.ndarray:
    T = np.asarray(t.matrix) % p
    return T if x.side == y.side else la.inverse(T, p)


def apply_transformation(bm: BlockMatrix, t: Transformation, bunch: BunchSpec) -> BlockMatrix:
    p = bunch.p
    out = bm.copy()
    rs, cs = out.row_slices, out.col_slices
    M = np.asarray(t.matrix, dtype=np.int64) % p
    if t.kind in ("RowBasis", "ColBasis"):
        x = t.target
        if (t.kind == "RowBasis") != (x.side == "e"):
            raise InadmissibleMove(f"{t.kind} on a letter of the wrong side: {x}")
        size = bm.size(x)
        if M.shape != (size, size) or not la.is_invertible(M, p):
            raise InadmissibleMove(f"{t.kind} needs an invertible {size}x{size} matrix")
        todo = [(x, M)]
        y = bunch.partner(x)
        if y is not None and bm.size(y):
            exp = _expected_partner(t, x, y, p)
            if t.partner_matrix is not None and not np.array_equal(np.asarray(t.partner_matrix) % p, exp):
                raise LinkageBroken(f"{x} ~ {y} must change basis together")
            todo.append((y, exp))
        elif t.partner_matrix is not None:
            raise LinkageBroken(f"{x} has no linked stripe")
        for z, A in todo:
            if z.side == "e":
                out.mat[rs[z], :] = A @ out.mat[rs[z], :] % p
            else:
                out.mat[:, cs[z]] = out.mat[:, cs[z]] @ A % p
        return out
    if t.kind in ("RowAdd", "ColAdd"):
        x, y = t.target, t.source
        side = "e" if t.kind == "RowAdd" else "f"
        if y is None or x.side != side or y.side != side:
            raise InadmissibleMove(f"{t.kind} needs two letters of side {side}")
        if x.d != y.d or x == y:
            raise InadmissibleMove(f"{t.kind} between {y} and {x} is not inside one chain")
        if side == "e" and not bunch.less(y, x):
            raise InadmissibleMove(f"cannot add row stripe {y} into {x}: need {y} < {x}")
        if side == "f" and not bunch.less(x, y):
            raise InadmissibleMove(f"cannot add column stripe {y} into {x}: need {y} > {x}")
        if side == "e":
            if M.shape != (bm.size(x), bm.size(y)):
                raise InadmissibleMove("RowAdd matrix has the wrong shape")
            out.mat[rs[x], :] = (out.mat[rs[x], :] + M @ out.mat[rs[y], :]) % p
        else:
            if M.shape != (bm.size(y), bm.size(x)):
                raise InadmissibleMove("ColAdd matrix has the wrong shape")
            out.mat[:, cs[x]] = (out.mat[:, cs[x]] + out.mat[:, cs[y]] @ M) % p
        return out
    raise InadmissibleMove(f"unknown transformation kind {t.kind!r}")


def random_transformation(bm: BlockMatrix, bunch: BunchSpec, rng: np.random.Generator) -> Transformation | None:
    p = bunch.p
    kind = ("RowBasis", "ColBasis", "RowAdd", "ColAdd")[int(rng.integers(4))]
    stripes = [(x, s) for x, s in (bm.rows if kind.startswith("Row") else bm.cols) if s]
    if not stripes:
        return None
    x, s = stripes[int(rng.integers(len(stripes)))]
    if kind.endswith("Basis"):
        return Transformation(kind, x, la.random_invertible(rng, s, p))
    if kind == "RowAdd":
        src = [(y, t) for y, t in stripes if y.d == x.d and y != x and bunch.less(y, x)]
    else:
        src = [(y, t) for y, t in stripes if y.d == x.d and y != x and bunch.less(x, y)]
    if not src:
        return None
    y, t = src[int(rng.integers(len(src)))]
    shape = (s, t) if kind == "RowAdd" else (t, s)
    return Transformation(kind, x, rng.integers(0, p, size=shape), source=y)


def scramble(bm: BlockMatrix, bunch: BunchSpec, rng: np.random.Generator, moves: int = 50) -> BlockMatrix:
    out = bm
    for _ in range(moves):
        t = random_transformation(out, bunch, rng)
        if t is not None:
            out = apply_transformation(out, t, bunch)
    return out


# ---------------------------------------------------------------------------
# word enumeration


def _units(bunch: BunchSpec, universe: list[Letter]):
    singles, pairs = [], []
    uni = set(universe)
    for x in universe:
        y = bunch.partner(x)
        if y is None:
            singles.append((x,))
        elif y in uni:
            pairs.append((x, y))
    return singles, pairs


def _word_of(units, cyclic=False) -> Word:
    letters, rels = [], []
    for j, u in enumerate(units):
        if j:
            rels.append(DASH)
        letters.append(u[0])
        if len(u) == 2:
            rels.append(TILDE)
            letters.append(u[1])
    return Word(tuple(letters), tuple(rels), cyclic)


def _fits(budget: Counter | None, used: Counter, unit) -> bool:
    if budget is None:
        return True
    return all(used[x] + 1 <= budget.get(x, 0) for x in unit)


def enumerate_words(bunch: BunchSpec, universe: list[Letter], max_len: int, budget: Counter | None = None,
                    exact: bool = False) -> list[Word]:
    """Canonical non-cyclic words with at most max_len letters.  With a
    budget, letter multiplicities may not exceed it (and must match it when
    ``exact``)."""
    singles, pairs = _units(bunch, universe)
    out: set = set()

    def emit(units):
        w = _word_of(units)
        if exact and Counter(w.letters) != budget:
            return
        if validate_word(w, bunch):
            out.add(canonical_word(w))

    def extend(units, used, length):
        emit(units)
        last = units[-1][-1]
        if len(units) > 1 and len(units[-1]) == 1:
            return  # a lone letter can only end the word
        for u in pairs + singles:
            if length + len(u) > max_len or not bunch.dash_ok(last, u[0]) or not _fits(budget, used, u):
                continue
            used2 = used.copy()
            used2.update(u)
            extend(units + [u], used2, length + len(u))

    for u in singles + pairs:
        if len(u) <= max_len and _fits(budget, Counter(), u):
            extend([u], Counter(u), len(u))
    return sorted(out, key=lambda w: w.key)


def enumerate_cycles(bunch: BunchSpec, universe: list[Letter], max_len: int, budget: Counter | None = None,
                     exact: bool = False) -> list[Word]:
    """Non-periodic cycles (one representative per shift/inversion class)."""
    _, pairs = _units(bunch, universe)
    pairs = [u for u in pairs if u[0].kind != "diag"]
    out: dict = {}

    def canon(w: Word) -> Word:
        from .bunch import inverse, shift

        cands = []
        for k in range(0, len(w.letters), 2):
            s = shift(w, k)
            cands += [s, inverse(s)]
        return min(cands, key=lambda u: u.key)

    def extend(units, used, length):
        first = units[0]
        last = units[-1][-1]
        if bunch.dash_ok(last, first[0]):
            w = _word_of(units, cyclic=True)
            if (not exact or Counter(w.letters) == budget) and validate_word(w, bunch) and is_nonperiodic(w):
                c = canon(w)
                out[c.key] = c
        for u in pairs:
            if length + 2 > max_len or not bunch.dash_ok(last, u[0]) or not _fits(budget, used, u):
                continue
            used2 = used.copy()
            used2.update(u)
            extend(units + [u], used2, length + 2)

    for u in pairs:
        if 2 <= max_len and _fits(budget, Counter(), u):
            extend([u], Counter(u), 2)
    return [out[k] for k in sorted(out)]


def band_parameters(p: int, zv: int):
    """All (z, pi) with z * deg(pi) = zv, pi unital irreducible, pi != t."""
    for v in range(1, zv + 1):
        if zv % v:
            continue
        for pi in irreducible_polys(p, v):
            yield zv // v, pi


def enumerate_indecomposables(p: int, n: int, K: int, L: int, V: int = 1) -> list[Indecomposable]:
    bunch = BunchSpec(p, n)
    universe = bunch.letters(K)
    out = {}
    for w in enumerate_words(bunch, universe, L):
        x = Indecomposable.from_word(w, bunch)
        out[x.sort_key] = x
    for c in enumerate_cycles(bunch, universe, L):
        for zv in range(1, V + 1):
            for z, pi in band_parameters(p, zv):
                x = Indecomposable.band(BandDatum(c, z, pi), bunch)
                out[x.sort_key] = x
    return [out[k] for k in sorted(out)]


# ---------------------------------------------------------------------------
# decomposition


def _candidates(dims: Counter, bunch: BunchSpec):
    universe = sorted(dims, key=lambda x: x.key)
    total = sum(dims.values())
    for w in enumerate_words(bunch, universe, total, dims, exact=True):
        yield Indecomposable.from_word(w, bunch)
    g = 0
    for v in dims.values():
        g = np.gcd(g, v)
    for zv in range(1, int(g) + 1):
        if g % zv:
            continue
        sub = Counter({x: v // zv for x, v in dims.items()})
        for c in enumerate_cycles(bunch, universe, total // zv, sub, exact=True):
            for z, pi in band_parameters(bunch.p, zv):
                yield Indecomposable.band(BandDatum(c, z, pi), bunch)


def identify(piece: BlockMatrix, bunch: BunchSpec) -> Indecomposable:
    """The canonical string or band isomorphic to an indecomposable piece."""
    dims = Counter(piece.dims())
    seen = set()
    for cand in _candidates(dims, bunch):
        if cand.sort_key in seen:
            continue
        seen.add(cand.sort_key)
        X = cand.matrix()
        if isomorphic_to_local(piece, X, bunch):
            return cand
    raise StructureError(f"could not identify an indecomposable summand with dimensions {dict(dims)}")


def decompose(bm: BlockMatrix, bunch: BunchSpec, seed: int = 0) -> list[Indecomposable]:
    """Multiset (sorted list) of canonical indecomposable summands of bm."""
    bm.validate(bunch)
    bm, extras = preprocess_zp(bm, bunch)
    rng = np.random.default_rng(seed)
    out = list(extras)
    for piece in split_all(bm, bunch, rng):
        try:
            out.append(identify(piece, bunch))
        except StructureError:
            # an unlucky splitting attempt: retry harder on this piece
            again = split_all(piece, bunch, np.random.default_rng(seed + 1))
            if len(again) == 1:
                raise
            out.extend(identify(q, bunch) for q in again)
    return sorted(out)


def sum_of(items: list[Indecomposable], bunch: BunchSpec) -> BlockMatrix:
    return direct_sum([x.matrix() for x in items])


# ---------------------------------------------------------------------------
# the Chang case n = 2p - 1


@dataclass
class ChangMatrix:
    """Phi' with row stripes k (k = 0: S^{2p-1}, k > 0: M^{2p}_k) and column
    stripes l (l = 0: S^{4p-4}, l > 0: M^{4p-4}_l), plus the Z_(p) block Phi''."""

    p: int
    rows: list[tuple[int, int]]
    cols: list[tuple[int, int]]
    mat: np.ndarray
    zp: np.ndarray | list | None = None

    def __post_init__(self) -> None:
        zp = np.zeros((0, 0), dtype=object) if self.zp is None else np.array(self.zp, dtype=object)
        if zp.ndim != 2:
            zp = zp.reshape(len(zp), 0) if zp.size == 0 else zp
        self.zp = zp
        self.mat = np.asarray(self.mat, dtype=np.int64).reshape(sum(s for _, s in self.rows), sum(s for _, s in self.cols)) % self.p
        ks = [k for k, _ in self.rows]
        ls = [l for l, _ in self.cols]
        if len(set(ks)) != len(ks) or len(set(ls)) != len(ls) or min(ks + ls + [0]) < 0:
            raise StructureError("Chang stripes must have distinct subscripts >= 0")


def chang_row_less(a: int, b: int) -> bool:
    """Row order 0 < ... < 3 < 2 < 1: row b may receive additions from row a."""
    return _chang_key_row(a) < _chang_key_row(b)


def chang_col_less(a: int, b: int) -> bool:
    """Column order 1 < 2 < ... < 0: column a may receive additions from column b."""
    return _chang_key_col(a) < _chang_key_col(b)


def _chang_key_row(k: int):
    return (0, 0) if k == 0 else (1, -k)


def _chang_key_col(l: int):
    return (1, 0) if l == 0 else (0, l)


def decompose_chang(cm: ChangMatrix) -> list[Indecomposable]:
    p = cm.p
    out: list[Indecomposable] = []
    # Phi'' over Z_(p)
    h, w = cm.zp.shape
    if h or w:
        dg = diagonalize_zp(cm.zp.tolist(), p) if h and w else ZpDiagonal((), (), (), h, w)
        for s in dg.s_values:
            if s == INF:
                continue
            if s >= 1:
                out.append(Indecomposable.moore(4 * p - 4, int(s), p, 2 * p - 1))
        rank = sum(1 for s in dg.s_values if s != INF)
        out += [Indecomposable.sphere(4 * p - 5, p, 2 * p - 1)] * (h - rank)
        out += [Indecomposable.sphere(4 * p - 4, p, 2 * p - 1)] * (w - rank)
    # Phi' by pivoting: minimal row letter, then maximal column letter
    A = cm.mat.copy()
    row_lab = [k for k, s in cm.rows for _ in range(s)]
    col_lab = [l for l, s in cm.cols for _ in range(s)]
    alive_r = set(range(len(row_lab)))
    alive_c = set(range(len(col_lab)))
    while True:
        nz = [(i, j) for i in alive_r for j in alive_c if A[i, j]]
        if not nz:
            break
        i0 = min((i for i, _ in nz), key=lambda i: (_chang_key_row(row_lab[i]), i))
        j0 = max((j for i, j in nz if i == i0), key=lambda j: (_chang_key_col(col_lab[j]), -j))
        inv = pow(int(A[i0, j0]), -1, p)
        for j in alive_c:
            if j != j0 and A[i0, j]:
                A[:, j] = (A[:, j] - A[i0, j] * inv * A[:, j0]) % p
        for i in alive_r:
            if i != i0 and A[i, j0]:
                A[i, :] = (A[i, :] - A[i, j0] * inv * A[i0, :]) % p
        out.append(Indecomposable.chang(row_lab[i0], col_lab[j0], p))
        alive_r.discard(i0)
        alive_c.discard(j0)
    for i in sorted(alive_r):
        k = row_lab[i]
        out.append(Indecomposable.sphere(2 * p - 1, p, 2 * p - 1) if k == 0 else Indecomposable.moore(2 * p, k, p, 2 * p - 1))
    for j in sorted(alive_c):
        l = col_lab[j]
        out.append(Indecomposable.sphere(4 * p - 3, p, 2 * p - 1) if l == 0 else Indecomposable.moore(4 * p - 3, l, p, 2 * p - 1))
    return sorted(out)


def chang_admissible(kind: str, target: int, source: int) -> bool:
    if kind == "RowAdd":
        return target != source and chang_row_less(source, target)
    if kind == "ColAdd":
        return target != source and chang_col_less(target, source)
    raise ValidationError(kind)


def scramble_chang(cm: ChangMatrix, rng: np.random.Generator, moves: int = 50) -> ChangMatrix:
    p = cm.p
    A = cm.mat.copy()
    roff = {k: o for (k, _), o in zip(cm.rows, np.cumsum([0] + [s for _, s in cm.rows]))}
    coff = {l: o for (l, _), o in zip(cm.cols, np.cumsum([0] + [s for _, s in cm.cols]))}
    rsz, csz = dict(cm.rows), dict(cm.cols)
    rows = [k for k, s in cm.rows if s]
    cols = [l for l, s in cm.cols if s]
    for _ in range(moves):
        kind = int(rng.integers(4))
        if kind == 0 and rows:
            k = rows[int(rng.integers(len(rows)))]
            sl = slice(roff[k], roff[k] + rsz[k])
            A[sl, :] = la.random_invertible(rng, rsz[k], p) @ A[sl, :] % p
        elif kind == 1 and cols:
            l = cols[int(rng.integers(len(cols)))]
            sl = slice(coff[l], coff[l] + csz[l])
            A[:, sl] = A[:, sl] @ la.random_invertible(rng, csz[l], p) % p
        elif kind == 2 and len(rows) > 1:
            k, k2 = rng.choice(rows, 2, replace=False)
            if chang_admissible("RowAdd", int(k), int(k2)):
                U = rng.integers(0, p, size=(rsz[k], rsz[k2]))
                A[roff[k]:roff[k] + rsz[k], :] += U @ A[roff[k2]:roff[k2] + rsz[k2], :]
                A %= p
        elif kind == 3 and len(cols) > 1:
            l, l2 = rng.choice(cols, 2, replace=False)
            if chang_admissible("ColAdd", int(l), int(l2)):
                U = rng.integers(0, p, size=(csz[l2], csz[l]))
                A[:, coff[l]:coff[l] + csz[l]] += A[:, coff[l2]:coff[l2] + csz[l2]] @ U
                A %= p
    zp = cm.zp
    h, w = zp.shape
    if h and w:
        P = _random_local_unimodular(rng, h, p).astype(object)
        Q = _random_local_unimodular(rng, w, p).astype(object)
        zp = P.dot(zp).dot(Q)
    return ChangMatrix(p, cm.rows, cm.cols, A, zp)


def _random_local_unimodular(rng, n: int, p: int) -> np.ndarray:
    while True:
        M = rng.integers(-4, 5, size=(n, n))
        if la.is_invertible(M % p, p):
            return M


def chang_sum(items: list[Indecomposable], p: int) -> ChangMatrix:
    """Canonical Chang-case matrix realizing a multiset of summands."""
    rows: Counter = Counter()
    cols: Counter = Counter()
    entries = []
    zp_diag, zp_rows, zp_cols = [], 0, 0
    for x in items:
        if x.variant == "Chang":
            entries.append((x.k, x.l))
            rows[x.k] += 1
            cols[x.l] += 1
        elif x.variant == "Sphere" and x.d == 2 * p - 1:
            rows[0] += 1
        elif x.variant == "Moore" and x.d == 2 * p:
            rows[x.k] += 1
        elif x.variant == "Sphere" and x.d == 4 * p - 3:
            cols[0] += 1
        elif x.variant == "Moore" and x.d == 4 * p - 3:
            cols[x.l if x.l else x.k] += 1
        elif x.variant == "Moore" and x.d == 4 * p - 4:
            zp_diag.append(p ** x.k)
        elif x.variant == "Sphere" and x.d == 4 * p - 5:
            zp_rows += 1
        elif x.variant == "Sphere" and x.d == 4 * p - 4:
            zp_cols += 1
        else:
            raise StructureError(f"{x} is not a Chang-case summand")
    rk = sorted(rows, key=_chang_key_row)
    cl = sorted(cols, key=_chang_key_col)
    rstripes = [(k, rows[k]) for k in rk]
    cstripes = [(l, cols[l]) for l in cl]
    A = np.zeros((sum(rows.values()), sum(cols.values())), dtype=np.int64)
    roff = dict(zip(rk, np.cumsum([0] + [rows[k] for k in rk])))
    coff = dict(zip(cl, np.cumsum([0] + [cols[l] for l in cl])))
    for k, l in entries:
        A[roff[k], coff[l]] = 1
        roff[k] += 1
        coff[l] += 1
    h = len(zp_diag) + zp_rows
    w = len(zp_diag) + zp_cols
    zp = np.zeros((h, w), dtype=object)
    for i, v in enumerate(zp_diag):
        zp[i, i] = v
    return ChangMatrix(p, rstripes, cstripes, A, zp)


def chang_to_json(cm: ChangMatrix) -> dict:
    return {
        "p": cm.p,
        "n": 2 * cm.p - 1,
        "rows": [{"k": k, "size": s} for k, s in cm.rows],
        "cols": [{"l": l, "size": s} for l, s in cm.cols],
        "matrix": cm.mat.tolist(),
        "zp_block": [[_local_json(v, cm.p) for v in r] for r in cm.zp.tolist()],
        "zp_shape": list(cm.zp.shape),
    }


def _local_json(v, p: int) -> list[int]:
    x = LocalInt.of(v, p)
    return [x.numerator, x.denominator]


def chang_from_json(obj: dict) -> ChangMatrix:
    try:
        p = int(obj["p"])
        rows = [(int(r["k"]), int(r["size"])) for r in obj["rows"]]
        cols = [(int(c["l"]), int(c["size"])) for c in obj["cols"]]
        mat = np.array(obj.get("matrix") or np.zeros((sum(s for _, s in rows), sum(s for _, s in cols))), dtype=np.int64)
        zp_rows = obj.get("zp_block") or []
        shape = obj.get("zp_shape") or [len(zp_rows), len(zp_rows[0]) if zp_rows else 0]
        zp = np.zeros(tuple(shape), dtype=object)
        for i, r in enumerate(zp_rows):
            for j, v in enumerate(r):
                zp[i, j] = LocalInt(int(v[0]), int(v[1]), p) if isinstance(v, list) else int(v)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed Chang matrix JSON: {exc}") from exc
    return ChangMatrix(p, rows, cols, mat, zp)
