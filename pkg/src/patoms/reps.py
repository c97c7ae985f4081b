"""Representations of the bunch of chains: Hom spaces, endomorphism
idempotents, splitting into indecomposables and isomorphism tests."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sympy import ZZ
from sympy.polys import galoistools as gt

from . import linalg as la
from .blocks import BlockMatrix
from .bunch import BunchSpec, Letter
from .errors import StructureError


def _space(x: Letter, bunch: BunchSpec) -> frozenset:
    y = bunch.partner(x)
    return frozenset((x,) if y is None else (x, y))


@dataclass
class HomMap:
    """A morphism M -> N given by the row map A_E and the column map A_F,
    satisfying A_E Phi_M = Phi_N A_F."""

    AE: np.ndarray
    AF: np.ndarray

    def compose(self, other: "HomMap", p: int) -> "HomMap":
        """self ∘ other."""
        return HomMap(self.AE @ other.AE % p, self.AF @ other.AF % p)

    def is_invertible(self, p: int) -> bool:
        return la.is_invertible(self.AE, p) and la.is_invertible(self.AF, p)


def _blocks(M: BlockMatrix, N: BlockMatrix, bunch: BunchSpec):
    """Unknown blocks of a morphism M -> N: list of (shape, targets) where
    targets are ('E'|'F', slice in N, slice in M)."""
    out = []
    rsM, rsN, csM, csN = M.row_slices, N.row_slices, M.col_slices, N.col_slices
    sizeM, sizeN = M.dims(), N.dims()
    spaces: dict[frozenset, list[Letter]] = {}
    for x in set(sizeM) & set(sizeN):
        spaces.setdefault(_space(x, bunch), []).append(x)
    for sp in sorted(spaces, key=lambda s: min(x.key for x in s)):
        xs = sorted(spaces[sp], key=lambda x: x.key)
        targets = []
        for x in xs:
            if x.side == "e":
                targets.append(("E", rsN[x], rsM[x]))
            else:
                targets.append(("F", csN[x], csM[x]))
        out.append(((sizeN[xs[0]], sizeM[xs[0]]), targets))
    for side, sN, sM, tag in (("e", rsN, rsM, "E"), ("f", csN, csM, "F")):
        for x in sorted((x for x in sizeN if x.side == side), key=lambda x: x.key):
            for y in sorted((y for y in sizeM if y.side == side), key=lambda y: y.key):
                if x.d == y.d and x != y and bunch.less(y, x):
                    out.append(((sizeN[x], sizeM[y]), [(tag, sN[x], sM[y])]))
    return out


def hom_basis(M: BlockMatrix, N: BlockMatrix, bunch: BunchSpec) -> list[HomMap]:
    """A basis of Hom(M, N) over F_p."""
    p = bunch.p
    blocks = _blocks(M, N, bunch)
    hM, wM, hN, wN = M.height, M.width, N.height, N.width
    nunk = sum(a * b for (a, b), _ in blocks)
    L = np.zeros((hN * wM, nunk), dtype=np.int64)
    PE = np.zeros((nunk, hN, hM), dtype=np.int64)
    PF = np.zeros((nunk, wN, wM), dtype=np.int64)
    u = 0
    for (a, b), targets in blocks:
        for i in range(a):
            for j in range(b):
                for tag, sN, sM in targets:
                    r, c = sN.start + i, sM.start + j
                    if tag == "E":
                        PE[u, r, c] = 1
                        L[r * wM : (r + 1) * wM, u] += M.mat[c, :]
                    else:
                        PF[u, r, c] = 1
                        L[c::wM, u] -= N.mat[:, r] if wM else 0
                u += 1
    if nunk == 0:
        return []
    ns = la.nullspace(L % p, p) if L.shape[0] else np.eye(nunk, dtype=np.int64)
    out = []
    for v in ns:
        AE = np.tensordot(v, PE, axes=1) % p
        AF = np.tensordot(v, PF, axes=1) % p
        out.append(HomMap(AE, AF))
    return out


def end_basis(M: BlockMatrix, bunch: BunchSpec) -> list[HomMap]:
    return hom_basis(M, M, bunch)


def is_hom(f: HomMap, M: BlockMatrix, N: BlockMatrix, p: int) -> bool:
    return not ((f.AE @ M.mat - N.mat @ f.AF) % p).any()


def identity_map(M: BlockMatrix) -> HomMap:
    return HomMap(np.eye(M.height, dtype=np.int64), np.eye(M.width, dtype=np.int64))


# ---------------------------------------------------------------------------
# splitting


def _idempotent_from(a: HomMap, p: int) -> HomMap | None:
    """A nontrivial idempotent polynomial in ``a``, if its characteristic
    polynomial has two coprime factors."""
    big = la.block_diag(a.AE, a.AF)
    if big.shape[0] == 0:
        return None
    cp = la.charpoly(big, p)
    f = [int(c) for c in reversed(cp)]
    _, factors = gt.gf_factor(f, p, ZZ)
    if len(factors) < 2:
        return None
    g1 = gt.gf_pow(factors[0][0], factors[0][1], p, ZZ)
    h = gt.gf_quo(f, g1, p, ZZ)
    s, t, g = gt.gf_gcdex(g1, h, p, ZZ)
    e_poly = gt.gf_rem(gt.gf_mul(t, h, p, ZZ), f, p, ZZ)
    coeffs = [int(c) for c in reversed(e_poly)]
    eE = la.poly_of_matrix(coeffs, a.AE, p)
    eF = la.poly_of_matrix(coeffs, a.AF, p)
    return HomMap(eE, eF)


def _diag_part(e: HomMap, M: BlockMatrix, bunch: BunchSpec) -> HomMap:
    """Keep only the diagonal (per-letter) blocks."""
    e0E = np.zeros_like(e.AE)
    e0F = np.zeros_like(e.AF)
    for x, sl in M.row_slices.items():
        e0E[sl, sl] = e.AE[sl, sl]
    for x, sl in M.col_slices.items():
        e0F[sl, sl] = e.AF[sl, sl]
    return HomMap(e0E, e0F)


def split_by_idempotent(M: BlockMatrix, e: HomMap, bunch: BunchSpec) -> tuple[BlockMatrix, BlockMatrix]:
    p = bunch.p
    e0 = _diag_part(e, M, bunch)
    IE, IF = np.eye(M.height, dtype=np.int64), np.eye(M.width, dtype=np.int64)
    uE = (e.AE @ e0.AE + (IE - e.AE) @ (IE - e0.AE)) % p
    uF = (e.AF @ e0.AF + (IF - e.AF) @ (IF - e0.AF)) % p
    phi = la.inverse(uE, p) @ M.mat @ uF % p
    # per-space basis [image | kernel] of the block-diagonal idempotent e0
    PE, PF = np.zeros_like(IE), np.zeros_like(IF)
    ranks: dict[Letter, int] = {}
    done: dict[frozenset, np.ndarray] = {}

    def basis_for(block: np.ndarray) -> tuple[np.ndarray, int]:
        n = block.shape[0]
        im = la.row_space(block.T, p)  # columns of block span the image
        ker = la.nullspace(block, p)
        return np.vstack([im, ker]).T % p, im.shape[0]

    for x, sl in list(M.row_slices.items()) + list(M.col_slices.items()):
        if sl.stop == sl.start:
            continue
        sp = _space(x, bunch)
        blk = (e0.AE if x.side == "e" else e0.AF)[sl, sl]
        if sp not in done:
            done[sp] = basis_for(blk)
        P, r = done[sp]
        (PE if x.side == "e" else PF)[sl, sl] = P
        ranks[x] = r
    phi = la.inverse(PE, p) @ phi @ PF % p
    keep = {}
    for part in (0, 1):
        ridx, cidx, rows, cols = [], [], [], []
        for x, sl in M.row_slices.items():
            r = ranks.get(x, 0)
            idx = list(range(sl.start, sl.start + r)) if part == 0 else list(range(sl.start + r, sl.stop))
            ridx += idx
            rows.append((x, len(idx)))
        for x, sl in M.col_slices.items():
            r = ranks.get(x, 0)
            idx = list(range(sl.start, sl.start + r)) if part == 0 else list(range(sl.start + r, sl.stop))
            cidx += idx
            cols.append((x, len(idx)))
        sub = phi[np.ix_(ridx, cidx)] if ridx and cidx else np.zeros((len(ridx), len(cidx)), dtype=np.int64)
        keep[part] = BlockMatrix(M.p, M.n, [t for t in rows if t[1]], [t for t in cols if t[1]], sub)
    return keep[0], keep[1]


def try_split(M: BlockMatrix, bunch: BunchSpec, rng: np.random.Generator, attempts: int = 40):
    """Return two proper summands of M, or None if no splitting idempotent was found."""
    p = bunch.p
    basis = end_basis(M, bunch)
    if len(basis) <= 1:
        return None
    coeff_list = [np.eye(len(basis), dtype=np.int64)[i] for i in range(len(basis))]
    coeff_list += [rng.integers(0, p, size=len(basis)) for _ in range(attempts)]
    for c in coeff_list:
        aE = sum(int(ci) * b.AE for ci, b in zip(c, basis)) % p
        aF = sum(int(ci) * b.AF for ci, b in zip(c, basis)) % p
        e = _idempotent_from(HomMap(aE, aF), p)
        if e is None:
            continue
        A, B = split_by_idempotent(M, e, bunch)
        if A.dims() and B.dims():
            return A, B
    return None


def split_all(M: BlockMatrix, bunch: BunchSpec, rng: np.random.Generator) -> list[BlockMatrix]:
    stack, out = [M], []
    while stack:
        X = stack.pop()
        if not X.dims():
            continue
        got = try_split(X, bunch, rng)
        if got is None:
            out.append(X)
        else:
            stack.extend(got)
    return out


def isomorphic_to_local(M: BlockMatrix, X: BlockMatrix, bunch: BunchSpec) -> bool:
    """Whether M ≅ X, assuming End(X) is local and M, X have equal dimensions."""
    if M.dims() != X.dims():
        return False
    p = bunch.p
    G = hom_basis(X, M, bunch)
    if not G:
        return False
    F = hom_basis(M, X, bunch)
    for f in F:
        for g in G:
            if f.compose(g, p).is_invertible(p):
                return True
    return False


def is_isomorphic(M: BlockMatrix, N: BlockMatrix, bunch: BunchSpec) -> bool:
    """Exact isomorphism test: search the solution space of Hom(M, N) for an
    invertible element (exhaustive for small Hom spaces)."""
    if M.dims() != N.dims():
        return False
    p = bunch.p
    basis = hom_basis(M, N, bunch)
    if not basis:
        return not M.dims()
    if p ** len(basis) > 200_000:
        raise StructureError("Hom space too large for exhaustive isomorphism search")
    import itertools

    for c in itertools.product(range(p), repeat=len(basis)):
        AE = sum(ci * b.AE for ci, b in zip(c, basis)) % p
        AF = sum(ci * b.AF for ci, b in zip(c, basis)) % p
        if HomMap(AE, AF).is_invertible(p):
            return True
    return False
