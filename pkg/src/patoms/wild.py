"""The matrix problem one step beyond the classified range (n = 4p-3),
the embedding of pairs of matrices into it, and a desk-scale check that
equivalence of embedded pairs is simultaneous conjugacy."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import linalg as la
from .arith import check_odd_prime
from .errors import DeskScaleExceeded, InadmissibleMove, SizeMismatch

MAX_SIZE = 2
DESK_PRIMES = (3,)


@dataclass
class WildMatrix:
    """Two horizontal stripes (the lambda- and mu-rows) of equal height, and
    vertical stripes labelled by k (ordered left to right)."""

    p: int
    mat: np.ndarray
    col_stripes: tuple[tuple[int, int], ...]  # (k, width)

    def __post_init__(self) -> None:
        self.mat = np.asarray(self.mat, dtype=np.int64) % self.p
        h, w = self.mat.shape
        if h % 2:
            raise SizeMismatch("both horizontal stripes must have the same number of rows")
        if sum(width for _, width in self.col_stripes) != w:
            raise SizeMismatch("vertical stripe widths do not add up to the matrix width")

    @property
    def half(self) -> int:
        return self.mat.shape[0] // 2

    def col_slice(self, k: int) -> slice:
        start = 0
        for kk, width in self.col_stripes:
            if kk == k:
                return slice(start, start + width)
            start += width
        raise InadmissibleMove(f"no vertical stripe {k}")

    def key(self) -> bytes:
        return self.mat.tobytes()


def build_wild_matrix(F, G, p: int) -> WildMatrix:
    """The 4s x 3s matrix [[I,0|0],[0,I|0],[F,I|0],[G,0|I]]; the first
    vertical stripe (width 2s) has label 2, the second (width s) label 1."""
    check_odd_prime(p)
    F = np.asarray(F, dtype=np.int64) % p
    G = np.asarray(G, dtype=np.int64) % p
    if F.ndim != 2 or F.shape[0] != F.shape[1] or F.shape != G.shape:
        raise SizeMismatch("F and G must be square matrices of the same size")
    s = F.shape[0]
    I, Z = np.eye(s, dtype=np.int64), np.zeros((s, s), dtype=np.int64)
    M = np.block([[I, Z, Z], [Z, I, Z], [F, I, Z], [G, Z, I]])
    return WildMatrix(p, M, ((2, 2 * s), (1, s)))


def _addition_allowed(k: int, l: int) -> bool:
    """Phi^k may receive Phi^l U when l > k, or when l = 0 < k."""
    return (l > k and k != 0) or l == 0 < k


@dataclass(frozen=True)
class WildMove:
    """SharedRowBasis(T) | ColBasis(k, T) | ColAdd(k <- l, U)."""

    kind: str
    matrix: np.ndarray
    k: int = 0
    l: int = 0


def apply_wild_move(phi: WildMatrix, mv: WildMove) -> WildMatrix:
    p = phi.p
    M = np.asarray(mv.matrix, dtype=np.int64) % p
    out = phi.mat.copy()
    h = phi.half
    if mv.kind == "SharedRowBasis":
        if M.shape != (h, h) or not la.is_invertible(M, p):
            raise InadmissibleMove("the shared row basis change must be invertible of the stripe height")
        out[:h] = M @ out[:h] % p
        out[h:] = M @ out[h:] % p
    elif mv.kind == "ColBasis":
        sl = phi.col_slice(mv.k)
        width = sl.stop - sl.start
        if M.shape != (width, width) or not la.is_invertible(M, p):
            raise InadmissibleMove("column basis change must be invertible")
        out[:, sl] = out[:, sl] @ M % p
    elif mv.kind == "ColAdd":
        if mv.k == mv.l or not _addition_allowed(mv.k, mv.l):
            raise InadmissibleMove(f"cannot add stripe {mv.l} into stripe {mv.k}")
        tk, tl = phi.col_slice(mv.k), phi.col_slice(mv.l)
        if M.shape != (tl.stop - tl.start, tk.stop - tk.start):
            raise InadmissibleMove("ColAdd matrix has the wrong shape")
        out[:, tk] = (out[:, tk] + out[:, tl] @ M) % p
    else:
        raise InadmissibleMove(f"unknown move {mv.kind!r}")
    return WildMatrix(p, out, phi.col_stripes)


def wild_transformations(phi: WildMatrix, rng: np.random.Generator, count: int = 1) -> list[WildMove]:
    """Random generators of the admissible group acting on phi."""
    p = phi.p
    moves = []
    labels = [k for k, _ in phi.col_stripes]
    widths = dict(phi.col_stripes)
    while len(moves) < count:
        c = int(rng.integers(3))
        if c == 0:
            moves.append(WildMove("SharedRowBasis", la.random_invertible(rng, phi.half, p)))
        elif c == 1:
            k = labels[int(rng.integers(len(labels)))]
            moves.append(WildMove("ColBasis", la.random_invertible(rng, widths[k], p), k=k))
        else:
            pairs = [(k, l) for k in labels for l in labels if k != l and _addition_allowed(k, l)]
            if pairs:
                k, l = pairs[int(rng.integers(len(pairs)))]
                moves.append(WildMove("ColAdd", rng.integers(0, p, size=(widths[l], widths[k])), k=k, l=l))
    return moves


def _check_scale(s: int, p: int) -> None:
    if s > MAX_SIZE or p not in DESK_PRIMES:
        raise DeskScaleExceeded(f"brute-force verdicts need s <= {MAX_SIZE} and p = 3 (got s={s}, p={p})")


def _group_unknowns(phi: WildMatrix):
    """Unknown layout: T (h x h), and the block upper-triangular column
    matrix C whose (i, j) entry is free when stripe(i) may feed stripe(j)."""
    h = phi.half
    labels = [k for k, w in phi.col_stripes for _ in range(w)]
    w = len(labels)
    cfree = [(i, j) for i in range(w) for j in range(w)
             if labels[i] == labels[j] or _addition_allowed(labels[j], labels[i])]
    return h, w, cfree


def equivalent(phi: WildMatrix, psi: WildMatrix, limit: int = 3 ** 14) -> bool:
    """Whether diag(T, T) phi = psi C for an admissible (T, C).

    The equation is linear in (T, C); the solution space is enumerated
    exhaustively and each element tested for invertibility."""
    p = phi.p
    if phi.mat.shape != psi.mat.shape or phi.col_stripes != psi.col_stripes:
        return False
    h, w, cfree = _group_unknowns(phi)
    nT = h * h
    nvar = nT + len(cfree)
    A, B = phi.mat, psi.mat
    rows = 2 * h * w
    L = np.zeros((rows, nvar), dtype=np.int64)
    # (diag(T,T) A)[r, c] = sum_j T[r mod h, j] A[(r//h)*h + j, c]
    for r in range(2 * h):
        blk, rr = divmod(r, h)
        for c in range(w):
            eq = r * w + c
            for j in range(h):
                L[eq, rr * h + j] += A[blk * h + j, c]
            for v, (i, j) in enumerate(cfree):
                if j == c:
                    L[eq, nT + v] -= B[r, i]
    N = la.nullspace(L % p, p)
    dim = N.shape[0]
    if p ** dim > limit:
        raise DeskScaleExceeded(f"solution space of dimension {dim} is too large to enumerate")
    if dim == 0:
        return h == 0 and w == 0
    labels = [k for k, width in phi.col_stripes for _ in range(width)]
    spans = {}
    for idx, k in enumerate(labels):
        spans.setdefault(k, []).append(idx)
    chunk = 50000
    combos = itertools.product(range(p), repeat=dim)
    while True:
        batch = np.array(list(itertools.islice(combos, chunk)), dtype=np.int64).reshape(-1, dim)
        if batch.shape[0] == 0:
            return False
        X = batch @ N % p
        T = X[:, :nT].reshape(-1, h, h)
        ok = _det_mod(T, p) != 0
        C = np.zeros((X.shape[0], w, w), dtype=np.int64)
        for v, (i, j) in enumerate(cfree):
            C[:, i, j] = X[:, nT + v]
        for idx in spans.values():
            ok &= _det_mod(C[:, idx][:, :, idx], p) != 0
        if ok.any():
            return True


def _det_mod(M: np.ndarray, p: int) -> np.ndarray:
    return np.rint(np.linalg.det(M.astype(float))).astype(np.int64) % p


def general_linear(s: int, p: int):
    for entries in itertools.product(range(p), repeat=s * s):
        T = np.array(entries, dtype=np.int64).reshape(s, s)
        if la.is_invertible(T, p):
            yield T


def conjugate(F, G, F2, G2, p: int) -> bool:
    """Exhaustive search for T in GL_s(F_p) with F2 T = T F and G2 T = T G."""
    F, G, F2, G2 = (np.asarray(x, dtype=np.int64) % p for x in (F, G, F2, G2))
    for T in general_linear(F.shape[0], p):
        if np.array_equal(T @ F % p, F2 @ T % p) and np.array_equal(T @ G % p, G2 @ T % p):
            return True
    return False


def conjugacy_iff_equivalent(F, G, F2, G2, p: int) -> tuple[bool, bool]:
    """(equivalence verdict, conjugacy verdict), computed independently."""
    F = np.asarray(F, dtype=np.int64)
    for X in (G, F2, G2):
        if np.asarray(X).shape != F.shape:
            raise SizeMismatch("all four matrices must have the same size")
    _check_scale(F.shape[0], p)
    eq = equivalent(build_wild_matrix(F, G, p), build_wild_matrix(F2, G2, p))
    return eq, conjugate(F, G, F2, G2, p)


def random_tuples(rng: np.random.Generator, s: int, p: int, trials: int):
    """Random (F, G, F', G'): half independent, half conjugate pairs."""
    for t in range(trials):
        F = rng.integers(0, p, size=(s, s))
        G = rng.integers(0, p, size=(s, s))
        if t % 2:
            T = la.random_invertible(rng, s, p)
            Ti = la.inverse(T, p)
            yield F, G, T @ F @ Ti % p, T @ G @ Ti % p
        else:
            yield F, G, rng.integers(0, p, size=(s, s)), rng.integers(0, p, size=(s, s))


def verdict_table(p: int, size: int, trials: int, seed: int = 0) -> list[dict]:
    rng = np.random.default_rng(seed)
    rows = []
    for F, G, F2, G2 in random_tuples(rng, size, p, trials):
        e, c = conjugacy_iff_equivalent(F, G, F2, G2, p)
        rows.append({"F": F.tolist(), "G": G.tolist(), "F2": F2.tolist(), "G2": G2.tolist(),
                     "equivalent": e, "conjugate": c, "agree": e == c})
    return rows
