"""Dense linear algebra over F_p on int64 numpy arrays."""

from __future__ import annotations

import numpy as np

from .errors import DivisionByZero, SizeMismatch


def mod(a, p: int) -> np.ndarray:
    return np.asarray(a, dtype=np.int64) % p


def rref(a, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns."""
    m = mod(a, p).copy()
    rows, cols = m.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + nz[0]
        if i != r:
            m[[r, i]] = m[[i, r]]
        m[r] = m[r] * pow(int(m[r, c]), -1, p) % p
        col = m[:, c].copy()
        col[r] = 0
        nzr = np.nonzero(col)[0]
        if nzr.size:
            m[nzr] = (m[nzr] - np.outer(col[nzr], m[r])) % p
        pivots.append(c)
        r += 1
    return m, pivots


def rank(a, p: int) -> int:
    a = np.asarray(a)
    if a.size == 0:
        return 0
    return len(rref(a, p)[1])


def nullspace(a, p: int) -> np.ndarray:
    """Basis of {x : a x = 0} as the rows of the returned array."""
    a = np.asarray(a, dtype=np.int64)
    n = a.shape[1]
    if a.shape[0] == 0:
        return np.eye(n, dtype=np.int64)
    r, piv = rref(a, p)
    free = [c for c in range(n) if c not in set(piv)]
    basis = np.zeros((len(free), n), dtype=np.int64)
    for t, f in enumerate(free):
        basis[t, f] = 1
        for i, c in enumerate(piv):
            basis[t, c] = (-r[i, f]) % p
    return basis


def row_space(a, p: int) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    if a.size == 0:
        return np.zeros((0, a.shape[1] if a.ndim == 2 else 0), dtype=np.int64)
    r, piv = rref(a, p)
    return r[: len(piv)]


def inverse(a, p: int) -> np.ndarray:
    a = mod(a, p)
    n = a.shape[0]
    if a.shape != (n, n):
        raise SizeMismatch("inverse of a non-square matrix")
    if n == 0:
        return a.copy()
    r, piv = rref(np.hstack([a, np.eye(n, dtype=np.int64)]), p)
    if len(piv) < n or piv[:n] != list(range(n)):
        raise DivisionByZero("singular matrix")
    return r[:, n:].copy()


def is_invertible(a, p: int) -> bool:
    a = np.asarray(a)
    return a.shape[0] == a.shape[1] and rank(a, p) == a.shape[0]


def solve(a, b, p: int) -> np.ndarray | None:
    """One solution x of a x = b (b a vector), or None."""
    a = mod(a, p)
    b = mod(b, p).reshape(-1, 1)
    r, piv = rref(np.hstack([a, b]), p)
    n = a.shape[1]
    if n in piv:
        return None
    x = np.zeros(n, dtype=np.int64)
    for i, c in enumerate(piv):
        x[c] = r[i, n]
    return x


def complement_basis(sub: np.ndarray, n: int, p: int) -> np.ndarray:
    """Standard basis vectors completing the row space of ``sub`` to F_p^n."""
    if sub.size == 0:
        return np.eye(n, dtype=np.int64)
    _, piv = rref(sub, p)
    free = [c for c in range(n) if c not in set(piv)]
    out = np.zeros((len(free), n), dtype=np.int64)
    for t, c in enumerate(free):
        out[t, c] = 1
    return out


def block_diag(*mats) -> np.ndarray:
    rows = sum(m.shape[0] for m in mats)
    cols = sum(m.shape[1] for m in mats)
    out = np.zeros((rows, cols), dtype=np.int64)
    r = c = 0
    for m in mats:
        out[r : r + m.shape[0], c : c + m.shape[1]] = m
        r += m.shape[0]
        c += m.shape[1]
    return out


def charpoly(a, p: int) -> list[int]:
    """Characteristic polynomial (low to high coefficients) via Hessenberg form."""
    h = mod(a, p).copy()
    n = h.shape[0]
    for j in range(n - 2):
        nz = np.nonzero(h[j + 1 :, j])[0]
        if nz.size == 0:
            continue
        i = j + 1 + nz[0]
        if i != j + 1:
            h[[i, j + 1]] = h[[j + 1, i]]
            h[:, [i, j + 1]] = h[:, [j + 1, i]]
        inv = pow(int(h[j + 1, j]), -1, p)
        for k in range(j + 2, n):
            u = h[k, j] * inv % p
            if u:
                h[k] = (h[k] - u * h[j + 1]) % p
                h[:, j + 1] = (h[:, j + 1] + u * h[:, k]) % p
    polys: list[list[int]] = [[1]]
    for k in range(1, n + 1):
        # (t - h_kk) p_{k-1}
        prev = polys[k - 1]
        cur = [0] + prev
        for i, c in enumerate(prev):
            cur[i] = (cur[i] - h[k - 1, k - 1] * c) % p
        prod = 1
        for i in range(k - 1, 0, -1):
            prod = prod * h[i, i - 1] % p
            coef = h[i - 1, k - 1] * prod % p
            if coef:
                for t, c in enumerate(polys[i - 1]):
                    cur[t] = (cur[t] - coef * c) % p
        polys.append([int(c) for c in cur])
    return polys[n]


def poly_of_matrix(coeffs, a, p: int) -> np.ndarray:
    """Evaluate a polynomial (low to high) at a square matrix by Horner."""
    a = mod(a, p)
    n = a.shape[0]
    out = np.zeros((n, n), dtype=np.int64)
    for c in reversed(list(coeffs)):
        out = (out @ a + int(c) * np.eye(n, dtype=np.int64)) % p
    return out


def random_invertible(rng: np.random.Generator, n: int, p: int) -> np.ndarray:
    while True:
        m = rng.integers(0, p, size=(n, n))
        if is_invertible(m, p):
            return m.astype(np.int64)
