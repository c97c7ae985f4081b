"""Canonical string and band matrices, indecomposables, atoms, endomorphism
ring descriptors and genus counts."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .arith import INF, FpPolynomial, StructuredBlock, is_irreducible, pi_star, structured_block_matrix
from .blocks import BlockMatrix
from .bunch import (
    DASH,
    TILDE,
    BunchSpec,
    Letter,
    Word,
    check_word,
    inverse,
    is_nonperiodic,
    shift,
    twist_parity,
    word_from_json,
)
from .errors import InvalidPolynomial, NotNonPeriodic, Unsupported, ValidationError, WrongConstructor

SPHERE, MOORE, CHANG, STRING, BAND = "Sphere", "Moore", "Chang", "String", "Band"
_VARIANT_RANK = {SPHERE: 0, MOORE: 1, CHANG: 2, STRING: 3, BAND: 4}


# ---------------------------------------------------------------------------
# coordinates of words


def word_coordinates(w: Word, bunch: BunchSpec, zv: int = 1) -> tuple[dict, list[list[int]]]:
    """Stripe sizes and, for every letter occurrence, its coordinates inside
    its stripe.  Linked occurrences forming a ~-pair share coordinates, so
    the j-th coordinate of a stripe matches the j-th of its partner."""
    counters: dict[frozenset, int] = {}
    coords: list[list[int] | None] = [None] * len(w.letters)
    sizes: dict[Letter, int] = {}
    i = 0
    l = len(w.letters)
    while i < l:
        x = w.letters[i]
        if i + 1 < l and w.rels[i] == TILDE:
            y = w.letters[i + 1]
            space = frozenset((x, y))
            c = counters.get(space, 0)
            counters[space] = c + 1
            block = list(range(c * zv, (c + 1) * zv))
            coords[i] = coords[i + 1] = block
            for z in (x, y):
                sizes[z] = sizes.get(z, 0) + zv
            i += 2
        else:
            space = frozenset((x,))
            c = counters.get(space, 0)
            counters[space] = c + 1
            coords[i] = list(range(c * zv, (c + 1) * zv))
            sizes[x] = sizes.get(x, 0) + zv
            i += 1
    return sizes, coords


def _word_matrix(w: Word, bunch: BunchSpec, zv: int, closing: np.ndarray | None) -> BlockMatrix:
    sizes, coords = word_coordinates(w, bunch, zv)
    rows = sorted(((x, s) for x, s in sizes.items() if x.side == "e"), key=lambda t: t[0].key)
    cols = sorted(((x, s) for x, s in sizes.items() if x.side == "f"), key=lambda t: t[0].key)
    bm = BlockMatrix(bunch.p, bunch.n, rows, cols, np.zeros((sum(s for _, s in rows), sum(s for _, s in cols))))
    rs, cs = bm.row_slices, bm.col_slices
    dashes = w.dashes()
    for t, (i, j) in enumerate(dashes):
        if w.letters[i].side == "f":
            i, j = j, i
        e, f = w.letters[i], w.letters[j]
        r = [rs[e].start + c for c in coords[i]]
        c_ = [cs[f].start + c for c in coords[j]]
        is_closing = w.cyclic and t == len(dashes) - 1
        blk = closing if is_closing else np.eye(zv, dtype=np.int64)
        bm.mat[np.ix_(r, c_)] = (bm.mat[np.ix_(r, c_)] + blk) % bunch.p
    return bm


def string_matrix(w: Word, bunch: BunchSpec) -> BlockMatrix:
    if w.cyclic:
        raise WrongConstructor("string_matrix needs a non-cyclic word")
    check_word(w, bunch)
    return _word_matrix(w, bunch, 1, None)


@dataclass(frozen=True)
class BandDatum:
    cycle: Word
    z: int
    pi: FpPolynomial

    @property
    def zv(self) -> int:
        return self.z * self.pi.degree


def check_band(b: BandDatum, bunch: BunchSpec) -> BandDatum:
    if not b.cycle.cyclic:
        raise WrongConstructor("band needs a cycle")
    check_word(b.cycle, bunch)
    if not is_nonperiodic(b.cycle):
        raise NotNonPeriodic(f"{b.cycle} is periodic")
    if b.pi.is_t():
        raise InvalidPolynomial("pi = t is excluded")
    if b.pi.p != bunch.p:
        raise InvalidPolynomial("polynomial over the wrong field")
    if not is_irreducible(b.pi):
        raise InvalidPolynomial(f"{b.pi} is not irreducible")
    if b.z < 1:
        raise ValidationError("multiplicity z must be >= 1")
    return b


def closing_block(b: BandDatum) -> np.ndarray:
    return structured_block_matrix(StructuredBlock.for_band(b.pi, b.z))


def band_matrix(b: BandDatum, bunch: BunchSpec) -> BlockMatrix:
    check_band(b, bunch)
    return _word_matrix(b.cycle, bunch, b.zv, closing_block(b))


# ---------------------------------------------------------------------------
# classification


def classify_small(w: Word) -> str:
    if w.cyclic:
        raise WrongConstructor("classify_small needs a non-cyclic word")
    if len(w.letters) == 1:
        return SPHERE
    ndash = sum(1 for r in w.rels if r == DASH)
    if ndash == 0:
        return MOORE
    if ndash == 1:
        return CHANG
    return STRING


def letter_dim(x: Letter, bunch: BunchSpec) -> int:
    """Dimension of the cell carrying letter x in the gluing diagram."""
    return x.d if x.side == "e" else x.d + 2 * bunch.p - 2


def canonical_word(w: Word) -> Word:
    """Lexicographic minimum of w and w* (strings)."""
    return min(w, inverse(w), key=lambda u: u.key)


def band_orbit(b: BandDatum) -> list[BandDatum]:
    """All (shift, inversion) images of a band datum with the induced polynomial."""
    out = []
    l = len(b.cycle.letters)
    for k in range(0, l, 2):
        pi_k = pi_star(b.pi) if twist_parity(k, b.cycle) else b.pi
        wk = shift(b.cycle, k)
        out.append(BandDatum(wk, b.z, pi_k))
        out.append(BandDatum(inverse(wk), b.z, pi_k))
    return out


def _band_key(b: BandDatum) -> tuple:
    return (b.cycle.key, b.pi.coeffs)


def canonical_band(b: BandDatum) -> BandDatum:
    return min(band_orbit(b), key=_band_key)


@dataclass(frozen=True)
class Indecomposable:
    """Sphere(d) | Moore(d,k) | Chang(k,l) | String(word) | Band(word,z,pi).

    ``n`` is the bunch parameter; for the Chang case n = 2p-1.  Spheres,
    Moore and Chang objects arising from short words keep their word."""

    variant: str
    p: int
    n: int
    word: Word | None = None
    z: int | None = None
    pi: FpPolynomial | None = None
    d: int | None = None
    k: int | None = None
    l: int | None = None

    # -- constructors ------------------------------------------------------

    @classmethod
    def sphere(cls, d: int, p: int, n: int) -> "Indecomposable":
        return cls(SPHERE, p, n, d=d, k=0)

    @classmethod
    def moore(cls, d: int, k: int, p: int, n: int) -> "Indecomposable":
        return cls(MOORE, p, n, d=d, k=k)

    @classmethod
    def chang(cls, k: int, l: int, p: int) -> "Indecomposable":
        return cls(CHANG, p, 2 * p - 1, k=k, l=l)

    @classmethod
    def from_word(cls, w: Word, bunch: BunchSpec) -> "Indecomposable":
        check_word(w, bunch)
        w = canonical_word(w)
        v = classify_small(w)
        p = bunch.p
        if v == SPHERE:
            x = w.letters[0]
            if x.kind == "diag" and x.side == "f" and x.s != INF:
                # a lone f^{n,s}_0 with s finite is glued to the hidden S^m row
                return cls(MOORE, p, bunch.n, w, d=bunch.m + 1, k=int(x.s))
            return cls(SPHERE, p, bunch.n, w, d=letter_dim(x, bunch), k=0)
        if v == MOORE:
            x, y = w.letters
            k = int(x.s) if x.kind == "diag" else x.sub
            return cls(MOORE, p, bunch.n, w, d=max(letter_dim(x, bunch), letter_dim(y, bunch)), k=k)
        return cls(v, p, bunch.n, w)

    @classmethod
    def band(cls, b: BandDatum, bunch: BunchSpec) -> "Indecomposable":
        check_band(b, bunch)
        c = canonical_band(b)
        return cls(BAND, bunch.p, bunch.n, c.cycle, c.z, c.pi)

    # -- properties --------------------------------------------------------

    @property
    def is_chang_case(self) -> bool:
        return self.n == 2 * self.p - 1

    @property
    def bunch(self) -> BunchSpec:
        return BunchSpec(self.p, self.n)

    @property
    def band_datum(self) -> BandDatum:
        if self.variant != BAND:
            raise WrongConstructor("not a band")
        return BandDatum(self.word, self.z, self.pi)

    def matrix(self) -> BlockMatrix:
        if self.word is None:
            raise WrongConstructor(f"{self} has no block matrix in the bunch problem")
        if self.variant == BAND:
            return band_matrix(self.band_datum, self.bunch)
        return string_matrix(self.word, self.bunch)

    @property
    def sort_key(self) -> tuple:
        return (
            _VARIANT_RANK[self.variant],
            self.p,
            self.n,
            self.word.key if self.word is not None else (),
            self.z or 0,
            self.pi.coeffs if self.pi is not None else (),
            self.d if self.d is not None else -1,
            self.k if self.k is not None else -1,
            self.l if self.l is not None else -1,
        )

    def __lt__(self, other: "Indecomposable") -> bool:
        return self.sort_key < other.sort_key

    def __str__(self) -> str:
        if self.variant == BAND:
            return f"Band({self.word}; z={self.z}; pi={self.pi})"
        if self.word is not None:
            return f"{self.variant}({self.word})"
        if self.variant == SPHERE:
            return f"Sphere(S^{self.d})"
        if self.variant == MOORE:
            return f"Moore(M^{self.d}_{self.k})"
        return f"Chang(C_{self.k}{self.l})"

    __repr__ = __str__

    def to_json(self) -> dict:
        return {
            "variant": self.variant,
            "word": self.word.to_json() if self.word is not None else None,
            "z": self.z,
            "pi": self.pi.to_json() if self.pi is not None else None,
            "p": self.p,
            "n": self.n,
            "d": self.d,
            "k": self.k,
            "l": self.l,
            "atom": is_atom(self),
            "genus": genus_count(self),
            "lambda": lambda_ring(self) if self.variant in (STRING, BAND) else None,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Indecomposable":
        try:
            variant, p, n = obj["variant"], int(obj["p"]), int(obj["n"])
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed indecomposable JSON: {exc}") from exc
        if variant not in _VARIANT_RANK:
            raise ValidationError(f"unknown variant {variant!r}")
        if obj.get("word") is not None:
            bunch = BunchSpec(p, n)
            w = word_from_json(obj["word"], bunch)
            if variant == BAND:
                pi = FpPolynomial.parse(obj["pi"], p)
                return cls.band(BandDatum(w, int(obj.get("z") or 1), pi), bunch)
            x = cls.from_word(w, bunch)
            if x.variant != variant:
                raise ValidationError(f"word {w} is a {x.variant}, not a {variant}")
            return x
        if variant == CHANG:
            return cls.chang(int(obj["k"]), int(obj["l"]), p)
        if variant == SPHERE:
            return cls.sphere(int(obj["d"]), p, n)
        if variant == MOORE:
            return cls.moore(int(obj["d"]), int(obj["k"]), p, n)
        raise ValidationError(f"{variant} needs a word")


def canonical_representative(x):
    """Canonical form of a Word (string), BandDatum, or Indecomposable."""
    if isinstance(x, Indecomposable):
        if x.variant == BAND:
            c = canonical_band(x.band_datum)
            return Indecomposable(BAND, x.p, x.n, c.cycle, c.z, c.pi)
        if x.word is not None:
            return Indecomposable(x.variant, x.p, x.n, canonical_word(x.word), x.z, x.pi, x.d, x.k, x.l)
        return x
    if isinstance(x, BandDatum):
        return canonical_band(x)
    if isinstance(x, Word):
        if x.cyclic:
            raise WrongConstructor("cycles need band data")
        return canonical_word(x)
    raise ValidationError(f"cannot canonicalize {x!r}")


# ---------------------------------------------------------------------------
# atoms, endomorphisms, genus


def is_atom(x: Indecomposable) -> bool:
    if x.is_chang_case:
        return x.variant == CHANG
    if x.word is None:
        return False
    bunch = x.bunch
    has_low = any(y.side == "e" and y.d == bunch.n for y in x.word.letters)
    has_top = any(y.side == "f" and y.d == bunch.D for y in x.word.letters)
    return has_low and has_top


@dataclass(frozen=True)
class EndoDescriptor:
    kind: str
    k: int | None = None
    l: int | None = None
    local: bool = True

    def __str__(self) -> str:
        if self.kind == "Delta":
            return "Δ ⊂ Z_p × Z_p"
        if self.kind == "Delta_k":
            return f"Δ_{self.k} ⊂ Z_p × Z/p^{self.k}"
        return f"Δ_{self.k}{self.l} ⊂ Z/p^{self.k} × Z/p^{self.l}"


def endo_descriptor(x: Indecomposable) -> EndoDescriptor:
    if not (x.is_chang_case and x.variant == CHANG):
        raise Unsupported("endomorphism descriptors are provided for Chang atoms only")
    k, l = x.k, x.l
    if k == 0 and l == 0:
        return EndoDescriptor("Delta")
    if k == 0 or l == 0:
        return EndoDescriptor("Delta_k", k=max(k, l))
    return EndoDescriptor("Delta_kl", k=k, l=l)


def spherical_ends(x: Indecomposable) -> int:
    if x.variant != STRING or x.word is None:
        return 0
    a, b = x.word.ends()
    return int(a.is_spherical) + int(b.is_spherical)


def genus_count(x: Indecomposable) -> int:
    if x.variant == CHANG and x.is_chang_case:
        return (x.p - 1) // 2 if (x.k, x.l) == (0, 0) else 1
    if x.variant == CHANG and x.word is not None:
        a, b = x.word.ends()
        return (x.p - 1) // 2 if a.is_spherical and b.is_spherical else 1
    if x.variant == STRING:
        return (x.p - 1) // 2 if spherical_ends(x) == 2 else 1
    return 1


def lambda_ring(x: Indecomposable) -> str:
    if x.variant == BAND:
        return "Zero"
    if x.variant != STRING:
        raise Unsupported("Λ is defined for string and band polyhedra")
    return ("Zero", "Z", "Delta")[spherical_ends(x)]
