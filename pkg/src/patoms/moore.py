"""Moore polyhedra, their p-local stable Hom groups and the composition
calculus of the distinguished generators."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

from .arith import check_odd_prime
from .errors import CompositionMismatch, OutOfRange, ValidationError

ZERO, ZLOCAL, CYCLIC, RANK2 = "Zero", "ZLocal", "CyclicPPower", "ElementaryRank2"

FAMILIES = ("alpha_plain", "alpha_upper", "alpha_lower", "alpha_both", "gamma", "gamma_star")


@dataclass(frozen=True, order=True)
class MooreObject:
    """M^d_k: cells in dimensions d-1 and d for k > 0, the sphere S^d for k = 0."""

    d: int
    k: int = 0

    def __post_init__(self) -> None:
        if self.k < 0:
            raise ValidationError("torsion exponent must be >= 0")

    def __str__(self) -> str:
        return f"S^{self.d}" if self.k == 0 else f"M^{self.d}_{self.k}"


@dataclass(frozen=True, order=True)
class GeneratorSymbol:
    """A distinguished generator.  ``d`` is the upper index of the symbol; the
    source/target Moore objects depend on the family and on p."""

    family: str
    d: int
    k: int
    l: int
    p: int

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValidationError(f"unknown family {self.family!r}")
        check_odd_prime(self.p)
        if self.k < 0 or self.l < 0:
            raise ValidationError("subscripts must be >= 0")
        needs_k = self.family in ("alpha_lower", "alpha_both", "gamma_star")
        needs_l = self.family in ("alpha_upper", "alpha_both")
        if (needs_k and self.k == 0) or (needs_l and self.l == 0):
            raise ValidationError(f"subscript outside the domain of {self.family}")

    @property
    def r(self) -> int:
        return self.d + 2 * self.p - 3

    @property
    def source(self) -> MooreObject:
        f = self.family
        if f in ("gamma", "gamma_star"):
            return MooreObject(self.d, self.l)
        shift = 1 if f in ("alpha_upper", "alpha_both") else 0
        return MooreObject(self.r + shift, self.l)

    @property
    def target(self) -> MooreObject:
        f = self.family
        shift = 1 if f in ("alpha_lower", "alpha_both", "gamma_star") else 0
        return MooreObject(self.d + shift, self.k)

    def is_identity(self) -> bool:
        return self.family == "gamma" and self.k == self.l

    def __str__(self) -> str:
        deco = {
            "alpha_plain": ("alpha", ""),
            "alpha_upper": ("alpha", "^*"),
            "alpha_lower": ("alpha", "_*"),
            "alpha_both": ("alpha", "^*_*"),
            "gamma": ("gamma", ""),
            "gamma_star": ("gamma", "*"),
        }[self.family]
        return f"{deco[0]}^{{{self.d}{deco[1]}}}_{{{self.k}{self.l}}}"


@dataclass(frozen=True)
class HomDescriptor:
    shape: str
    t: int = 0
    generators: tuple[GeneratorSymbol, ...] = ()
    p: int = 3
    out_of_range: bool = False

    @property
    def order(self) -> float | int:
        if self.shape == ZERO:
            return 1
        if self.shape == ZLOCAL:
            return float("inf")
        if self.shape == CYCLIC:
            return self.p ** self.t
        return self.p ** 2

    def exponent(self) -> int | None:
        """Modulus for coefficients (None for Z_p)."""
        if self.shape == ZLOCAL:
            return None
        if self.shape == ZERO:
            return 1
        return self.p ** self.t if self.shape == CYCLIC else self.p

    def __str__(self) -> str:
        p = self.p
        if self.shape == ZERO:
            return "0"
        if self.shape == ZLOCAL:
            return f"Z_{p}"
        if self.shape == CYCLIC:
            return f"Z/{p}" if self.t == 1 else f"Z/{p}^{self.t}"
        return f"Z/{p} ⊕ Z/{p}"

    def to_json(self) -> dict:
        return {
            "shape": self.shape,
            "t": self.t,
            "text": str(self),
            "generators": [str(g) for g in self.generators],
            "out_of_range": self.out_of_range,
        }


def stable_stem(p: int, q: int) -> int:
    """Order of the p-primary part of the q-th stable stem in the quoted range."""
    check_odd_prime(p)
    if not 0 < q < 2 * p * (p - 1) - 1:
        raise OutOfRange(f"stem {q} outside 0 < q < {2 * p * (p - 1) - 1}")
    for s in range(1, p):
        if q == 2 * s * (p - 1) - 1:
            return p
    return 1


def hom_group(source: MooreObject, target: MooreObject, p: int) -> HomDescriptor:
    """Hos_p(M^r_l, M^d_k) for d-1 <= r < d+2p-1."""
    check_odd_prime(p)
    r, l = source.d, source.k
    d, k = target.d, target.k
    e = r - d
    if not -1 <= e < 2 * p - 1:
        return HomDescriptor(ZERO, p=p, out_of_range=True)

    def g(family, dd):
        return (GeneratorSymbol(family, dd, k, l, p),)

    top = 2 * p - 3
    if k == 0 and l == 0:
        if e == 0:
            return HomDescriptor(ZLOCAL, generators=g("gamma", d), p=p)
        if e == top:
            return HomDescriptor(CYCLIC, 1, g("alpha_plain", d), p)
        return HomDescriptor(ZERO, p=p)
    if k > 0 and l > 0:
        if e == -1:
            return HomDescriptor(CYCLIC, min(k, l), g("gamma_star", d - 1), p)
        if e == 0:
            return HomDescriptor(CYCLIC, min(k, l), g("gamma", d), p)
        if e == top - 1:
            return HomDescriptor(CYCLIC, 1, g("alpha_lower", d - 1), p)
        if e == top:
            return HomDescriptor(RANK2, 1, g("alpha_plain", d) + g("alpha_both", d - 1), p)
        if e == top + 1:
            return HomDescriptor(CYCLIC, 1, g("alpha_upper", d), p)
        return HomDescriptor(ZERO, p=p)
    if l == 0:  # Moore target, sphere source
        if e == -1:
            return HomDescriptor(CYCLIC, k, g("gamma_star", d - 1), p)
        if e == top:
            return HomDescriptor(CYCLIC, 1, g("alpha_plain", d), p)
        if e == top - 1:
            return HomDescriptor(CYCLIC, 1, g("alpha_lower", d - 1), p)
        return HomDescriptor(ZERO, p=p)
    # k == 0: sphere target, Moore source
    if e == 0:
        return HomDescriptor(CYCLIC, l, g("gamma", d), p)
    if e == top:
        return HomDescriptor(CYCLIC, 1, g("alpha_plain", d), p)
    if e == top + 1:
        return HomDescriptor(CYCLIC, 1, g("alpha_upper", d), p)
    return HomDescriptor(ZERO, p=p)


def symbol_group(sym: GeneratorSymbol) -> HomDescriptor:
    return hom_group(sym.source, sym.target, sym.p)


@dataclass(frozen=True)
class Term:
    """A formal multiple ``coeff * symbol``; ``symbol is None`` means zero.
    ``outside`` marks a composite the calculus does not model."""

    symbol: GeneratorSymbol | None
    coeff: int = 1
    outside: bool = False

    @property
    def is_zero(self) -> bool:
        return self.symbol is None or self.coeff == 0

    def __str__(self) -> str:
        if self.is_zero:
            return "0 (outside modeled range)" if self.outside else "0"
        return str(self.symbol) if self.coeff == 1 else f"{self.coeff}*{self.symbol}"


def _term(symbol: GeneratorSymbol | None, coeff: int, outside: bool = False) -> Term:
    if symbol is None:
        return Term(None, 0, outside)
    mod = symbol_group(symbol).exponent()
    if mod is not None:
        coeff %= mod
    if coeff == 0:
        return Term(None, 0, outside)
    return Term(symbol, coeff, outside)


def compose(f: "GeneratorSymbol | Term", g: "GeneratorSymbol | Term") -> Term:
    """The composite f∘g (g applied first)."""
    tf = f if isinstance(f, Term) else Term(f)
    tg = g if isinstance(g, Term) else Term(g)
    if tf.is_zero or tg.is_zero:
        return Term(None, 0, tf.outside or tg.outside)
    a, b = tf.symbol, tg.symbol
    if a.p != b.p:
        raise CompositionMismatch("symbols over different primes")
    if b.target != a.source:
        raise CompositionMismatch(f"cannot compose {a} after {b}: {b.target} != {a.source}")
    coeff = tf.coeff * tg.coeff
    # generators of zero groups are zero
    if symbol_group(a).shape == ZERO or symbol_group(b).shape == ZERO:
        return Term(None, 0)
    if a.is_identity():
        return _term(b, coeff)
    if b.is_identity():
        return _term(a, coeff)
    res = _rule(a, b)
    if res is _OUTSIDE:
        return Term(None, 0, True)
    if res is None:
        return Term(None, 0)
    if isinstance(res, tuple):
        res, c = res
        if res is _OUTSIDE:
            return Term(None, 0, True)
        return _term(res, coeff * c)
    return _term(res, coeff)


_OUTSIDE = object()


def _make(family, d, k, l, p):
    try:
        return GeneratorSymbol(family, d, k, l, p)
    except ValidationError:
        return _OUTSIDE


def _rule(a: GeneratorSymbol, b: GeneratorSymbol):
    p = a.p
    fa, fb = a.family, b.family
    if fa.startswith("alpha") and fb in ("gamma", "gamma_star"):
        d, k, l = a.d, a.k, a.l
        if fb == "gamma":
            lp = b.l
            if fa in ("alpha_both", "alpha_upper"):
                return _make(fa, d, k, lp, p) if l <= lp else None
            return _make(fa, d, k, lp, p) if (l >= lp or l == 0) else None
        kp = b.l
        if fa == "alpha_upper":
            return _make("alpha_plain", d, k, kp, p)
        if fa == "alpha_both":
            return _make("alpha_lower", d, k, kp, p)
        return _OUTSIDE
    if fa in ("gamma", "gamma_star") and fb.startswith("alpha"):
        d, k, l = b.d, b.k, b.l
        kp = a.k
        if fa == "gamma":
            if fb in ("alpha_both", "alpha_lower"):
                # these factor through a bottom-cell inclusion, killed by the pinch (kp = 0)
                return _make(fb, d, kp, l, p) if (k >= kp and kp > 0) else None
            # a zero target subscript (the pinch onto a sphere) counts as infinity
            return _make(fb, d, kp, l, p) if (k <= kp or kp == 0) else None
        if fb == "alpha_plain":
            return _make("alpha_lower", d, kp, l, p)
        if fb == "alpha_upper":
            return _make("alpha_both", d, kp, l, p)
        return _OUTSIDE
    if fa in ("gamma", "gamma_star") and fb in ("gamma", "gamma_star"):
        return _gamma_rule(a, b)
    return _OUTSIDE


def _top_degree(k: int, l: int, p: int) -> int:
    """Degree on the top cell of the chosen generator M^d_l -> M^d_k."""
    return 1 if k == 0 else p ** max(l - k, 0)


def _bottom_degree(k: int, l: int, p: int) -> int:
    """Degree on the bottom cell of the generator M^d_l -> M^d_k (l > 0)."""
    return 0 if k == 0 else p ** max(k - l, 0)


def _gamma_rule(a: GeneratorSymbol, b: GeneratorSymbol):
    """Composites of the degree-type generators, read off cell degrees.

    gamma^d_{kl} has degrees (p^{k-l}, 1) or (1, p^{l-k}) on the two cells;
    gamma^{d*}_{kl} is the pinch onto the top cell of M^d_l followed by the
    inclusion of the bottom cell of M^{d+1}_k."""
    p = a.p
    if a.family == "gamma" and b.family == "gamma":
        c = _top_degree(a.k, a.l, p) * _top_degree(b.k, b.l, p) // _top_degree(a.k, b.l, p)
        return _make("gamma", a.d, a.k, b.l, p), c
    if a.family == "gamma_star" and b.family == "gamma":
        return _make("gamma_star", b.d, a.k, b.l, p), _top_degree(b.k, b.l, p)
    if a.family == "gamma" and b.family == "gamma_star":
        c = _bottom_degree(a.k, a.l, p)
        return (None if c == 0 else (_make("gamma_star", b.d, a.k, b.l, p), c))
    # pinch after inclusion of the bottom cell is null
    return None


def all_symbols(p: int, dims, kmax: int):
    """Every generator symbol with upper index in ``dims`` and subscripts <= kmax."""
    for fam, d, k, l in itertools.product(FAMILIES, dims, range(kmax + 1), range(kmax + 1)):
        try:
            yield GeneratorSymbol(fam, d, k, l, p)
        except ValidationError:
            continue


def hom_table(p: int, kmax: int, d: int = 0) -> dict:
    """Hom groups indexed by r-d in [-1, 2p-2] and (k, l) in [0, kmax]^2."""
    rows = {}
    for e in range(-1, 2 * p - 1):
        rows[e] = {
            (k, l): hom_group(MooreObject(d + e, l), MooreObject(d, k), p)
            for k in range(kmax + 1)
            for l in range(kmax + 1)
        }
    return rows


def hom_table_text(p: int, kmax: int) -> str:
    table = hom_table(p, kmax)
    cols = [(k, l) for k in range(kmax + 1) for l in range(kmax + 1)]
    cells = [[f"r-d={e}"] + [str(table[e][c]) for c in cols] for e in table]
    header = ["(k,l)"] + [f"({k},{l})" for k, l in cols]
    widths = [max(len(row[i]) for row in [header] + cells) for i in range(len(header))]
    lines = ["  ".join(h.ljust(w) for h, w in zip(row, widths)).rstrip() for row in [header] + cells]
    return "\n".join(lines) + "\n"


def hom_table_json(p: int, kmax: int) -> str:
    table = hom_table(p, kmax)
    out = {
        "p": p,
        "rows": [
            {"r_minus_d": e, "cells": [{"k": k, "l": l, **h.to_json()} for (k, l), h in row.items()]}
            for e, row in table.items()
        ],
    }
    return json.dumps(out, indent=2, ensure_ascii=False)
