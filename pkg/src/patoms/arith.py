"""Exact arithmetic: the residue field F_p, p-local rationals, polynomials
over F_p and the structured blocks used by band matrices."""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import DivisionByZero, InvalidPolynomial, ValidationError

INF = math.inf


@lru_cache(maxsize=None)
def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % q for q in range(2, math.isqrt(p) + 1))


def check_odd_prime(p: int) -> int:
    if not isinstance(p, (int, np.integer)) or p < 3 or not is_prime(int(p)):
        raise ValidationError(f"p must be an odd prime, got {p!r}")
    return int(p)


# ---------------------------------------------------------------------------
# F_p


@dataclass(frozen=True)
class Fp:
    """An element of the residue field Z/p."""

    value: int
    p: int

    def __post_init__(self) -> None:
        check_odd_prime(self.p)
        object.__setattr__(self, "value", int(self.value) % self.p)

    def _coerce(self, other: "Fp | int") -> int:
        if isinstance(other, Fp):
            if other.p != self.p:
                raise ValidationError("mixed moduli")
            return other.value
        return int(other)

    def __add__(self, other):
        return Fp(self.value + self._coerce(other), self.p)

    __radd__ = __add__

    def __sub__(self, other):
        return Fp(self.value - self._coerce(other), self.p)

    def __rsub__(self, other):
        return Fp(self._coerce(other) - self.value, self.p)

    def __mul__(self, other):
        return Fp(self.value * self._coerce(other), self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return Fp(-self.value, self.p)

    def __truediv__(self, other):
        return self * fp_inverse(other if isinstance(other, Fp) else Fp(other, self.p))

    def __bool__(self) -> bool:
        return self.value != 0

    def __int__(self) -> int:
        return self.value

    def signed(self) -> int:
        """Representative in (-p/2, p/2), used for display."""
        return self.value - self.p if self.value > self.p // 2 else self.value


def fp_inverse(a: Fp) -> Fp:
    if a.value == 0:
        raise DivisionByZero("0 has no inverse in F_p")
    return Fp(pow(a.value, -1, a.p), a.p)


# ---------------------------------------------------------------------------
# p-local integers


@dataclass(frozen=True)
class LocalInt:
    """A rational a/b with p not dividing b: an element of Z_(p)."""

    numerator: int
    denominator: int
    p: int

    def __post_init__(self) -> None:
        check_odd_prime(self.p)
        if self.denominator == 0:
            raise DivisionByZero("zero denominator")
        f = Fraction(self.numerator, self.denominator)
        if f.denominator % self.p == 0:
            raise ValidationError(f"denominator of {f} is divisible by p={self.p}")
        object.__setattr__(self, "numerator", f.numerator)
        object.__setattr__(self, "denominator", f.denominator)

    @classmethod
    def of(cls, x: "int | Fraction | LocalInt", p: int) -> "LocalInt":
        if isinstance(x, LocalInt):
            return x
        f = Fraction(x)
        return cls(f.numerator, f.denominator, p)

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def _other(self, other) -> Fraction:
        return LocalInt.of(other, self.p).fraction

    def __add__(self, other):
        return LocalInt.of(self.fraction + self._other(other), self.p)

    __radd__ = __add__

    def __sub__(self, other):
        return LocalInt.of(self.fraction - self._other(other), self.p)

    def __rsub__(self, other):
        return LocalInt.of(self._other(other) - self.fraction, self.p)

    def __mul__(self, other):
        return LocalInt.of(self.fraction * self._other(other), self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return LocalInt(-self.numerator, self.denominator, self.p)

    def __truediv__(self, other):
        o = LocalInt.of(other, self.p)
        if not o.is_unit():
            raise DivisionByZero("division by a non-unit of Z_(p)")
        return LocalInt.of(self.fraction / o.fraction, self.p)

    def __bool__(self) -> bool:
        return self.numerator != 0

    def is_unit(self) -> bool:
        return self.numerator % self.p != 0

    def residue(self) -> Fp:
        return Fp(self.numerator * pow(self.denominator, -1, self.p), self.p)


def valuation(x: LocalInt) -> float | int:
    """p-adic valuation; ``math.inf`` for zero."""
    if x.numerator == 0:
        return INF
    v, a = 0, abs(x.numerator)
    while a % x.p == 0:
        a //= x.p
        v += 1
    return v


# ---------------------------------------------------------------------------
# polynomials over F_p


@dataclass(frozen=True)
class FpPolynomial:
    """A unital polynomial over F_p, coefficients stored low to high."""

    coeffs: tuple[int, ...]
    p: int

    def __post_init__(self) -> None:
        check_odd_prime(self.p)
        c = [int(a) % self.p for a in self.coeffs]
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        if len(c) < 2:
            raise InvalidPolynomial("degree must be at least 1")
        if c[-1] != 1:
            raise InvalidPolynomial("polynomial must be unital")
        object.__setattr__(self, "coeffs", tuple(c))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_t(self) -> bool:
        return self.coeffs == (0, 1)

    def __mul__(self, other: "FpPolynomial") -> "FpPolynomial":
        return FpPolynomial(tuple(poly_mul(self.coeffs, other.coeffs, self.p)), self.p)

    def __pow__(self, z: int) -> "FpPolynomial":
        out = (1,)
        for _ in range(z):
            out = tuple(poly_mul(out, self.coeffs, self.p))
        if len(out) < 2:
            raise InvalidPolynomial("power must be positive")
        return FpPolynomial(out, self.p)

    def __call__(self, x: int) -> int:
        return sum(a * pow(x, i, self.p) for i, a in enumerate(self.coeffs)) % self.p

    def __str__(self) -> str:
        return format_poly(self.coeffs, self.p)

    def to_json(self) -> list[int]:
        return list(self.coeffs)

    @classmethod
    def parse(cls, text: "str | list[int]", p: int) -> "FpPolynomial":
        """Accept a coefficient list (low to high) or text like ``t^2+1``."""
        if isinstance(text, (list, tuple)):
            return cls(tuple(int(a) for a in text), p)
        s = text.replace(" ", "").replace("−", "-")
        if not re.fullmatch(r"[-+0-9t^*]+", s):
            raise InvalidPolynomial(f"cannot parse polynomial {text!r}")
        coeffs: dict[int, int] = {}
        for sign, body in re.findall(r"([+-]?)([^+-]+)", s):
            m = re.fullmatch(r"(\d*)\*?(t(?:\^(\d+))?)?", body)
            if not m or (not m.group(1) and not m.group(2)):
                raise InvalidPolynomial(f"cannot parse term {body!r}")
            c = int(m.group(1)) if m.group(1) else 1
            e = (int(m.group(3)) if m.group(3) else 1) if m.group(2) else 0
            coeffs[e] = coeffs.get(e, 0) + (-c if sign == "-" else c)
        deg = max(coeffs)
        return cls(tuple(coeffs.get(i, 0) for i in range(deg + 1)), p)


def format_poly(coeffs, p: int) -> str:
    terms = []
    for i in range(len(coeffs) - 1, -1, -1):
        a = int(coeffs[i]) % p
        if a == 0:
            continue
        s = a - p if a > p // 2 else a
        mag = abs(s)
        mono = "" if i == 0 else ("t" if i == 1 else f"t^{i}")
        body = str(mag) if (mag != 1 or i == 0) else ""
        body = body + mono
        terms.append(("-" if s < 0 else "+") + body)
    out = "".join(terms) or "0"
    return out[1:] if out.startswith("+") else out


def poly_mul(a, b, p: int) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return out


def poly_divmod(a, b, p: int) -> tuple[list[int], list[int]]:
    """Division with remainder of coefficient lists (low to high)."""
    a = [x % p for x in a]
    b = list(b)
    while len(b) > 1 and b[-1] % p == 0:
        b.pop()
    inv = pow(b[-1], -1, p)
    q = [0] * max(len(a) - len(b) + 1, 1)
    while len(a) >= len(b) and any(a):
        shift = len(a) - len(b)
        c = a[-1] * inv % p
        q[shift] = c
        for i, y in enumerate(b):
            a[i + shift] = (a[i + shift] - c * y) % p
        while len(a) > 1 and a[-1] == 0:
            a.pop()
        if len(a) < len(b):
            break
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return q, a


def monic_polys(p: int, deg: int):
    for tail in itertools.product(range(p), repeat=deg):
        yield FpPolynomial(tuple(tail) + (1,), p)


def is_irreducible(pi: FpPolynomial) -> bool:
    """Trial division by every unital polynomial of degree <= deg/2."""
    for d in range(1, pi.degree // 2 + 1):
        for q in monic_polys(pi.p, d):
            _, r = poly_divmod(pi.coeffs, q.coeffs, pi.p)
            if not any(r):
                return False
    return True


def irreducible_polys(p: int, deg: int, exclude_t: bool = True):
    for q in monic_polys(p, deg):
        if exclude_t and q.is_t():
            continue
        if is_irreducible(q):
            yield q


def pi_star(pi: FpPolynomial) -> FpPolynomial:
    """Normalized reciprocal t^v pi(1/t) / pi(0)."""
    if pi.coeffs[0] == 0:
        raise InvalidPolynomial("pi* undefined when t divides pi")
    inv = pow(pi.coeffs[0], -1, pi.p)
    return FpPolynomial(tuple(a * inv for a in reversed(pi.coeffs)), pi.p)


# ---------------------------------------------------------------------------
# structured blocks


@dataclass(frozen=True)
class StructuredBlock:
    """Identity(size), Zero(size), Companion(pi, z) or Jordan(c, z)."""

    kind: str
    size: int
    pi: FpPolynomial | None = None
    z: int = 1
    c: int = 0
    p: int = 3

    @classmethod
    def identity(cls, size: int, p: int) -> "StructuredBlock":
        return cls("Identity", size, p=p)

    @classmethod
    def zero(cls, size: int, p: int) -> "StructuredBlock":
        return cls("Zero", size, p=p)

    @classmethod
    def companion(cls, pi: FpPolynomial, z: int = 1) -> "StructuredBlock":
        return cls("Companion", pi.degree * z, pi=pi, z=z, p=pi.p)

    @classmethod
    def jordan(cls, c: int, z: int, p: int) -> "StructuredBlock":
        return cls("Jordan", z, z=z, c=c % p, p=p)

    @classmethod
    def for_band(cls, pi: FpPolynomial, z: int) -> "StructuredBlock":
        """Closing block of a band: Jordan when pi = t - c, else Companion(pi^z)."""
        if pi.is_t():
            raise InvalidPolynomial("pi = t is excluded")
        if not is_irreducible(pi):
            raise InvalidPolynomial(f"{pi} is not irreducible")
        if pi.degree == 1:
            return cls.jordan(-pi.coeffs[0], z, pi.p)
        return cls.companion(pi, z)


def companion_matrix(coeffs, p: int) -> np.ndarray:
    """Companion matrix with ones on the subdiagonal and -c_i in the last column."""
    n = len(coeffs) - 1
    m = np.zeros((n, n), dtype=np.int64)
    for i in range(1, n):
        m[i, i - 1] = 1
    for i in range(n):
        m[i, n - 1] = (-int(coeffs[i])) % p
    return m


def structured_block_matrix(b: StructuredBlock) -> np.ndarray:
    p = b.p
    if b.kind == "Identity":
        return np.eye(b.size, dtype=np.int64)
    if b.kind == "Zero":
        return np.zeros((b.size, b.size), dtype=np.int64)
    if b.kind == "Jordan":
        m = np.eye(b.z, dtype=np.int64) * (b.c % p)
        for i in range(b.z - 1):
            m[i, i + 1] = 1
        return m
    if b.kind == "Companion":
        return companion_matrix((b.pi ** b.z).coeffs, p)
    raise ValidationError(f"unknown block kind {b.kind!r}")
