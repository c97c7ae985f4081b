"""The bunch-of-chains alphabet for (p, n): letters, chain orders, the ~
relation, and the combinatorics of words and cycles."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import cached_property

from .arith import INF, check_odd_prime
from .errors import InvalidShift, InvalidWord, StructureError, UnsupportedRange

DASH, TILDE = "-", "~"
_KIND_RANK = {"plain": 0, "star": 1, "diag": 2}


def _s_text(s) -> str:
    return "inf" if s == INF else str(int(s))


@dataclass(frozen=True)
class Letter:
    """e^d_k, e^{d*}_k, e^{m,s}_0 (side 'e') or f^d_l, f^{d*}_l, f^{n,s}_0 (side 'f').

    ``d`` is the chain index; ``s`` is only meaningful for diag letters
    (positive integer or ``math.inf``)."""

    side: str
    d: int
    kind: str = "plain"
    sub: int = 0
    s: float | int = 0

    def __post_init__(self) -> None:
        if self.side not in ("e", "f") or self.kind not in _KIND_RANK:
            raise InvalidWord(f"malformed letter {self!r}")
        if self.kind == "diag":
            if self.sub != 0 or not (self.s == INF or (isinstance(self.s, int) and self.s >= 1)):
                raise InvalidWord("diag letters have subscript 0 and s in N or inf")
        else:
            object.__setattr__(self, "s", 0)

    @property
    def key(self) -> tuple:
        return (self.side, self.d, _KIND_RANK[self.kind], self.sub, self.s)

    def __lt__(self, other: "Letter") -> bool:
        return self.key < other.key

    def __str__(self) -> str:
        if self.kind == "diag":
            return f"{self.side}{self.d},{_s_text(self.s)}_0"
        star = "*" if self.kind == "star" else ""
        return f"{self.side}{self.d}{star}_{self.sub}"

    __repr__ = __str__

    def tex(self) -> str:
        if self.kind == "diag":
            s = r"\infty" if self.s == INF else str(self.s)
            return f"{self.side}^{{{self.d},{s}}}_0"
        star = "*" if self.kind == "star" else ""
        return f"{self.side}^{{{self.d}{star}}}_{{{self.sub}}}"

    @property
    def is_spherical(self) -> bool:
        """Plain letters with subscript 0 (diag letters do not count)."""
        return self.kind == "plain" and self.sub == 0


_LETTER_RE = re.compile(r"([ef])(\d+)(\*)?(?:,(\d+|inf|∞))?_(\d+)")


def parse_letter(text: str) -> Letter:
    m = _LETTER_RE.fullmatch(text.strip())
    if not m:
        raise InvalidWord(f"cannot parse letter {text!r}")
    side, d, star, s, sub = m.groups()
    if s is not None:
        if star or int(sub) != 0:
            raise InvalidWord(f"malformed diag letter {text!r}")
        return Letter(side, int(d), "diag", 0, INF if s in ("inf", "∞") else int(s))
    return Letter(side, int(d), "star" if star else "plain", int(sub))


@dataclass(frozen=True)
class BunchSpec:
    """The bunch of chains attached to (p, n), 2p <= n <= 4(p-1)."""

    p: int
    n: int

    def __post_init__(self) -> None:
        check_odd_prime(self.p)
        if self.n == 2 * self.p - 1:
            raise UnsupportedRange("n = 2p-1 is the Chang case; use reduce.decompose_chang")
        if not 2 * self.p <= self.n <= 4 * (self.p - 1):
            raise UnsupportedRange(f"n={self.n} outside 2p <= n <= 4(p-1) for p={self.p}")

    @property
    def m(self) -> int:
        return self.n + 2 * self.p - 3

    @property
    def D(self) -> int:
        """Top chain index 2(n-p)+1."""
        return 2 * (self.n - self.p) + 1

    @property
    def top(self) -> bool:
        """True when n = 4(p-1), where the e^{m,s}_0 letters exist."""
        return self.n == 4 * (self.p - 1)

    @property
    def chains(self) -> range:
        return range(self.n, self.D + 1)

    def contains(self, x: Letter) -> bool:
        n, D = self.n, self.D
        if x.kind == "plain":
            if x.d == n:
                return x.side == "e" and x.sub == 0
            if not n < x.d <= D:
                return False
            if self.top and x.side == "e" and x.d == self.m and x.sub == 0:
                return False  # replaced by the e^{m,s}_0 letters
            return True
        if x.kind == "star":
            return n <= x.d <= D - 1 and x.sub >= 1
        if x.side == "f":
            return x.d == n
        return self.top and x.d == self.m

    def require(self, x: Letter) -> Letter:
        if not self.contains(x):
            raise InvalidWord(f"letter {x} is not in the bunch for p={self.p}, n={self.n}")
        return x

    def partner(self, x: Letter) -> Letter | None:
        """The ~-partner of x, if any."""
        if x.kind == "star":
            return Letter(x.side, x.d + 1, "plain", x.sub)
        if x.kind == "plain" and x.sub >= 1 and x.d > self.n:
            return Letter(x.side, x.d - 1, "star", x.sub)
        if x.kind == "diag" and self.top and x.s != INF:
            return Letter("f" if x.side == "e" else "e", self.n if x.side == "e" else self.m, "diag", 0, x.s)
        return None

    def is_linked(self, x: Letter) -> bool:
        return self.partner(x) is not None

    def order_key(self, x: Letter) -> tuple:
        """Ascending position of x inside its chain E_d or F_d."""
        if x.side == "e":
            if x.kind == "diag":
                return (0, -x.s)
            if x.kind == "plain":
                return (1, x.sub)
            return (2, -x.sub)
        if x.kind == "diag":
            return (1, x.s)
        if x.kind == "plain":
            return (1, x.sub if x.sub > 0 else INF)
        return (2, -x.sub)

    def less(self, x: Letter, y: Letter) -> bool:
        if x.side != y.side or x.d != y.d:
            raise StructureError(f"{x} and {y} lie in different chains")
        return self.order_key(x) < self.order_key(y)

    def dash_ok(self, x: Letter, y: Letter) -> bool:
        return x.side != y.side and x.d == y.d

    def tilde_ok(self, x: Letter, y: Letter) -> bool:
        return self.partner(x) == y

    def letters(self, K: int, S: int | None = None) -> list[Letter]:
        """The universe with subscripts <= K and finite s <= S (default max(K,1))."""
        S = max(K, 1) if S is None else S
        out: list[Letter] = []
        for side in ("e", "f"):
            for d in self.chains:
                for k in range(K + 1):
                    for kind in ("plain", "star"):
                        x = Letter(side, d, kind, k)
                        if self.contains(x):
                            out.append(x)
            svals = list(range(1, S + 1)) + [INF]
            for s in svals:
                x = Letter(side, self.n if side == "f" else self.m, "diag", 0, s)
                if self.contains(x):
                    out.append(x)
        return sorted(set(out), key=lambda x: x.key)

    def chain_letters(self, K: int, side: str, d: int, S: int | None = None) -> list[Letter]:
        return sorted(
            (x for x in self.letters(K, S) if x.side == side and x.d == d), key=self.order_key
        )


@dataclass(frozen=True)
class Word:
    """x_1 r_1 x_2 ... r_{l-1} x_l; for cycles the closing dash x_l - x_1 is implicit."""

    letters: tuple[Letter, ...]
    rels: tuple[str, ...]
    cyclic: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "letters", tuple(self.letters))
        object.__setattr__(self, "rels", tuple(self.rels))

    def __len__(self) -> int:
        return len(self.letters)

    @property
    def key(self) -> tuple:
        return (tuple(x.key for x in self.letters), self.rels, self.cyclic)

    def __str__(self) -> str:
        parts = [str(self.letters[0])]
        for r, x in zip(self.rels, self.letters[1:]):
            parts += [r, str(x)]
        if self.cyclic:
            parts.append(DASH)
        return " ".join(parts)

    __repr__ = __str__

    def to_json(self) -> dict:
        return {
            "letters": [str(x) for x in self.letters],
            "relations": list(self.rels),
            "cyclic": self.cyclic,
        }

    @property
    def E(self) -> list[int]:
        return [i for i, x in enumerate(self.letters) if x.side == "e"]

    @property
    def F(self) -> list[int]:
        return [i for i, x in enumerate(self.letters) if x.side == "f"]

    def dashes(self) -> list[tuple[int, int]]:
        """Index pairs joined by '-' (including the closing dash of a cycle)."""
        out = [(i, i + 1) for i, r in enumerate(self.rels) if r == DASH]
        if self.cyclic:
            out.append((len(self.letters) - 1, 0))
        return out

    def ends(self) -> tuple[Letter, Letter]:
        return self.letters[0], self.letters[-1]


def word_from_json(obj, bunch: BunchSpec | None = None) -> Word:
    if isinstance(obj, str):
        if bunch is None:
            raise InvalidWord("parsing text words needs the bunch")
        return parse_word(obj, bunch)
    letters = tuple(parse_letter(s) for s in obj["letters"])
    return Word(letters, tuple(obj.get("relations", ())), bool(obj.get("cyclic", False)))


@dataclass(frozen=True)
class ValidationResult:
    ok: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def validate_word(w: Word, bunch: BunchSpec) -> ValidationResult:
    def bad(msg):
        return ValidationResult(False, msg)

    l = len(w.letters)
    if l == 0:
        return bad("empty word")
    for x in w.letters:
        if not bunch.contains(x):
            return bad(f"letter {x} not in the bunch")
    if len(w.rels) != l - 1:
        return bad("need exactly one relation between consecutive letters")
    for i, r in enumerate(w.rels):
        if r not in (DASH, TILDE):
            return bad(f"unknown relation {r!r}")
        if i + 1 < len(w.rels) and w.rels[i + 1] == r:
            return bad(f"clause (a): r_{i + 1} = r_{i + 2}")
        x, y = w.letters[i], w.letters[i + 1]
        if r == DASH and not bunch.dash_ok(x, y):
            return bad(f"clause (b): {x} - {y} is not a dash")
        if r == TILDE and not bunch.tilde_ok(x, y):
            return bad(f"clause (b): {x} ~ {y} is not linked")
    if l == 1 and bunch.is_linked(w.letters[0]):
        return bad("a one-letter word must be an unlinked letter")
    if w.cyclic:
        if l < 2 or w.rels[0] != TILDE or w.rels[-1] != TILDE:
            return bad("cycle must start and end with '~'")
        if not bunch.dash_ok(w.letters[-1], w.letters[0]):
            return bad("cycle needs x_l - x_1")
    else:
        if w.rels and w.rels[0] == DASH and bunch.is_linked(w.letters[0]):
            return bad("clause (c): dash-ended word starts with a linked letter")
        if w.rels and w.rels[-1] == DASH and bunch.is_linked(w.letters[-1]):
            return bad("clause (c): dash-ended word ends with a linked letter")
    diag = sum(
        1
        for i, r in enumerate(w.rels)
        if r == TILDE and w.letters[i].kind == "diag"
    )
    if diag > 1:
        return bad("more than one diag fragment e^{m,s} ~ f^{n,s}")
    if diag and w.cyclic:
        return bad("a cycle cannot contain a diag fragment")
    return ValidationResult(True)


def check_word(w: Word, bunch: BunchSpec) -> Word:
    res = validate_word(w, bunch)
    if not res:
        raise InvalidWord(f"{w}: {res.reason}")
    return w


_TOKEN_RE = re.compile(r"[ef]\d+\*?(?:,(?:\d+|inf|∞))?_\d+|[-~−]")


def parse_word(text: str, bunch: BunchSpec, cyclic: bool | None = None) -> Word:
    """Parse the full alternating form or the compressed form (linked
    letters written once).  A trailing '-' marks a cycle."""
    s = text.strip()
    tokens = _TOKEN_RE.findall(s)
    if "".join(tokens) != re.sub(r"\s+", "", s):
        raise InvalidWord(f"cannot parse word {text!r}")
    tokens = [DASH if t == "−" else t for t in tokens]
    if not tokens:
        raise InvalidWord("empty word")
    trailing = tokens[-1] == DASH
    if trailing:
        tokens = tokens[:-1]
    is_cycle = trailing if cyclic is None else cyclic
    if any(t in (DASH, TILDE) for t in tokens):
        letters = [parse_letter(t) for t in tokens[0::2]]
        rels = tokens[1::2]
        if any(r not in (DASH, TILDE) for r in rels) or any(
            t in (DASH, TILDE) for t in tokens[0::2]
        ):
            raise InvalidWord(f"letters and relations must alternate in {text!r}")
        return check_word(Word(tuple(letters), tuple(rels), is_cycle), bunch)
    return expand_compressed([parse_letter(t) for t in tokens], bunch, is_cycle)


def expand_compressed(tokens: list[Letter], bunch: BunchSpec, cyclic: bool = False) -> Word:
    """Expand 'x' to 'x ~ partner' or 'partner ~ x' so that every dash is valid."""
    for x in tokens:
        bunch.require(x)
    options = []
    for x in tokens:
        y = bunch.partner(x)
        options.append([(x,)] if y is None else [(x, y), (y, x)])

    def dfs(i: int, acc: list[tuple[Letter, ...]]):
        if i == len(options):
            letters, rels = [], []
            for j, unit in enumerate(acc):
                if j:
                    rels.append(DASH)
                letters.append(unit[0])
                if len(unit) == 2:
                    rels.append(TILDE)
                    letters.append(unit[1])
            w = Word(tuple(letters), tuple(rels), cyclic)
            return w if validate_word(w, bunch) else None
        for unit in options[i]:
            if acc and not bunch.dash_ok(acc[-1][-1], unit[0]):
                continue
            got = dfs(i + 1, acc + [unit])
            if got is not None:
                return got
        return None

    w = dfs(0, [])
    if w is None:
        raise InvalidWord("no valid expansion of " + " ".join(map(str, tokens)))
    return w


def inverse(w: Word) -> Word:
    return Word(tuple(reversed(w.letters)), tuple(reversed(w.rels)), w.cyclic)


def _cyclic_rels(w: Word) -> list[str]:
    return list(w.rels) + [DASH]


def shift(w: Word, k: int) -> Word:
    """The k-th shift x_{k+1} r_{k+1} ... r_{k-1} x_k of a cycle (k even)."""
    if not w.cyclic:
        raise InvalidShift("only cycles can be shifted")
    if k % 2:
        raise InvalidShift(f"shift must be even, got {k}")
    l = len(w.letters)
    k %= l
    rels = _cyclic_rels(w)
    letters = w.letters[k:] + w.letters[:k]
    rr = rels[k:] + rels[:k]
    return Word(letters, tuple(rr[:-1]), True)


def is_nonperiodic(w: Word) -> bool:
    return all(shift(w, k) != w for k in range(2, len(w.letters), 2))


def _same_side_at(w: Word, i: int) -> bool:
    """Whether x_i and x_{i-1} (1-based, x_0 = x_l) lie on the same side."""
    l = len(w.letters)
    return w.letters[(i - 1) % l].side == w.letters[(i - 2) % l].side


def nu(k: int, w: Word) -> int:
    """Number of even 0 < i < k with x_i, x_{i-1} both in E or both in F."""
    return sum(1 for i in range(2, k, 2) if _same_side_at(w, i))


def twist_parity(k: int, w: Word) -> int:
    """Parity deciding whether the k-th shift replaces pi by pi*.

    Counts the even 0 < i <= k with x_{i-1}, x_i on the same side, i.e. every
    ~-pair carried from the front of the cycle to its end by the shift."""
    return nu(k + 1, w) % 2
