"""Finite binary words and eventually periodic binary sequences.

Words are plain strings over ``"01"``.  An :class:`EpSeq` is a preperiod word
followed by a period word repeated forever; it is always stored in canonical
form (primitive period, shortest preperiod), so ``==`` is sequence equality.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from functools import total_ordering
from math import gcd

__all__ = [
    "EpSeq",
    "SeqKind",
    "check_word",
    "word_plus",
    "word_minus",
    "compare_lex",
    "compare_prefix",
    "shift",
    "conjugate",
    "classify_seq",
    "distinct_tails",
    "tails_from",
    "first_difference",
    "seq_metric",
    "pair_metric",
]

_LITERAL = re.compile(r"^([01]*)\(([01]+)\)\*$")
_SHORT = re.compile(r"^([01]*?)([01])\*$")


def check_word(w: str) -> str:
    if not isinstance(w, str) or any(c not in "01" for c in w):
        raise ValueError(f"not a binary word: {w!r}")
    return w


def word_plus(w: str) -> str:
    """w with its last digit raised from 0 to 1."""
    if not w or w[-1] != "0":
        raise ValueError(f"word must end in 0: {w!r}")
    return w[:-1] + "1"


def word_minus(w: str) -> str:
    """w with its last digit lowered from 1 to 0."""
    if not w or w[-1] != "1":
        raise ValueError(f"word must end in 1: {w!r}")
    return w[:-1] + "0"


def _primitive_root(w: str) -> str:
    n = len(w)
    for p in range(1, n + 1):
        if n % p == 0 and w[:p] * (n // p) == w:
            return w[:p]
    return w


@total_ordering
@dataclass(frozen=True)
class EpSeq:
    """The infinite sequence ``pre + per + per + ...``."""

    pre: str
    per: str

    def __post_init__(self):
        pre, per = check_word(self.pre), check_word(self.per)
        if not per:
            raise ValueError("period must be nonempty")
        per = _primitive_root(per)
        while pre and pre[-1] == per[-1]:
            pre, per = pre[:-1], per[-1] + per[:-1]
        object.__setattr__(self, "pre", pre)
        object.__setattr__(self, "per", per)

    @classmethod
    def parse(cls, text: str) -> "EpSeq":
        """Parse a literal such as ``0001(01)*``; ``10*`` abbreviates ``1(0)*``."""
        text = text.strip()
        m = _LITERAL.match(text) or _SHORT.match(text)
        if m is None:
            raise ValueError(f"malformed sequence literal: {text!r}")
        return cls(m.group(1), m.group(2))

    @classmethod
    def periodic(cls, w: str) -> "EpSeq":
        return cls("", w)

    @classmethod
    def from_json(cls, obj: dict) -> "EpSeq":
        return cls(obj["pre"], obj["per"])

    def to_json(self) -> dict:
        return {"pre": self.pre, "per": self.per}

    def __str__(self) -> str:
        return f"{self.pre}({self.per})*"

    def __repr__(self) -> str:
        return f"EpSeq('{self}')"

    def digit(self, i: int) -> int:
        """The i-th digit, counting from 1."""
        if i < 1:
            raise IndexError("digits are indexed from 1")
        if i <= len(self.pre):
            return int(self.pre[i - 1])
        return int(self.per[(i - len(self.pre) - 1) % len(self.per)])

    def prefix(self, n: int) -> str:
        if n <= len(self.pre):
            return self.pre[:n]
        k = n - len(self.pre)
        reps = -(-k // len(self.per))
        return self.pre + (self.per * reps)[:k]

    def horizon(self, other: "EpSeq") -> int:
        """Length after which agreement with ``other`` implies equality."""
        lcm = len(self.per) * len(other.per) // gcd(len(self.per), len(other.per))
        return len(self.pre) + len(other.pre) + lcm

    def __lt__(self, other: "EpSeq") -> bool:
        return compare_lex(self, other) < 0

    def __getitem__(self, key):
        if isinstance(key, slice):
            if key.step not in (None, 1) or key.stop is None:
                raise ValueError("only finite contiguous slices are supported")
            start = key.start or 0
            return self.prefix(key.stop)[start:]
        return self.digit(key + 1)


class SeqKind(enum.Enum):
    FINITE = "Finite"
    COFINITE = "CoFinite"
    DOUBLY_INFINITE = "DoublyInfinite"


def compare_prefix(a: str, b: str) -> int:
    """Compare two words digit by digit over their common length."""
    for x, y in zip(a, b):
        if x != y:
            return -1 if x < y else 1
    return 0


def compare_lex(a: EpSeq, b: EpSeq) -> int:
    """-1, 0 or 1 according to the lexicographic order of a and b."""
    if a == b:
        return 0
    n = a.horizon(b)
    c = compare_prefix(a.prefix(n), b.prefix(n))
    if c == 0:  # pragma: no cover - canonical forms make this unreachable
        raise AssertionError("distinct canonical sequences agree past the horizon")
    return c


def shift(a: EpSeq, n: int = 1) -> EpSeq:
    if n < 0:
        raise ValueError("shift count must be nonnegative")
    if n <= len(a.pre):
        return EpSeq(a.pre[n:], a.per)
    k = (n - len(a.pre)) % len(a.per)
    return EpSeq("", a.per[k:] + a.per[:k])


def conjugate(a: EpSeq) -> EpSeq:
    flip = str.maketrans("01", "10")
    return EpSeq(a.pre.translate(flip), a.per.translate(flip))


def classify_seq(a: EpSeq) -> SeqKind:
    if a.pre and a.per == "0":
        return SeqKind.FINITE
    if a.pre and a.per == "1":
        return SeqKind.COFINITE
    return SeqKind.DOUBLY_INFINITE


def tails_from(a: EpSeq, start: int = 0) -> list[EpSeq]:
    """All distinct shifts of ``a`` by at least ``start``, in order of first appearance."""
    out: list[EpSeq] = []
    seen = set()
    for n in range(start, max(start, len(a.pre)) + len(a.per)):
        t = shift(a, n)
        if t not in seen:
            seen.add(t)
            out.append(t)
    return out


def distinct_tails(a: EpSeq) -> list[EpSeq]:
    return tails_from(a, 0)


def first_difference(a: EpSeq, b: EpSeq) -> int | None:
    """1-based index of the first differing digit, or None when equal."""
    if a == b:
        return None
    n = a.horizon(b)
    pa, pb = a.prefix(n), b.prefix(n)
    for i, (x, y) in enumerate(zip(pa, pb), start=1):
        if x != y:
            return i
    raise AssertionError("unreachable")  # pragma: no cover


def seq_metric(a: EpSeq, b: EpSeq) -> float:
    j = first_difference(a, b)
    return 0.0 if j is None else 2.0 ** (-j)


def pair_metric(p: tuple[EpSeq, EpSeq], r: tuple[EpSeq, EpSeq]) -> float:
    return max(seq_metric(p[0], r[0]), seq_metric(p[1], r[1]))
