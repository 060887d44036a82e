"""Number plumbing: literal parsing, per-precision mpmath contexts, forward-mode duals."""
from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache

from mpmath.ctx_iv import MPIntervalContext
from mpmath.ctx_mp import MPContext

DEFAULT_PREC = 128

_RATIONAL = re.compile(r"^[+-]?\d+/\d+$")
_DECIMAL = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")


@lru_cache(maxsize=None)
def mpctx(prec: int) -> MPContext:
    """A private mpmath context fixed at ``prec`` bits."""
    ctx = MPContext()
    ctx.prec = prec
    return ctx


@lru_cache(maxsize=None)
def ivctx(prec: int) -> MPIntervalContext:
    """A private interval context fixed at ``prec`` bits."""
    ctx = MPIntervalContext()
    ctx.prec = prec
    return ctx


def parse_real(text) -> Fraction:
    """Parse ``p/q`` or a decimal literal into an exact rational."""
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    s = str(text).strip()
    if _RATIONAL.match(s):
        num, den = s.split("/")
        if int(den) == 0:
            raise ValueError(f"zero denominator in {text!r}")
        return Fraction(int(num), int(den))
    if _DECIMAL.match(s):
        return Fraction(s)
    raise ValueError(f"not a decimal or p/q literal: {text!r}")


def is_exact(v) -> bool:
    return isinstance(v, (int, Fraction))


def to_mpf(v, prec: int):
    ctx = mpctx(prec)
    if isinstance(v, Fraction):
        return ctx.mpf(v.numerator) / v.denominator
    return ctx.mpf(v)


def to_interval(v, prec: int, radius=0):
    """Enclose ``v`` (exact, float, mpf or interval) widened by ``radius``."""
    iv = ivctx(prec)
    if isinstance(v, Fraction):
        x = iv.mpf(v.numerator) / iv.mpf(v.denominator)
    elif isinstance(v, int):
        x = iv.mpf(v)
    elif hasattr(v, "a") and hasattr(v, "b"):
        x = iv.mpf([v.a, v.b])
    else:
        x = iv.mpf(v)
    if radius:
        r = iv.mpf(radius)
        x = iv.mpf([(x - r).a, (x + r).b])
    return x


def decimal_string(v, digits: int = 40) -> str:
    """Deterministic decimal rendering of an exact or high-precision value."""
    if isinstance(v, Fraction):
        if v.denominator == 1:
            return str(v.numerator)
        v = to_mpf(v, max(64, int(digits * 3.33) + 16))
    if isinstance(v, float):
        return repr(v)
    from mpmath import libmp

    return libmp.to_str(v._mpf_, digits)


class Dual2:
    """Value with its two partial derivatives, for Newton steps in (q0, q1)."""

    __slots__ = ("v", "d0", "d1")

    def __init__(self, v, d0=0, d1=0):
        self.v, self.d0, self.d1 = v, d0, d1

    @staticmethod
    def _lift(o):
        return o if isinstance(o, Dual2) else Dual2(o)

    def __add__(self, o):
        o = self._lift(o)
        return Dual2(self.v + o.v, self.d0 + o.d0, self.d1 + o.d1)

    __radd__ = __add__

    def __neg__(self):
        return Dual2(-self.v, -self.d0, -self.d1)

    def __sub__(self, o):
        return self + (-self._lift(o))

    def __rsub__(self, o):
        return self._lift(o) - self

    def __mul__(self, o):
        o = self._lift(o)
        return Dual2(self.v * o.v, self.d0 * o.v + self.v * o.d0, self.d1 * o.v + self.v * o.d1)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = self._lift(o)
        inv = 1 / o.v
        q = self.v * inv
        return Dual2(q, (self.d0 - q * o.d0) * inv, (self.d1 - q * o.d1) * inv)

    def __rtruediv__(self, o):
        return self._lift(o) / self
