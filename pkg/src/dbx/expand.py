"""Double-base expansions with digit weights q0 (digit 0) and q1 (digit 1).

A digit string i_1 i_2 ... represents ``sum_k i_k / (q_{i_1} ... q_{i_k})``.
Rational bases are handled in exact arithmetic; anything else goes through
mpmath interval arithmetic so every digit decision carries an error margin.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from .numeric import DEFAULT_PREC, is_exact, ivctx, mpctx, parse_real, to_interval, to_mpf
from .seqcore import EpSeq, SeqKind, classify_seq, compare_lex, compare_prefix, shift, tails_from
from .verdict import Verdict

__all__ = [
    "Region",
    "Mode",
    "BasePair",
    "CriticalPoints",
    "ExpansionRun",
    "series_value",
    "pi_eval",
    "pi_tilde_eval",
    "critical_points",
    "run_algorithm",
    "exact_expansion",
    "critical_expansions",
    "quasi_from_greedy",
    "quasi_from_lazy",
    "is_unique_expansion",
    "orbit_uniqueness_check",
]

C_TOLERANCE = Fraction(1, 2**64)


class Region(enum.Enum):
    B = "B"
    C = "C"
    OUTSIDE = "Outside"


class Mode(enum.Enum):
    GREEDY = "greedy"
    QUASI_GREEDY = "quasi-greedy"
    LAZY = "lazy"
    QUASI_LAZY = "quasi-lazy"


def _coerce(v, prec):
    if isinstance(v, (int, Fraction)):
        return Fraction(v)
    if isinstance(v, str):
        return parse_real(v)
    return to_mpf(v, prec)


@dataclass(frozen=True)
class BasePair:
    """A base pair; ``radius`` bounds how far the true values may lie from q0, q1."""

    q0: object
    q1: object
    radius: float = 0.0
    prec: int = DEFAULT_PREC

    def __post_init__(self):
        if self.prec < 53:
            raise ValueError("precision must be at least 53 bits")
        q0, q1 = _coerce(self.q0, self.prec), _coerce(self.q1, self.prec)
        if not (q0 > 1 and q1 > 1):
            raise ValueError("both bases must exceed 1")
        object.__setattr__(self, "q0", q0)
        object.__setattr__(self, "q1", q1)

    @property
    def exact(self) -> bool:
        return is_exact(self.q0) and is_exact(self.q1) and not self.radius

    @property
    def region(self) -> Region:
        q0, q1 = self.q0, self.q1
        gap = q0 + q1 - q0 * q1
        if self.exact:
            return Region.C if gap == 0 else (Region.B if gap > 0 else Region.OUTSIDE)
        q0, q1 = to_mpf(q0, self.prec), to_mpf(q1, self.prec)
        gap = q0 + q1 - q0 * q1
        tol = to_mpf(C_TOLERANCE, self.prec) * max(1, q0 * q1)
        if abs(gap) <= tol:
            return Region.C
        return Region.B if gap > 0 else Region.OUTSIDE

    def values(self):
        """(q0, q1) as exact rationals or as mpf at this pair's precision."""
        if self.exact:
            return self.q0, self.q1
        return to_mpf(self.q0, self.prec), to_mpf(self.q1, self.prec)

    def intervals(self):
        return (to_interval(self.q0, self.prec, self.radius),
                to_interval(self.q1, self.prec, self.radius))

    def floats(self) -> tuple[float, float]:
        return float(self.q0), float(self.q1)

    def require(self, *allowed: Region) -> None:
        if self.region not in allowed:
            names = "/".join(r.value for r in allowed)
            raise ValueError(f"base pair ({self.q0}, {self.q1}) is in region {self.region.value}, need {names}")


@dataclass(frozen=True)
class CriticalPoints:
    ell: object
    r: object


@dataclass(frozen=True)
class ExpansionRun:
    digits: str
    mode: Mode
    residual_lo: object
    residual_hi: object
    certified_depth: int


def _word_sums(q0, q1, w: str, tilde: bool):
    disc, val = 1, 0
    for c in w:
        if c == "0":
            disc = disc / q0
            if tilde:
                val = val + disc
        else:
            disc = disc / q1
            if not tilde:
                val = val + disc
    return val, disc


def series_value(q0, q1, pre: str, per: str, tilde: bool = False):
    """Closed-form value of ``pre + per^inf`` for any arithmetic type.

    With ``tilde`` the numerators are ``1 - digit`` instead of ``digit``.
    """
    vp, dp = _word_sums(q0, q1, pre, tilde)
    vq, dq = _word_sums(q0, q1, per, tilde)
    return vp + dp * vq / (1 - dq)


def pi_eval(q: BasePair, a: EpSeq):
    q.require(Region.B, Region.C)
    q0, q1 = q.values()
    return series_value(q0, q1, a.pre, a.per)


def pi_tilde_eval(q: BasePair, a: EpSeq):
    q.require(Region.B, Region.C)
    q0, q1 = q.values()
    return series_value(q0, q1, a.pre, a.per, tilde=True)


def critical_points(q: BasePair) -> CriticalPoints:
    q.require(Region.B, Region.C)
    q0, q1 = q.values()
    return CriticalPoints(q1 / (q0 * (q1 - 1)) - 1, q0 / q1)


# Digit decisions work on the rescaled remainder y = (x - partial) / discount.
# The digit-1 test for the greedy family is y >= 1/q1 (strict for quasi); the
# digit-0 test for the lazy family is y <= 1/(q0 (q1 - 1)) (strict for quasi).
# A comparison that is an exact tie takes the branch of the literal inequality.

def _decide(mode: Mode, cmp: int) -> int:
    """Digit chosen given sign of (y - threshold); 0 means an exact tie."""
    if mode is Mode.GREEDY:
        return 1 if cmp >= 0 else 0
    if mode is Mode.QUASI_GREEDY:
        return 1 if cmp > 0 else 0
    if mode is Mode.LAZY:
        return 0 if cmp <= 0 else 1
    return 0 if cmp < 0 else 1


def _threshold(mode: Mode, q0, q1):
    if mode in (Mode.GREEDY, Mode.QUASI_GREEDY):
        return 1 / q1
    return 1 / (q0 * (q1 - 1))


def _resolve_x(q: BasePair, x, exact: bool):
    if isinstance(x, str) and x in ("ell", "r"):
        q0, q1 = (q.q0, q.q1) if exact else q.intervals()
        return q1 / (q0 * (q1 - 1)) - 1 if x == "ell" else q0 / q1
    if exact:
        return _coerce(x, q.prec)
    if isinstance(x, str):
        x = parse_real(x)
    return to_interval(x, q.prec)


def _x_is_exact(x) -> bool:
    if isinstance(x, str):
        if x in ("ell", "r"):
            return True
        try:
            parse_real(x)
            return True
        except ValueError:
            return False
    return is_exact(x)


def run_algorithm(q: BasePair, x, mode: Mode | str, depth: int) -> ExpansionRun:
    """First ``depth`` digits of the chosen expansion of ``x``.

    ``x`` may be a number, a literal, or the keyword ``"ell"`` / ``"r"``.
    """
    mode = Mode(mode)
    q.require(Region.B, Region.C)
    if depth < 1:
        raise ValueError("depth must be at least 1")
    exact = q.exact and _x_is_exact(x)
    if exact:
        return _run_exact(q, _resolve_x(q, x, True), mode, depth)
    return _run_interval(q, _resolve_x(q, x, False), mode, depth)


def _run_exact(q: BasePair, x: Fraction, mode: Mode, depth: int) -> ExpansionRun:
    q0, q1 = q.q0, q.q1
    if not 0 <= x <= 1 / (q1 - 1):
        raise ValueError(f"x={x} outside [0, 1/(q1-1)]")
    thr = _threshold(mode, q0, q1)
    y, disc, digits = x, Fraction(1), []
    for _ in range(depth):
        d = _decide(mode, (y > thr) - (y < thr))
        digits.append(str(d))
        if d:
            y, disc = q1 * y - 1, disc / q1
        else:
            y, disc = q0 * y, disc / q0
    res = disc * y
    return ExpansionRun("".join(digits), mode, res, res, depth)


def _run_interval(q: BasePair, x, mode: Mode, depth: int) -> ExpansionRun:
    q0, q1 = q.intervals()
    top = 1 / (q1 - 1)
    if x.b < 0 or x.a > top.b:
        raise ValueError(f"x={x} outside [0, 1/(q1-1)]")
    thr = _threshold(mode, q0, q1)
    y, disc, digits = x, to_interval(1, q.prec), []
    certified = None
    for n in range(depth):
        if y.b < thr.a:
            cmp = -1
        elif y.a > thr.b:
            cmp = 1
        else:
            cmp = 0
            if certified is None and not (y.a == y.b == thr.a == thr.b):
                certified = n
        d = _decide(mode, cmp)
        digits.append(str(d))
        if d:
            y, disc = q1 * y - 1, disc / q1
        else:
            y, disc = q0 * y, disc / q0
    res = disc * y
    return ExpansionRun("".join(digits), mode, res.a, res.b,
                        depth if certified is None else certified)


def exact_expansion(q: BasePair, x, mode: Mode | str, max_steps: int = 4096) -> EpSeq | None:
    """The full expansion as an EpSeq when the exact orbit cycles within ``max_steps``."""
    mode = Mode(mode)
    q.require(Region.B, Region.C)
    if not (q.exact and _x_is_exact(x)):
        return None
    x = _resolve_x(q, x, True)
    q0, q1 = q.q0, q.q1
    if not 0 <= x <= 1 / (q1 - 1):
        raise ValueError(f"x={x} outside [0, 1/(q1-1)]")
    thr = _threshold(mode, q0, q1)
    seen: dict[Fraction, int] = {}
    y, digits = x, []
    for n in range(max_steps):
        if y in seen:
            i = seen[y]
            return EpSeq("".join(digits[:i]), "".join(digits[i:]))
        seen[y] = n
        d = _decide(mode, (y > thr) - (y < thr))
        digits.append(str(d))
        y = q1 * y - 1 if d else q0 * y
    return None


def critical_expansions(q: BasePair, depth: int):
    """(mu, alpha, certified): quasi-lazy digits of ell and quasi-greedy digits of r.

    Exact cycles are returned as EpSeq; otherwise prefixes of length ``depth``.
    """
    q.require(Region.B)
    mu = exact_expansion(q, "ell", Mode.QUASI_LAZY)
    alpha = exact_expansion(q, "r", Mode.QUASI_GREEDY)
    cert = depth
    if mu is None:
        run = run_algorithm(q, "ell", Mode.QUASI_LAZY, depth)
        mu, cert = run.digits, min(cert, run.certified_depth)
    if alpha is None:
        run = run_algorithm(q, "r", Mode.QUASI_GREEDY, depth)
        alpha, cert = run.digits, min(cert, run.certified_depth)
    return mu, alpha, cert


def quasi_from_greedy(beta: EpSeq) -> EpSeq:
    """Quasi-greedy expansion of r from its greedy expansion.

    A finite ``beta`` becomes (beta_1 ... beta_n^-)^inf with n its last 1.
    The rule is specific to the critical point r; other points need not obey it.
    """
    if classify_seq(beta) is not SeqKind.FINITE:
        return beta
    return EpSeq("", beta.pre[:-1] + "0")


def quasi_from_lazy(lam: EpSeq) -> EpSeq:
    """Quasi-lazy expansion of ell from its lazy expansion (mirror of quasi_from_greedy)."""
    if classify_seq(lam) is not SeqKind.COFINITE:
        return lam
    return EpSeq("", lam.pre[:-1] + "1")


def _below(lo, t: EpSeq):
    """Is ``lo`` strictly below ``t``?  ``lo`` may be an EpSeq or a finite prefix."""
    if isinstance(lo, EpSeq):
        return compare_lex(lo, t) < 0
    c = compare_prefix(lo, t.prefix(len(lo)))
    return None if c == 0 else c < 0


def _above(hi, t: EpSeq):
    if isinstance(hi, EpSeq):
        return compare_lex(t, hi) < 0
    c = compare_prefix(t.prefix(len(hi)), hi)
    return None if c == 0 else c < 0


def is_unique_expansion(q: BasePair, x: EpSeq, mu=None, alpha=None, depth: int = 64) -> Verdict:
    """Lexicographic uniqueness test for the expansion ``x``.

    ``mu`` and ``alpha`` default to the quasi-lazy / quasi-greedy expansions of
    the critical points of ``q``; either may be an EpSeq or a digit prefix.
    A comparison that runs off the end of a prefix is left undecided.
    """
    if mu is None or alpha is None:
        m_, a_, cert = critical_expansions(q, depth)
        if isinstance(m_, str):
            m_ = m_[:cert]
        if isinstance(a_, str):
            a_ = a_[:cert]
        mu = m_ if mu is None else mu
        alpha = a_ if alpha is None else alpha
    undecided = []
    for m in range(1, len(x.pre) + len(x.per) + 1):
        t = shift(x, m)
        if x.digit(m) == 1:
            ok = _below(mu, t)
            if ok is False:
                return Verdict.no(f"x_{m}=1 but sigma^{m}(x)={t} is not above mu")
        else:
            ok = _above(alpha, t)
            if ok is False:
                return Verdict.no(f"x_{m}=0 but sigma^{m}(x)={t} is not below alpha")
        if ok is None:
            undecided.append(m)
    if undecided:
        lens = [len(s) for s in (mu, alpha) if isinstance(s, str)]
        return Verdict.unknown(min(lens), f"undecided at shifts {undecided}")
    return Verdict.yes()


def orbit_uniqueness_check(q: BasePair, x: EpSeq) -> Verdict:
    """Uniqueness via the orbit: no tail value may land in [1/q1, 1/(q0(q1-1))]."""
    q.require(Region.B)
    if q.exact:
        q0, q1 = q.q0, q.q1
    else:
        q0, q1 = q.intervals()
    lo, hi = 1 / q1, 1 / (q0 * (q1 - 1))
    undecided = False
    for n, t in enumerate(tails_from(x, 0)):
        v = series_value(q0, q1, t.pre, t.per)
        if q.exact:
            if lo <= v <= hi:
                return Verdict.no(f"tail {t} has value {v} in the switch interval")
            continue
        if v.b < lo.a or v.a > hi.b:
            continue
        if v.a > lo.b and v.b < hi.a:
            return Verdict.no(f"tail {t} lies in the switch interval")
        undecided = True
    if undecided:
        return Verdict.unknown(None, "a tail value touches the switch interval boundary")
    return Verdict.yes()
