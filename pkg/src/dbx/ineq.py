"""Certified enclosures of the double series

    S = sum_{k,l >= 1} (z - k l) / (x^(n_k + l) * y^(k + n~_l)),   z = xy / ((x-1)(y-1)),

for non-decreasing sequences (n_k), (n~_l).  S vanishes when both sequences
are constant and is strictly positive otherwise; positivity at a solved base
pair (x, y) = (q0, q1) certifies that the two root curves cross transversally.

The summand splits as z a_k b_l - (k a_k)(l b_l) with a_k = x^-n_k y^-k and
b_l = x^-l y^-n~_l, so the truncated sum costs O(K).  Beyond index K a
non-decreasing sequence stays >= its K-th value, which bounds the tail by
geometric series in closed form.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import PreconditionError
from .numeric import ivctx
from .seqcore import EpSeq

__all__ = [
    "SeriesInput",
    "SeriesValue",
    "eval_S",
    "eval_S_auto",
    "flatten_step",
    "run_lengths",
    "verify_positivity_sweep",
    "root_positivity",
]

PREC = 256


@dataclass(frozen=True)
class SeriesInput:
    x: float
    y: float
    n_seq: tuple
    ntilde_seq: tuple

    def __post_init__(self):
        object.__setattr__(self, "n_seq", tuple(self.n_seq))
        object.__setattr__(self, "ntilde_seq", tuple(self.ntilde_seq))
        if not (self.x > 1 and self.y > 1):
            raise PreconditionError("x and y must exceed 1")
        for name, s in (("n", self.n_seq), ("ntilde", self.ntilde_seq)):
            if not s:
                raise PreconditionError(f"{name} sequence is empty")
            if any(b < a for a, b in zip(s, s[1:])):
                raise PreconditionError(f"{name} sequence is not non-decreasing")

    @property
    def constant(self) -> bool:
        return len(set(self.n_seq)) == 1 and len(set(self.ntilde_seq)) == 1

    def swapped(self) -> "SeriesInput":
        return SeriesInput(self.y, self.x, self.ntilde_seq, self.n_seq)


@dataclass(frozen=True)
class SeriesValue:
    lower: object
    upper: object
    K: int
    tail: object

    @property
    def width(self):
        """Upper bound on upper - lower."""
        return (self.upper - self.lower).b

    def contains(self, v) -> bool:
        return self.lower <= v <= self.upper


def _at(seq, k):
    return seq[k - 1] if k <= len(seq) else seq[-1]


def _weighted_tail(iv, r, K):
    """(sum_{k>K} r^k, sum_{k>K} k r^k) for 0 < r < 1."""
    rk = r ** (K + 1)
    one = iv.mpf(1)
    return rk / (one - r), rk * ((K + 1) - K * r) / (one - r) ** 2


def eval_S(inp: SeriesInput, K: int, prec: int = PREC) -> SeriesValue:
    if K < max(len(inp.n_seq), len(inp.ntilde_seq)):
        raise PreconditionError("K must cover both given sequences")
    iv = ivctx(prec)
    x, y = iv.mpf(inp.x), iv.mpf(inp.y)
    z = x * y / ((x - 1) * (y - 1))
    ix, iy = 1 / x, 1 / y
    cache: dict = {}

    def pw(base, e):
        key = (base is x, e)
        if key not in cache:
            cache[key] = base ** (-int(e)) if float(e).is_integer() else base ** (-iv.mpf(e))
        return cache[key]

    P1 = P2 = Q1 = Q2 = iv.mpf(0)
    yk = xl = iv.mpf(1)
    for k in range(1, K + 1):
        yk, xl = yk * iy, xl * ix
        a = yk * pw(x, _at(inp.n_seq, k))
        b = xl * pw(y, _at(inp.ntilde_seq, k))
        P1, P2 = P1 + a, P2 + k * a
        Q1, Q2 = Q1 + b, Q2 + k * b
    S = z * P1 * Q1 - P2 * Q2
    # Tail: every term outside [1,K]^2 is bounded by (z + k l) a_k b_l with
    # a_k <= x^-n_K y^-k and b_l <= x^-l y^-n~_K once the index passes K.
    # These are the pieces of z/((x-1)(y-1)) + xy/((x-1)^2 (y-1)^2) that lie
    # outside the box, rescaled by the frozen exponents.
    ya, yb = _weighted_tail(iv, iy, K)
    xa, xb = _weighted_tail(iv, ix, K)
    fa, fb = pw(x, _at(inp.n_seq, K)), pw(y, _at(inp.ntilde_seq, K))
    A1, A2 = ya * fa, yb * fa
    B1, B2 = xa * fb, xb * fb
    T = z * (P1 * B1 + A1 * Q1 + A1 * B1) + (P2 * B2 + A2 * Q2 + A2 * B2)
    return SeriesValue((S - T).a, (S + T).b, K, T.b)


def eval_S_auto(inp: SeriesInput, tail_tol: float = 1e-10, want_positive: bool = False,
                K_max: int = 1 << 14, prec: int = PREC) -> SeriesValue:
    """eval_S with K grown until the tail bound is below ``tail_tol``.

    With ``want_positive`` K keeps growing (up to ``K_max``) until the lower
    end of the enclosure is positive.
    """
    K = max(len(inp.n_seq), len(inp.ntilde_seq), 16)
    while True:
        v = eval_S(inp, K, prec)
        done = v.tail < tail_tol and (not want_positive or v.lower > 0)
        if done or K >= K_max:
            return v
        K = min(2 * K, K_max)


def flatten_step(inp: SeriesInput, kprime: int) -> SeriesInput:
    """Lower every n_k with k > k' by the jump n_{k'+1} - n_{k'}."""
    n = list(inp.n_seq)
    if kprime < 1:
        raise PreconditionError("k' is a 1-based index")
    while len(n) < kprime + 1:
        n.append(n[-1])
    jump = n[kprime] - n[kprime - 1]
    if not jump > 0:
        raise PreconditionError(f"no strict increase at k'={kprime}")
    return replace(inp, n_seq=tuple(n[:kprime] + [v - jump for v in n[kprime:]]))


def run_lengths(a: EpSeq, marker: int, count: int) -> list[int]:
    """Cumulative counts of the non-marker digit between successive markers.

    With marker 1, ``10^{n1} 1 0^{n2-n1} 1 ...`` gives [n1, n2, ...]; with
    marker 0 the roles of the digits are exchanged.
    """
    if a.digit(1) != marker:
        raise PreconditionError(f"sequence must start with {marker}")
    if str(marker) not in a.per:
        raise PreconditionError("marker digit must recur")
    out, total, i = [], 0, 1
    while len(out) < count:
        i += 1
        if a.digit(i) == marker:
            out.append(total)
        else:
            total += 1
    return out


def root_positivity(mu: EpSeq, alpha: EpSeq, x, y, terms: int = 64, K_max: int = 1 << 12) -> SeriesValue:
    """S evaluated on the run-length data of (mu, alpha) at (x, y).

    Run lengths of an eventually periodic sequence keep growing, so the sum is
    always cut at exactly the number of extracted terms; the frozen-exponent
    tail bound then covers the true continuation.
    """
    n = terms
    while True:
        inp = SeriesInput(x, y, run_lengths(alpha, 1, n), run_lengths(mu, 0, n))
        v = eval_S(inp, n)
        if v.lower > 0 or n >= K_max:
            return v
        n = min(2 * n, K_max)


@dataclass(frozen=True)
class SweepReport:
    x: float
    y: float
    trials: int
    failures: list
    min_lower_nonconstant: float
    nonconstant: int = 0


def verify_positivity_sweep(x: float, y: float, trials: int = 500, seed: int = 0,
                            nonconstant_only: bool = False) -> SweepReport:
    """Random non-decreasing integer sequences (length <= 12, values <= 8)."""
    rng = np.random.default_rng(seed)
    failures = []
    min_lower = float("inf")
    nonconst = 0
    for _ in range(trials):
        while True:
            seqs = []
            for _side in range(2):
                L = int(rng.integers(1, 13))
                seqs.append(tuple(int(v) for v in np.sort(rng.integers(0, 9, size=L))))
            inp = SeriesInput(x, y, seqs[0], seqs[1])
            if not (nonconstant_only and inp.constant):
                break
        nonconst += not inp.constant
        v = eval_S_auto(inp, want_positive=not inp.constant)
        if v.lower < -1e-10 or (inp.constant and not v.contains(0)):
            failures.append((seqs[0], seqs[1], float(v.lower), float(v.upper)))
        elif not inp.constant:
            if not v.lower > 0:
                failures.append((seqs[0], seqs[1], float(v.lower), float(v.upper)))
            else:
                min_lower = min(min_lower, float(v.lower))
    return SweepReport(x, y, trials, failures, min_lower, nonconst)
