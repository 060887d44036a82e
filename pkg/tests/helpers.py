"""Shared samplers and brute-force oracles for the test-suite."""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from dbx.classify import in_B_prime
from dbx.seqcore import EpSeq


def random_word(rng, lo: int, hi: int) -> str:
    n = int(rng.integers(lo, hi + 1))
    return "".join(rng.choice(["0", "1"], size=n)) if n else ""


def random_epseq(rng, max_pre: int = 4, max_per: int = 8, first: str | None = None) -> EpSeq:
    while True:
        a = EpSeq(random_word(rng, 0, max_pre), random_word(rng, 1, max_per))
        if first is None or str(a.digit(1)) == first:
            return a


def random_bprime_pairs(count: int, seed: int = 0, max_pre: int = 4, max_per: int = 8):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        mu = random_epseq(rng, max_pre, max_per, "0")
        alpha = random_epseq(rng, max_pre, max_per, "1")
        if in_B_prime(mu, alpha).is_yes and (mu, alpha) not in out:
            out.append((mu, alpha))
    return out


def random_b_region_rationals(count: int, seed: int = 0, denom: int = 1000):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        a, b = (Fraction(int(v), denom) for v in rng.integers(denom + 1, 3 * denom, size=2))
        if a + b > a * b:
            out.append((a, b))
    return out


def count_expansions(q0: Fraction, q1: Fraction, x: Fraction, depth: int, cap: int = 2) -> int:
    """Number of digit strings of length ``depth`` that stay feasible for x.

    Exact branch-and-bound: after each digit the rescaled remainder must lie
    in [0, 1/(q1-1)].  Stops counting at ``cap``.
    """
    top = 1 / (q1 - 1)
    found = 0
    stack = [(x, 0)]
    while stack:
        y, n = stack.pop()
        if n == depth:
            found += 1
            if found >= cap:
                return found
            continue
        for d in (0, 1):
            z = q0 * y if d == 0 else q1 * y - 1
            if 0 <= z <= top:
                stack.append((z, n + 1))
    return found


def truncated_value(q0, q1, digits: str, tilde: bool = False):
    """Plain left-to-right partial sum, independent of the closed forms."""
    total, disc = 0, 1
    for c in digits:
        disc = disc / (q1 if c == "1" else q0)
        total += disc * ((c == "0") if tilde else (c == "1"))
    return total
