"""Membership tests for the symbolic sets B', C', U'_2, V'_2 and the closure of U'_2.

A pair (mu, alpha) has mu starting with 0 and alpha starting with 1.

* B': mu <= every tail of mu, every tail of alpha <= alpha, and not in C'.
* C': mu is 0^inf or ends in 1^inf, or alpha is 1^inf or ends in 0^inf.
* U'_2: mu < sigma^m(mu) < alpha and mu < sigma^n(alpha) < alpha for m, n >= 1.
* V'_2: the same with <= and m, n >= 0.
* closure of U'_2: V'_2 minus the pairs with sigma^m(mu) = alpha and
  sigma^n(alpha) = mu for some m, n >= 1; those pairs are isolated points of
  V'_2 of the form ((uv)^inf, (vu)^inf).

Every "for all shifts" condition reduces to the finitely many distinct tails
of an eventually periodic sequence, so all of these are exact.  Base pairs are
classified through their image (mu, alpha) under the forward map.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericError, PreconditionError
from .expand import BasePair, Mode, Region, run_algorithm
from .numeric import to_mpf
from .seqcore import (EpSeq, SeqKind, classify_seq, compare_lex, compare_prefix,
                      shift, tails_from, word_minus, word_plus)
from .verdict import Tri, Verdict

__all__ = [
    "PairClass",
    "BaseClass",
    "in_C_prime",
    "in_B_prime",
    "in_U2_prime",
    "in_V2_prime",
    "in_closure_U2_prime",
    "classify_pair",
    "prefix_verdicts",
    "detect_period",
    "classify_base_pair",
    "perturbation_stability_probe",
    "cut_indices",
    "build_approximant_U2prime",
    "build_VminusClosure_witness",
    "nearby_B_prime_pairs",
]


def _check_sides(mu: EpSeq, alpha: EpSeq) -> str | None:
    if mu.digit(1) != 0:
        return "mu must start with 0"
    if alpha.digit(1) != 1:
        return "alpha must start with 1"
    return None


def in_C_prime(mu: EpSeq, alpha: EpSeq) -> bool:
    return (mu == EpSeq("", "0") or classify_seq(mu) is SeqKind.COFINITE
            or alpha == EpSeq("", "1") or classify_seq(alpha) is SeqKind.FINITE)


def _shift_index(a: EpSeq, t: EpSeq, start: int = 1) -> int:
    for n in range(start, start + len(a.pre) + len(a.per)):
        if shift(a, n) == t:
            return n
    raise AssertionError("tail not found")  # pragma: no cover


def in_B_prime(mu: EpSeq, alpha: EpSeq) -> Verdict:
    bad = _check_sides(mu, alpha)
    if bad:
        return Verdict.no(bad)
    for t in tails_from(mu, 1):
        if compare_lex(t, mu) < 0:
            return Verdict.no(f"sigma^{_shift_index(mu, t)}(mu) = {t} < mu")
    for t in tails_from(alpha, 1):
        if compare_lex(t, alpha) > 0:
            return Verdict.no(f"sigma^{_shift_index(alpha, t)}(alpha) = {t} > alpha")
    if in_C_prime(mu, alpha):
        return Verdict.no("pair lies in C'")
    return Verdict.yes()


def _tail_checks(mu: EpSeq, alpha: EpSeq, strict: bool) -> Verdict:
    bad = _check_sides(mu, alpha)
    if bad:
        return Verdict.no(bad)
    start = 1 if strict else 0

    def fails(c: int) -> bool:
        return c >= 0 if strict else c > 0

    rel = "<" if strict else "<="
    for t in tails_from(mu, start):
        m = _shift_index(mu, t, start)
        if fails(compare_lex(mu, t)):
            return Verdict.no(f"mu {rel} sigma^{m}(mu) fails: sigma^{m}(mu) = {t}")
        if fails(compare_lex(t, alpha)):
            return Verdict.no(f"sigma^{m}(mu) {rel} alpha fails: sigma^{m}(mu) = {t}")
    for t in tails_from(alpha, start):
        n = _shift_index(alpha, t, start)
        if fails(compare_lex(mu, t)):
            return Verdict.no(f"mu {rel} sigma^{n}(alpha) fails: sigma^{n}(alpha) = {t}")
        if fails(compare_lex(t, alpha)):
            return Verdict.no(f"sigma^{n}(alpha) {rel} alpha fails: sigma^{n}(alpha) = {t}")
    return Verdict.yes()


def in_U2_prime(mu: EpSeq, alpha: EpSeq) -> Verdict:
    return _tail_checks(mu, alpha, strict=True)


def in_V2_prime(mu: EpSeq, alpha: EpSeq) -> Verdict:
    return _tail_checks(mu, alpha, strict=False)


@dataclass(frozen=True)
class ClosureVerdict:
    verdict: Verdict
    isolated: bool
    u: str | None = None
    v: str | None = None


def _first_shift_to(a: EpSeq, target: EpSeq) -> int | None:
    for n in range(1, len(a.pre) + len(a.per) + 1):
        if shift(a, n) == target:
            return n
    return None


def in_closure_U2_prime(mu: EpSeq, alpha: EpSeq) -> ClosureVerdict:
    v2 = in_V2_prime(mu, alpha)
    if v2.is_no:
        return ClosureVerdict(v2, False)
    m = _first_shift_to(mu, alpha)
    n = _first_shift_to(alpha, mu)
    if m is None or n is None:
        return ClosureVerdict(Verdict.yes(), False)
    u, v = mu.prefix(m), alpha.prefix(n)
    if EpSeq("", u + v) != mu or EpSeq("", v + u) != alpha:  # pragma: no cover
        raise AssertionError("isolated pair lacks the ((uv)^inf, (vu)^inf) form")
    return ClosureVerdict(Verdict.no(f"sigma^{m}(mu) = alpha and sigma^{n}(alpha) = mu; u={u}, v={v}"),
                          True, u, v)


@dataclass(frozen=True)
class PairClass:
    in_Bprime: Verdict
    in_Cprime: Verdict
    in_U2prime: Verdict
    in_V2prime: Verdict
    in_closureU2prime: Verdict
    isolated: bool = False
    u: str | None = None
    v: str | None = None

    def to_json(self) -> dict:
        out = {k: getattr(self, k).to_json() for k in
               ("in_Bprime", "in_Cprime", "in_U2prime", "in_V2prime", "in_closureU2prime")}
        out["isolated"] = self.isolated
        if self.isolated:
            out["u"], out["v"] = self.u, self.v
        return out


def classify_pair(mu: EpSeq, alpha: EpSeq) -> PairClass:
    cl = in_closure_U2_prime(mu, alpha)
    return PairClass(
        in_Bprime=in_B_prime(mu, alpha),
        in_Cprime=Verdict.of(in_C_prime(mu, alpha)),
        in_U2prime=in_U2_prime(mu, alpha),
        in_V2prime=in_V2_prime(mu, alpha),
        in_closureU2prime=cl.verdict,
        isolated=cl.isolated,
        u=cl.u,
        v=cl.v,
    )


# ----------------------------------------------------------- prefix mode

def prefix_verdicts(mu: str, alpha: str) -> dict[str, Verdict]:
    """Three-valued U'_2 / V'_2 / closure verdicts from finite prefixes.

    Only a strict reversal seen inside the prefixes is conclusive.
    """
    L = min(len(mu), len(alpha))
    mu, alpha = mu[:L], alpha[:L]
    witness = None
    for m in range(1, L):
        tm, ta = mu[m:], alpha[m:]
        if compare_prefix(tm, mu) < 0:
            witness = f"sigma^{m}(mu) < mu within {L} digits"
        elif compare_prefix(tm, alpha) > 0:
            witness = f"sigma^{m}(mu) > alpha within {L} digits"
        elif compare_prefix(ta, alpha) > 0:
            witness = f"sigma^{m}(alpha) > alpha within {L} digits"
        elif compare_prefix(ta, mu) < 0:
            witness = f"sigma^{m}(alpha) < mu within {L} digits"
        if witness:
            break
    v = Verdict.no(witness) if witness else Verdict.unknown(L)
    return {"U2": v, "V2": v, "closure": v}


def detect_period(digits: str, max_period: int | None = None) -> EpSeq | None:
    """Smallest period repeating through the second half of ``digits``."""
    L = len(digits)
    half = L // 2
    max_period = max_period or L // 4
    for p in range(1, max_period + 1):
        if all(digits[i] == digits[i + p] for i in range(half, L - p)):
            s = half
            while s > 0 and digits[s - 1] == digits[s - 1 + p]:
                s -= 1
            return EpSeq(digits[:s], digits[s:s + p])
    return None


@dataclass(frozen=True)
class BaseClass:
    region: Region
    in_U2: Verdict
    in_V2: Verdict
    in_closureU2: Verdict
    certification_depth: int
    mu: object = None
    alpha: object = None
    isolated: bool = False

    def to_json(self) -> dict:
        return {
            "region": self.region.value,
            "in_U2": self.in_U2.to_json(),
            "in_V2": self.in_V2.to_json(),
            "in_closureU2": self.in_closureU2.to_json(),
            "certification_depth": self.certification_depth,
            "mu": None if self.mu is None else str(self.mu),
            "alpha": None if self.alpha is None else str(self.alpha),
            "isolated": self.isolated,
        }


def _confirm(q: BasePair, mu: EpSeq, alpha: EpSeq) -> bool:
    from .phimap import phi_inverse

    if not in_B_prime(mu, alpha).is_yes:
        return False
    try:
        r = phi_inverse(mu, alpha, prec=q.prec)
    except (PreconditionError, NumericError):
        return False
    q0, q1 = q.values()
    tol = max(8 * q.radius, 2.0 ** (-(q.prec // 2)))
    return max(abs(to_mpf(q0, q.prec) - r.q0), abs(to_mpf(q1, q.prec) - r.q1)) <= tol


def classify_base_pair(q: BasePair, depth: int = 64) -> BaseClass:
    from .phimap import phi_forward

    region = q.region
    if region is Region.C:
        y = Verdict.yes("region C")
        return BaseClass(region, y, y, y, depth, EpSeq("", "0"), EpSeq("", "1"))
    if region is Region.OUTSIDE:
        n = Verdict.no("outside B and C")
        return BaseClass(region, n, n, n, 0)
    fw = phi_forward(q, depth)
    mu, alpha = fw.mu, fw.alpha
    if mu is None or alpha is None:
        cand_mu = mu or detect_period(fw.mu_prefix)
        cand_al = alpha or detect_period(fw.alpha_prefix)
        if cand_mu is not None and cand_al is not None and _confirm(q, cand_mu, cand_al):
            mu, alpha = cand_mu, cand_al
    if mu is not None and alpha is not None:
        pc = classify_pair(mu, alpha)
        return BaseClass(region, pc.in_U2prime, pc.in_V2prime, pc.in_closureU2prime,
                         depth, mu, alpha, pc.isolated)
    cert = fw.certified
    pv = prefix_verdicts(fw.mu_prefix[:cert], fw.alpha_prefix[:cert])
    return BaseClass(region, pv["U2"], pv["V2"], pv["closure"], cert,
                     fw.mu_prefix, fw.alpha_prefix)


# ------------------------------------------------------ perturbation probe

def _common(a: str, b: str) -> int:
    n = 0
    for x, y in zip(a, b):
        if x != y:
            break
        n += 1
    return n


@dataclass(frozen=True)
class StabilityReport:
    eps: float
    depth: int
    r_agreement: int
    ell_agreement: int
    samples: list


def perturbation_stability_probe(q: BasePair, eps: float, depth: int = 32,
                                 samples: int = 16, seed: int = 0) -> StabilityReport:
    """Agreement of expansions of r and ell between q and random q' within ``eps``.

    If alpha(q') >= alpha(q) the greedy expansions are compared, otherwise the
    quasi-greedy ones; likewise lazy vs quasi-lazy on ell according to whether
    mu(q') <= mu(q).
    """
    q.require(Region.B, Region.C)
    base = {m: {x: run_algorithm(q, x, m, depth).digits for x in ("r", "ell")} for m in Mode}
    rng = np.random.default_rng(seed)
    q0, q1 = q.values()
    rows = []
    r_min = ell_min = depth
    tries = 0
    while len(rows) < samples and tries < 50 * samples:
        tries += 1
        d0, d1 = rng.uniform(-1.0, 1.0, size=2) * eps
        try:
            qq = BasePair(to_mpf(q0, q.prec) + d0, to_mpf(q1, q.prec) + d1, prec=q.prec)
        except ValueError:
            continue
        if qq.region is Region.OUTSIDE:
            continue
        al = run_algorithm(qq, "r", Mode.QUASI_GREEDY, depth).digits
        mu = run_algorithm(qq, "ell", Mode.QUASI_LAZY, depth).digits
        # an undecided prefix tie already means full agreement of the quasi
        # expansions, so only a strict prefix difference selects the other branch
        if al > base[Mode.QUASI_GREEDY]["r"]:
            other = run_algorithm(qq, "r", Mode.GREEDY, depth).digits
            ra = _common(other, base[Mode.GREEDY]["r"])
        else:
            ra = _common(al, base[Mode.QUASI_GREEDY]["r"])
        if mu < base[Mode.QUASI_LAZY]["ell"]:
            other = run_algorithm(qq, "ell", Mode.LAZY, depth).digits
            la = _common(other, base[Mode.LAZY]["ell"])
        else:
            la = _common(mu, base[Mode.QUASI_LAZY]["ell"])
        rows.append((float(d0), float(d1), ra, la))
        r_min, ell_min = min(r_min, ra), min(ell_min, la)
    return StabilityReport(eps, depth, r_min, ell_min, rows)


# --------------------------------------------------- witness constructions

def cut_indices(x: EpSeq, ref: EpSeq, kind: str, count: int) -> list[int]:
    """The first ``count`` cut indices n > 1 for ``x`` against ``ref``.

    kind="lower": x_n = 1 and x_{k+1..n} > ref_{1..n-k} for 1 <= k < n.
    kind="upper": x_n = 0 and x_{k+1..n} < ref_{1..n-k} for 1 <= k < n.
    Gives up after 4 periods beyond the preperiod without a new index.
    """
    want = 1 if kind == "lower" else 0
    sign = 1 if kind == "lower" else -1
    out: list[int] = []
    last = len(x.pre)
    n = 1
    window = len(x.pre) + 4 * len(x.per)
    while len(out) < count:
        n += 1
        if n > max(window, last + 4 * len(x.per)):
            break
        w = x.prefix(n)
        if int(w[-1]) != want:
            continue
        r = ref.prefix(n)
        if all(compare_prefix(w[k:], r[: n - k]) == sign for k in range(1, n)):
            out.append(n)
            last = n
    return out


def build_approximant_U2prime(mu: EpSeq, alpha: EpSeq, k: int) -> tuple[EpSeq, EpSeq]:
    """Periodic approximants mu^k increasing to mu with (mu^k, alpha) in U'_2."""
    if k < 1:
        raise PreconditionError("k must be at least 1")
    v2 = in_V2_prime(mu, alpha)
    if not v2.is_yes:
        raise PreconditionError(f"not in V'_2: {v2.witness}")
    for t in tails_from(mu, 1):
        if not compare_lex(mu, t) < 0 or not compare_lex(t, alpha) < 0:
            raise PreconditionError("case (ii) needs mu < sigma^i(mu) < alpha for all i >= 1")
    for t in tails_from(alpha, 1):
        if not compare_lex(t, alpha) < 0:
            raise PreconditionError("case (ii) needs sigma^j(alpha) < alpha for all j >= 1")
    cuts = cut_indices(mu, mu, "lower", k + 1)
    if len(cuts) < k + 1:
        raise PreconditionError("not applicable: too few cut indices within the search bound")
    nk, nk1 = cuts[k - 1], cuts[k]
    return EpSeq(mu.prefix(nk), mu.prefix(nk1)), alpha


def build_VminusClosure_witness(mu: EpSeq, alpha: EpSeq, n: int, m: int) -> tuple[EpSeq, EpSeq]:
    """Interleave prefixes of mu and alpha into an isolated point of V'_2."""
    if mu.digit(n) != 1 or alpha.digit(m) != 0:
        raise PreconditionError("need mu_n = 1 and alpha_m = 0")
    a = word_minus(mu.prefix(n))
    b = word_plus(alpha.prefix(m))
    return EpSeq("", a + b), EpSeq("", b + a)


def nearby_B_prime_pairs(mu: EpSeq, alpha: EpSeq, depth: int, limit: int = 3) -> list[tuple[EpSeq, EpSeq]]:
    """Pairs in B' agreeing with (mu, alpha) on the first ``depth`` digits but not equal to it."""
    def variants(x: EpSeq, ok) -> list[EpSeq]:
        head = x.prefix(depth)
        cands = [EpSeq("", x.prefix(j)) for j in range(depth + 1, depth + len(x.pre) + 2 * len(x.per) + 2)]
        for tail in ("1", "0", "01", "10", "001", "110", "0001", "1110"):
            cands.append(EpSeq("", head + tail))
            cands.append(EpSeq(head, tail + ("1" if tail[-1] == "0" else "0")))
        out = []
        for c in cands:
            if c != x and c.prefix(depth) == head and ok(c) and c not in out:
                out.append(c)
            if len(out) >= limit:
                break
        return out

    mus = variants(mu, lambda c: all(compare_lex(c, t) <= 0 for t in tails_from(c, 1)))
    als = variants(alpha, lambda c: all(compare_lex(t, c) <= 0 for t in tails_from(c, 1)))
    pairs = [(m2, alpha) for m2 in mus] + [(mu, a2) for a2 in als]
    pairs += [(m2, a2) for m2 in mus[:1] for a2 in als[:1]]
    return [p for p in pairs if in_B_prime(*p).is_yes]
