"""Block-structured univoque families and box-counting estimates of their images.

For N >= 2 the family pairs (mu, alpha) are

    alpha = 1^(2N-1) 0  b_1 b_2 ... b_d  (c)^inf
    mu    = 0^(2N-1) 1  b'_1 ... b'_d    (c')^inf

where every block b, c is an N-digit word strictly between 0^N and 1^N.
Each pair lies in U'_2; mapping the pairs back to base pairs samples a planar
set whose box-counting slope should approach tau(N) log_{2+eps} 2, with
(2^N - 2)^2 = 2^(tau N).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError
from .expand import BasePair
from .phimap import OK, SolverConfig, _Seqs, phi_forward, solve_batch
from .seqcore import EpSeq

__all__ = [
    "FamilyParams",
    "DimEstimate",
    "SeparationReport",
    "admissible_blocks",
    "family_pair",
    "sample_family_pair",
    "sample_family_pairs",
    "block_count",
    "enumerate_block_count",
    "tau",
    "dimension_bound",
    "separation_constant",
    "separation_check",
    "family_points",
    "box_counts",
    "fit_slope",
    "estimate_dimension",
    "estimate_dimension_gap",
]


@dataclass(frozen=True)
class FamilyParams:
    N: int
    depth_blocks: int = 6
    seed: int = 0

    def __post_init__(self):
        if self.N < 2:
            raise PreconditionError("N must be at least 2")
        if self.depth_blocks < 0:
            raise PreconditionError("depth_blocks must be nonnegative")


def admissible_blocks(N: int) -> list[str]:
    return [format(i, f"0{N}b") for i in range(1, 2**N - 1)]


def _header(N: int, upper: bool) -> str:
    return "1" * (2 * N - 1) + "0" if upper else "0" * (2 * N - 1) + "1"


def family_pair(N: int, mu_blocks, alpha_blocks, mu_period: str, alpha_period: str) -> tuple[EpSeq, EpSeq]:
    ok = set(admissible_blocks(N))
    for b in [*mu_blocks, *alpha_blocks, mu_period, alpha_period]:
        if b not in ok:
            raise PreconditionError(f"block {b!r} is not strictly between 0^N and 1^N")
    mu = EpSeq(_header(N, False) + "".join(mu_blocks), mu_period)
    alpha = EpSeq(_header(N, True) + "".join(alpha_blocks), alpha_period)
    return mu, alpha


def _draw(rng: np.random.Generator, N: int, count: int, size: int) -> np.ndarray:
    return rng.integers(1, 2**N - 1, size=(count, size))


def sample_family_pair(p: FamilyParams) -> tuple[EpSeq, EpSeq]:
    return sample_family_pairs(p, 1)[0]


def sample_family_pairs(p: FamilyParams, count: int) -> list[tuple[EpSeq, EpSeq]]:
    rng = np.random.default_rng(p.seed)
    mu_idx = _draw(rng, p.N, count, p.depth_blocks + 1)
    al_idx = _draw(rng, p.N, count, p.depth_blocks + 1)
    fmt = lambda i: format(int(i), f"0{p.N}b")
    out = []
    for m, a in zip(mu_idx, al_idx):
        mb, ab = [fmt(i) for i in m], [fmt(i) for i in a]
        out.append(family_pair(p.N, mb[:-1], ab[:-1], mb[-1], ab[-1]))
    return out


def block_count(N: int, n: int, k: int = 2) -> tuple[int, int]:
    """Distinct admissible pair-words of length nN, and of positions kN+1..nN."""
    if N < 2 or not 2 <= k <= n:
        raise PreconditionError("need N >= 2 and 2 <= k <= n")
    b = 2**N - 2
    return (b ** (n - 2)) ** 2, (b ** (n - k)) ** 2


def enumerate_block_count(N: int, n: int, k: int = 2) -> tuple[int, int]:
    """Brute-force counterpart of block_count over all binary words of length nN."""
    L = n * N
    heads = {}
    for upper in (True, False):
        h = _header(N, upper)
        words = set()
        for bits in itertools.product("01", repeat=L):
            w = "".join(bits)
            if not w.startswith(h[:L]):
                continue
            blocks = [w[j:j + N] for j in range(2 * N, L, N)]
            if all(b.strip("0") and b.strip("1") for b in blocks):
                words.add(w)
        heads[upper] = words
    full = len(heads[True]) * len(heads[False])
    cut = lambda ws: {w[k * N:] for w in ws}
    part = len(cut(heads[True])) * len(cut(heads[False]))
    return full, part


def tau(N: int) -> float:
    return 2 * math.log2(2**N - 2) / N


def dimension_bound(N: int, eps: float) -> float:
    return tau(N) * math.log(2) / math.log(2 + eps)


def separation_constant(N: int, eps: float) -> float:
    return (2 + eps) ** (-2 * N + 3)


@dataclass(frozen=True)
class SeparationReport:
    passed: bool
    distance: float
    m: int
    checked: int
    mu_agree: int
    alpha_agree: int


def _agree(a: str, b: str) -> int:
    n = 0
    for x, y in zip(a, b):
        if x != y:
            break
        n += 1
    return n


def separation_check(q: BasePair, q2: BasePair, N: int, eps_N: float,
                     depth: int = 64, m_offset: int = 0) -> SeparationReport:
    """Close base pairs must share their first m digits of mu and alpha.

    m is the largest integer with distance <= C (2+eps)^-m, where
    C = (2+eps)^(3-2N).  ``m_offset`` inflates m (a negative control).
    """
    a0, a1 = q.values()
    b0, b1 = q2.values()
    d = float(max(abs(a0 - b0), abs(a1 - b1)))
    C = separation_constant(N, eps_N)
    if d == 0:
        m = depth
    else:
        m = max(0, math.floor(math.log(C / d) / math.log(2 + eps_N)))
    m = min(m + m_offset, depth)
    if m <= 0:
        return SeparationReport(True, d, m, 0, 0, 0)
    f1, f2 = phi_forward(q, m), phi_forward(q2, m)
    mu_ag = _agree(f1.mu_prefix, f2.mu_prefix)
    al_ag = _agree(f1.alpha_prefix, f2.alpha_prefix)
    return SeparationReport(mu_ag >= m and al_ag >= m, d, m, m, mu_ag, al_ag)


# ---------------------------------------------------------------- estimator

@dataclass(frozen=True)
class DimEstimate:
    scales: list
    counts: list
    slope: float
    fit_range: tuple[int, int]
    sample_count: int
    N: int
    eps_N: float
    bound: float
    failed_solves: int = 0
    points: np.ndarray = field(default=None, repr=False, compare=False)


def _bits(idx: np.ndarray, N: int) -> np.ndarray:
    shifts = np.arange(N - 1, -1, -1)
    return ((idx[..., None] >> shifts) & 1).astype(bool).reshape(idx.shape[0], -1)


def _family_arrays(rng, N: int, depth_blocks: int, count: int, upper: bool, frozen: bool = False) -> _Seqs:
    head = np.array([c == "1" for c in _header(N, upper)], dtype=bool)
    if frozen:
        pre = np.zeros((count, 0), dtype=bool)
        per = np.tile(head, (count, 1))
        return _Seqs(pre, per)
    idx = _draw(rng, N, count, depth_blocks + 1)
    body = _bits(idx, N)
    pre = np.hstack([np.tile(head, (count, 1)), body[:, : depth_blocks * N]])
    per = body[:, depth_blocks * N:]
    return _Seqs(pre, per)


def family_points(p: FamilyParams, samples: int, gap: bool = False, chunk: int = 2000,
                  cfg: SolverConfig = SolverConfig()) -> tuple[np.ndarray, int]:
    """Base pairs (q0, q1) of ``samples`` family members; returns (points, failures)."""
    rng = np.random.default_rng(p.seed)
    pts, failed = [], 0
    done = 0
    while done < samples:
        n = min(chunk, samples - done)
        al = _family_arrays(rng, p.N, p.depth_blocks, n, upper=True)
        mu = _family_arrays(rng, p.N, p.depth_blocks, n, upper=False, frozen=gap)
        q0, q1, _, _, _, status = solve_batch(mu, al, cfg)
        good = status == OK
        failed += int((~good).sum())
        pts.append(np.column_stack([q0[good], q1[good]]))
        done += n
    return np.vstack(pts), failed


def box_counts(points: np.ndarray, scales) -> list[int]:
    out = []
    for s in scales:
        boxes = np.floor(points / s).astype(np.int64)
        out.append(int(np.unique(boxes, axis=0).shape[0]))
    return out


def fit_slope(scales, counts, fit_range: tuple[int, int] | None = None) -> tuple[float, tuple[int, int]]:
    n = len(scales)
    if n < 2:
        raise PreconditionError("need at least two scales")
    if fit_range is None:
        k = n // 6
        fit_range = (k, n - k)
    i, j = fit_range
    xs = np.log(1.0 / np.asarray(scales[i:j], dtype=float))
    ys = np.log(np.asarray(counts[i:j], dtype=float))
    slope = float(np.polyfit(xs, ys, 1)[0])
    return slope, fit_range


def _check_scales(scales):
    scales = [float(s) for s in scales]
    if len(scales) < 2:
        raise PreconditionError("need at least two scales")
    if any(b >= a for a, b in zip(scales, scales[1:])):
        raise PreconditionError("scales must be strictly decreasing")
    return scales


def _estimate(p: FamilyParams, samples: int, scales, gap: bool, fit_range) -> DimEstimate:
    scales = _check_scales(scales)
    pts, failed = family_points(p, samples, gap=gap)
    counts = box_counts(pts, scales)
    slope, fr = fit_slope(scales, counts, fit_range)
    eps = max(float(pts.max()) - 2.0, 0.0) if len(pts) else 0.0
    bound = dimension_bound(p.N, eps) if not gap else math.log2(2**p.N - 2) / p.N * math.log(2) / math.log(2 + eps)
    return DimEstimate(scales, counts, slope, fr, len(pts), p.N, eps, bound, failed, pts)


def estimate_dimension(p: FamilyParams, samples: int, scales, fit_range=None) -> DimEstimate:
    return _estimate(p, samples, scales, False, fit_range)


def estimate_dimension_gap(N: int, samples: int, scales, depth_blocks: int = 6, seed: int = 0,
                           fit_range=None) -> DimEstimate:
    """Same estimator with mu frozen at (0^(2N-1) 1)^inf."""
    return _estimate(FamilyParams(N, depth_blocks, seed), samples, scales, True, fit_range)
