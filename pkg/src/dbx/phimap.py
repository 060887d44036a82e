"""The map from base pairs to (mu, alpha) and its inverse.

Forward: quasi-lazy digits of ell and quasi-greedy digits of r.
Inverse: for eventually periodic (mu, alpha) the base pair solves

    f_alpha(q0, q1) = pi(alpha) - q0/q1 = 0
    f~_mu(q0, q1)   = pi~(mu)   - q1/q0 = 0.

For fixed q0 each equation has one root q1 in (1, q0/(q0-1)]; call them
g_alpha(q0) and g~_mu(q0).  Their difference changes sign once on
(1, q_alpha), so the system is solved by nested bisection.  The bisection
core is vectorised over many sequence pairs at once; single solves are then
polished by Newton's method in multiprecision.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd

import numpy as np

from .errors import DomainError, NumericError, PreconditionError
from .expand import BasePair, Region, critical_expansions, series_value
from .numeric import DEFAULT_PREC, Dual2, mpctx
from .seqcore import EpSeq

__all__ = [
    "SolverConfig",
    "SolveResult",
    "InverseResult",
    "PhiForward",
    "f_alpha",
    "f_tilde_mu",
    "g_alpha",
    "g_tilde_mu",
    "q_alpha_bound",
    "phi_forward",
    "phi_inverse",
    "phi_inverse_many",
    "solve_batch",
    "phi_inverse_continuity_probe",
]

OK, NO_ROOT, MULTIPLE = 0, 1, 2


@dataclass(frozen=True)
class SolverConfig:
    root_tol: float = 1e-12
    residual_tol: float = 1e-12
    max_iter: int = 200
    grid: int = 64
    grid_floor: float = 1e-12
    outer_grid: int = 16
    eps0: float = 1e-9


@dataclass(frozen=True)
class SolveResult:
    root: float
    bracket: tuple[float, float]
    residual: float
    iterations: int


@dataclass(frozen=True)
class InverseResult:
    q0: object
    q1: object
    residual_f: object
    residual_ftilde: object
    bracket: tuple[float, float]
    iterations: int
    prec: int
    radius: float

    @property
    def bracket_width(self) -> float:
        return self.bracket[1] - self.bracket[0]

    def base_pair(self) -> BasePair:
        return BasePair(self.q0, self.q1, radius=self.radius, prec=self.prec)


@dataclass(frozen=True)
class PhiForward:
    mu_prefix: str
    alpha_prefix: str
    certified: int
    mu: EpSeq | None = field(default=None)
    alpha: EpSeq | None = field(default=None)


# ---------------------------------------------------------------- float core

def _digit_array(words: list[str]) -> np.ndarray:
    if not words:
        return np.zeros((0, 0), dtype=bool)
    return np.array([[c == "1" for c in w] for w in words], dtype=bool).reshape(len(words), len(words[0]))


def _sums(q0, q1, digits: np.ndarray, tilde: bool):
    shape = np.broadcast(q0, q1).shape
    col = (digits.shape[0],) + (1,) * (len(shape) - 1)
    inv0, inv1 = 1.0 / q0, 1.0 / q1
    disc = np.ones(shape)
    val = np.zeros(shape)
    for j in range(digits.shape[1]):
        d = digits[:, j].reshape(col)
        disc = disc * np.where(d, inv1, inv0)
        val += disc * (~d if tilde else d)
    return val, disc


def _value(q0, q1, pre, per, tilde):
    vp, dp = _sums(q0, q1, pre, tilde)
    vq, dq = _sums(q0, q1, per, tilde)
    with np.errstate(divide="ignore", invalid="ignore"):
        return vp + dp * vq / (1.0 - dq)


@dataclass(frozen=True)
class _Seqs:
    pre: np.ndarray
    per: np.ndarray

    @classmethod
    def of(cls, seqs: list[EpSeq]) -> "_Seqs":
        return cls(_digit_array([s.pre for s in seqs]), _digit_array([s.per for s in seqs]))

    def repeat(self, k: int) -> "_Seqs":
        return _Seqs(np.repeat(self.pre, k, axis=0), np.repeat(self.per, k, axis=0))


def _f_alpha(al: _Seqs, q0, q1):
    return _value(q0, q1, al.pre, al.per, False) - q0 / q1


def _f_tilde(mu: _Seqs, q0, q1):
    return _value(q0, q1, mu.pre, mu.per, True) - q1 / q0


def _bisect(fun, lo, hi, flo, cfg: SolverConfig):
    """Vectorised bisection keeping sign(f(lo)) = sign(flo)."""
    lo, hi = lo.copy(), hi.copy()
    active = np.ones(lo.shape, dtype=bool)
    it = 0
    mid = 0.5 * (lo + hi)
    fmid = fun(mid)
    while it < cfg.max_iter and active.any():
        it += 1
        same = np.sign(fmid) == np.sign(flo)
        lo = np.where(active & same, mid, lo)
        hi = np.where(active & ~same, mid, hi)
        mid = 0.5 * (lo + hi)
        fmid = fun(mid)
        width = hi - lo
        at_floor = (mid <= lo) | (mid >= hi)
        active = ~at_floor & ((width > cfg.root_tol) | (np.abs(fmid) > cfg.residual_tol))
    return mid, lo, hi, fmid, it


def _inner(fun, q0: np.ndarray, cfg: SolverConfig):
    """Root q1 in (1, q0/(q0-1)] of fun(q0, q1) for each entry of q0."""
    b = q0 / (q0 - 1.0)
    ladder = cfg.grid_floor ** (np.arange(cfg.grid - 1, -1, -1) / (cfg.grid - 1))
    grid = 1.0 + (b - 1.0)[:, None] * ladder[None, :]
    grid[:, -1] = b
    F = fun(q0[:, None], grid)
    s = np.sign(F)
    change = s[:, :-1] * s[:, 1:] < 0
    count = change.sum(axis=1)
    at_b = np.abs(F[:, -1]) <= cfg.residual_tol
    status = np.where(count > 1, MULTIPLE, np.where((count == 0) & ~at_b, NO_ROOT, OK))
    idx = np.argmax(change, axis=1)
    rows = np.arange(len(q0))
    lo, hi, flo = grid[rows, idx], grid[rows, idx + 1], F[rows, idx]
    root, lo, hi, fr, it = _bisect(lambda q1: fun(q0, q1), lo, hi, flo, cfg)
    boundary = at_b & (count == 0)
    root = np.where(boundary, b, root)
    lo = np.where(boundary, b, lo)
    hi = np.where(boundary, b, hi)
    fr = np.where(boundary, F[:, -1], fr)
    return root, lo, hi, fr, it, status


def _q_alpha(al: _Seqs, cfg: SolverConfig):
    if not (~al.per).any(axis=1).all():
        raise DomainError("alpha ends in 1^inf: the series diverges at q1 = 1")
    one = np.ones(al.pre.shape[0])

    def fun(q0):
        return _value(q0, one, al.pre, al.per, False) - q0

    lo = one + cfg.eps0 * 1e-3
    hi = 2.0 * one
    for _ in range(64):
        up = fun(hi) > 0
        if not up.any():
            break
        hi = np.where(up, 2.0 * hi, hi)
    flo = fun(lo)
    if not (flo > 0).all():
        raise NumericError("q_alpha bracket lost at q0 -> 1")
    tight = SolverConfig(root_tol=1e-15, residual_tol=0.0, max_iter=cfg.max_iter)
    root, _, _, fr, _, = _bisect(fun, lo, hi, flo, tight)[:5]
    return root, fr


def solve_batch(mu: _Seqs, al: _Seqs, cfg: SolverConfig = SolverConfig()):
    """Nested bisection for a batch of pairs sharing word lengths.

    Returns (q0, q1, lo, hi, iterations, status) as arrays.
    """
    S = al.pre.shape[0]
    qa, _ = _q_alpha(al, cfg)
    fa = lambda q0, q1: _f_alpha(al, q0, q1)
    ft = lambda q0, q1: _f_tilde(mu, q0, q1)

    def h(q0, seqs_mu=mu, seqs_al=al):
        fa_ = lambda a, b: _f_alpha(seqs_al, a, b)
        ft_ = lambda a, b: _f_tilde(seqs_mu, a, b)
        ra, *_, sa = _inner(fa_, q0, cfg)
        rt, *_, st = _inner(ft_, q0, cfg)
        # no root for f_alpha means g_alpha has dropped to 1, below g~_mu
        val = np.where(sa == NO_ROOT, -np.inf, ra - rt)
        bad = (sa == MULTIPLE) | (st != OK)
        return val, bad

    lo = np.full(S, 1.0 + cfg.eps0)
    hi = qa - cfg.eps0
    status = np.zeros(S, dtype=int)
    status[hi <= lo] = NO_ROOT
    hi = np.maximum(hi, lo * (1 + 1e-12))

    # coarse scan of h for a single sign change
    G = cfg.outer_grid
    t = np.linspace(0.0, 1.0, G)
    pts = lo[:, None] + (hi - lo)[:, None] * t[None, :]
    hv, bad = h(pts.reshape(-1), mu.repeat(G), al.repeat(G))
    hv, bad = hv.reshape(S, G), bad.reshape(S, G)
    s = np.sign(hv)
    count = (s[:, :-1] * s[:, 1:] < 0).sum(axis=1)
    status = np.where(bad.any(axis=1) | (count > 1), MULTIPLE, status)
    status = np.where((count == 0) & (status == OK), NO_ROOT, status)
    idx = np.argmax(s[:, :-1] * s[:, 1:] < 0, axis=1)
    rows = np.arange(S)
    blo, bhi, hlo = pts[rows, idx], pts[rows, idx + 1], hv[rows, idx]

    outer_cfg = SolverConfig(root_tol=cfg.root_tol, residual_tol=np.inf, max_iter=cfg.max_iter)
    q0, blo, bhi, _, it = _bisect(lambda x: h(x)[0], blo, bhi, hlo, outer_cfg)
    q1, *_ = _inner(fa, q0, cfg)
    return q0, q1, blo, bhi, it, status


# ------------------------------------------------------------ scalar API

def f_alpha(alpha: EpSeq, q0, q1):
    return series_value(q0, q1, alpha.pre, alpha.per) - q0 / q1


def f_tilde_mu(mu: EpSeq, q0, q1):
    return series_value(q0, q1, mu.pre, mu.per, tilde=True) - q1 / q0


def _scalar_inner(fun, seq: EpSeq, q0: float, cfg: SolverConfig, what: str) -> SolveResult:
    if not q0 > 1:
        raise PreconditionError("q0 must exceed 1")
    seqs = _Seqs.of([seq])
    root, lo, hi, fr, it, status = _inner(lambda a, b: fun(seqs, a, b), np.array([float(q0)]), cfg)
    if status[0] == MULTIPLE:
        raise NumericError(f"{what}: several sign changes on (1, q0/(q0-1)) at q0={q0}")
    if status[0] == NO_ROOT:
        raise DomainError(f"{what}: no sign change on (1, q0/(q0-1)) at q0={q0}")
    return SolveResult(float(root[0]), (float(lo[0]), float(hi[0])), float(abs(fr[0])), int(it))


def g_alpha(alpha: EpSeq, q0: float, cfg: SolverConfig = SolverConfig()) -> SolveResult:
    if alpha.digit(1) != 1:
        raise PreconditionError("alpha must start with 1")
    return _scalar_inner(_f_alpha, alpha, q0, cfg, "g_alpha")


def g_tilde_mu(mu: EpSeq, q0: float, cfg: SolverConfig = SolverConfig()) -> SolveResult:
    if mu.digit(1) != 0:
        raise PreconditionError("mu must start with 0")
    return _scalar_inner(_f_tilde, mu, q0, cfg, "g_tilde_mu")


def q_alpha_bound(alpha: EpSeq, cfg: SolverConfig = SolverConfig()) -> float:
    if alpha.digit(1) != 1:
        raise PreconditionError("alpha must start with 1")
    root, _ = _q_alpha(_Seqs.of([alpha]), cfg)
    return float(root[0])


def _newton(mu: EpSeq, alpha: EpSeq, q0, q1, prec: int):
    ctx = mpctx(prec + 32)
    x0, x1 = ctx.mpf(q0), ctx.mpf(q1)
    tol = ctx.mpf(2) ** (-(prec + 8))
    for it in range(1, 80):
        a, b = Dual2(x0, 1, 0), Dual2(x1, 0, 1)
        F = f_alpha(alpha, a, b)
        G = f_tilde_mu(mu, a, b)
        det = F.d0 * G.d1 - F.d1 * G.d0
        if det == 0:
            raise NumericError("singular Jacobian while polishing the root")
        d0 = (F.v * G.d1 - F.d1 * G.v) / det
        d1 = (F.d0 * G.v - F.v * G.d0) / det
        x0, x1 = x0 - d0, x1 - d1
        if max(abs(d0), abs(d1)) <= tol * max(1, abs(x0), abs(x1)):
            return x0, x1, it
    raise NumericError("Newton polish did not converge")


def phi_inverse(mu: EpSeq, alpha: EpSeq, prec: int = DEFAULT_PREC,
                cfg: SolverConfig = SolverConfig()) -> InverseResult:
    """The base pair whose quasi-lazy / quasi-greedy critical expansions are (mu, alpha)."""
    from .classify import in_B_prime

    member = in_B_prime(mu, alpha)
    if not member.is_yes:
        raise PreconditionError(f"not in B': {member.witness}")
    q0, q1, lo, hi, it, status = solve_batch(_Seqs.of([mu]), _Seqs.of([alpha]), cfg)
    if status[0] == MULTIPLE:
        raise NumericError("several sign changes of g_alpha - g~_mu; refusing to pick one")
    if status[0] != OK:
        raise NumericError("no sign change of g_alpha - g~_mu on (1, q_alpha)")
    x0, x1, _ = _newton(mu, alpha, q0[0], q1[0], prec)
    slack = max(1e-9, 10 * (hi[0] - lo[0]))
    if not (lo[0] - slack <= x0 <= hi[0] + slack):
        raise NumericError("polished root left the certified bracket")
    ctx = mpctx(prec)
    x0, x1 = ctx.mpf(x0), ctx.mpf(x1)
    if not x0 + x1 > x0 * x1:
        raise NumericError("solved pair is not in region B")
    ra, rt = abs(f_alpha(alpha, x0, x1)), abs(f_tilde_mu(mu, x0, x1))
    radius = float(ctx.mpf(2) ** (-(prec - 6)) * max(x0, x1))
    return InverseResult(x0, x1, ra, rt, (float(lo[0]), float(hi[0])), int(it), prec, radius)


def _uniform(seqs: list[EpSeq]) -> list[tuple[str, str]]:
    """Rewrite sequences with a common preperiod length and period length."""
    P = max(len(s.pre) for s in seqs)
    Q = 1
    for s in seqs:
        Q = Q * len(s.per) // gcd(Q, len(s.per))
    return [(s.prefix(P), s.prefix(P + Q)[P:]) for s in seqs]


def phi_inverse_many(pairs: list[tuple[EpSeq, EpSeq]], prec: int = DEFAULT_PREC,
                     cfg: SolverConfig = SolverConfig()) -> list[InverseResult]:
    """phi_inverse for many pairs, sharing one vectorised bisection pass."""
    from .classify import in_B_prime

    for mu, alpha in pairs:
        member = in_B_prime(mu, alpha)
        if not member.is_yes:
            raise PreconditionError(f"not in B': ({mu}, {alpha}): {member.witness}")
    mus = _uniform([p[0] for p in pairs])
    als = _uniform([p[1] for p in pairs])
    m = _Seqs(_digit_array([a for a, _ in mus]), _digit_array([b for _, b in mus]))
    a = _Seqs(_digit_array([a for a, _ in als]), _digit_array([b for _, b in als]))
    q0, q1, lo, hi, it, status = solve_batch(m, a, cfg)
    out = []
    ctx = mpctx(prec)
    for i, (mu, alpha) in enumerate(pairs):
        if status[i] != OK:
            raise NumericError(f"no unique sign change for ({mu}, {alpha})")
        x0, x1, _ = _newton(mu, alpha, q0[i], q1[i], prec)
        x0, x1 = ctx.mpf(x0), ctx.mpf(x1)
        ra, rt = abs(f_alpha(alpha, x0, x1)), abs(f_tilde_mu(mu, x0, x1))
        radius = float(ctx.mpf(2) ** (-(prec - 6)) * max(x0, x1))
        out.append(InverseResult(x0, x1, ra, rt, (float(lo[i]), float(hi[i])), int(it), prec, radius))
    return out


def phi_forward(q: BasePair, depth: int) -> PhiForward:
    """Prefixes of length ``depth`` of (mu, alpha) = Phi(q)."""
    if depth < 1:
        raise PreconditionError("depth must be at least 1")
    region = q.region
    if region is Region.OUTSIDE:
        raise PreconditionError("base pair lies outside B and C")
    if region is Region.C:
        z, o = EpSeq("", "0"), EpSeq("", "1")
        return PhiForward("0" * depth, "1" * depth, depth, z, o)
    mu, alpha, cert = critical_expansions(q, depth)
    mu_e = mu if isinstance(mu, EpSeq) else None
    al_e = alpha if isinstance(alpha, EpSeq) else None
    mp = mu.prefix(depth) if mu_e else mu
    ap = alpha.prefix(depth) if al_e else alpha
    return PhiForward(mp, ap, cert, mu_e, al_e)


@dataclass(frozen=True)
class ContinuityReport:
    depth: int
    neighbours: list
    deviation: float


def phi_inverse_continuity_probe(mu: EpSeq, alpha: EpSeq, perturb_depth: int,
                                 prec: int = DEFAULT_PREC) -> ContinuityReport:
    """Solve nearby pairs agreeing with (mu, alpha) through ``perturb_depth`` digits."""
    from .classify import nearby_B_prime_pairs

    base = phi_inverse(mu, alpha, prec)
    rows, dev = [], 0.0
    for m2, a2 in nearby_B_prime_pairs(mu, alpha, perturb_depth):
        r = phi_inverse(m2, a2, prec)
        d = float(max(abs(r.q0 - base.q0), abs(r.q1 - base.q1)))
        rows.append((str(m2), str(a2), d))
        dev = max(dev, d)
    return ContinuityReport(perturb_depth, rows, dev)
