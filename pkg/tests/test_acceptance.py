"""Acceptance suite: one test and one PASS/FAIL line per criterion."""
import time
from fractions import Fraction
from functools import lru_cache
import io
import json

import numpy as np

from conftest import record
from dbx.classify import classify_pair, in_closure_U2_prime, in_V2_prime, perturbation_stability_probe
from dbx.cli import dispatch
from dbx.dimension import (FamilyParams, block_count, enumerate_block_count, estimate_dimension,
                           estimate_dimension_gap, sample_family_pairs, separation_check)
from dbx.expand import BasePair, is_unique_expansion, orbit_uniqueness_check, pi_eval
from dbx.ineq import SeriesInput, eval_S_auto, root_positivity, verify_positivity_sweep
from dbx.numeric import mpctx
from dbx.phimap import f_alpha, f_tilde_mu, phi_forward, phi_inverse, phi_inverse_many
from dbx.seqcore import EpSeq, shift
from helpers import count_expansions, random_b_region_rationals, random_bprime_pairs, random_epseq

E = EpSeq.parse
CTX = mpctx(128)
PHI = (1 + CTX.sqrt(5)) / 2


@lru_cache(maxsize=None)
def golden_solve():
    t = time.perf_counter()
    out, err = io.StringIO(), io.StringIO()
    code = dispatch(["phi-inv", "--mu", "(01)*", "--alpha", "(10)*"], out, err)
    cli_time = time.perf_counter() - t
    r = phi_inverse(E("(01)*"), E("(10)*"))
    return code, json.loads(out.getvalue()) if code == 0 else {}, cli_time, r


@lru_cache(maxsize=None)
def monotone_pair_solves():
    return (phi_inverse(E("(00101)*"), E("(11100)*")),
            phi_inverse(E("(00100101)*"), E("(1110)*")))


@lru_cache(maxsize=None)
def round_trip_run():
    t = time.perf_counter()
    pairs = random_bprime_pairs(50, seed=2024, max_pre=4, max_per=8)
    sols = phi_inverse_many(pairs)
    failures = []
    for (mu, al), r in zip(pairs, sols):
        fw = phi_forward(r.base_pair(), 48)
        if fw.mu_prefix != mu.prefix(48) or fw.alpha_prefix != al.prefix(48):
            failures.append((str(mu), str(al)))
    return pairs, sols, failures, time.perf_counter() - t


def test_criterion_01_golden_fixed_point():
    code, js, dt, _ = golden_solve()
    err0 = abs(CTX.mpf(js["q0"]) - PHI) if js else float("inf")
    err1 = abs(CTX.mpf(js["q1"]) - PHI) if js else float("inf")
    ok = code == 0 and err0 < 1e-10 and err1 < 1e-10 and dt < 1.0
    record(1, ok, f"phi-inv ((01)*,(10)*) -> |q0-phi|={float(err0):.1e} |q1-phi|={float(err1):.1e}, {dt:.3f} s")
    assert ok


def test_criterion_02_non_monotone_inverse():
    a, b = monotone_pair_solves()
    d0, d1 = float(b.q0 - a.q0), float(a.q1 - b.q1)
    ok = d0 > 1e-9 and d1 > 1e-9
    record(2, ok, f"q0'-q0={d0:.6f} > 0 and q1-q1'={d1:.6f} > 0 "
                  f"(q0,q1)=({float(a.q0):.10f},{float(a.q1):.10f}) (q0',q1')=({float(b.q0):.10f},{float(b.q1):.10f})")
    assert ok


def test_criterion_03_round_trip():
    pairs, _, failures, dt = round_trip_run()
    ok = len(pairs) == 50 and not failures and dt < 60
    record(3, ok, f"{len(pairs)} random B' pairs, 48-digit round trip failures={len(failures)}, {dt:.1f} s")
    assert ok, failures


def test_criterion_04_boundary_identities_and_residuals():
    bad = []
    for q0, q1 in random_b_region_rationals(20, seed=44):
        for q in (BasePair(q0, q1), BasePair(CTX.mpf(q0.numerator) / q0.denominator,
                                                CTX.mpf(q1.numerator) / q1.denominator)):
            if pi_eval(q, E("0*")) != 0:
                bad.append(("zero", q))
            if abs(pi_eval(q, E("1*")) - 1 / (q.values()[1] - 1)) >= 1e-15:
                bad.append(("ones", q))
    resid = []
    _, _, _, g = golden_solve()
    resid += [(E("(01)*"), E("(10)*"), g)]
    a, b = monotone_pair_solves()
    resid += [(E("(00101)*"), E("(11100)*"), a), (E("(00100101)*"), E("(1110)*"), b)]
    pairs, sols, _, _ = round_trip_run()
    resid += [(mu, al, r) for (mu, al), r in zip(pairs, sols)]
    worst = max(max(abs(f_alpha(al, r.q0, r.q1)), abs(f_tilde_mu(mu, r.q0, r.q1))) for mu, al, r in resid)
    ok = not bad and worst < 1e-12
    record(4, ok, f"pi(0^inf)=0 and pi(1^inf)=1/(q1-1) at 20 rational pairs (exact and 128-bit), "
                  f"violations={len(bad)}; max residual over {len(resid)} solves={float(worst):.1e}")
    assert ok


def test_criterion_05_uniqueness_against_brute_force():
    q = BasePair(2, Fraction(3, 2))
    rng = np.random.default_rng(55)
    disagreements, n_unique = [], 0
    for _ in range(100):
        a = random_epseq(rng, 4, 8)
        brute = count_expansions(Fraction(2), Fraction(3, 2), pi_eval(q, a), 14) == 1
        v1, v2 = is_unique_expansion(q, a), orbit_uniqueness_check(q, a)
        n_unique += brute
        if v1.is_yes != brute or v2.is_yes != brute or v1.is_unknown or v2.is_unknown:
            disagreements.append(str(a))
    ok = not disagreements
    record(5, ok, f"(2,3/2): 100 sequences ({n_unique} unique by depth-14 enumeration), "
                  f"disagreements={len(disagreements)}")
    assert ok, disagreements


def test_criterion_06_classifier_nesting():
    mu, al = E("(01)*"), E("(10)*")
    c = in_closure_U2_prime(mu, al)
    witness_ok = (c.isolated and EpSeq("", c.u + c.v) == mu and EpSeq("", c.v + c.u) == al)
    golden_ok = in_V2_prime(mu, al).is_yes and c.verdict.is_no and witness_ok
    rng = np.random.default_rng(66)
    violations, counts = 0, {"U": 0, "closure": 0, "V": 0}
    for _ in range(1000):
        pc = classify_pair(random_epseq(rng, first="0"), random_epseq(rng, first="1"))
        u, cl, v = pc.in_U2prime.is_yes, pc.in_closureU2prime.is_yes, pc.in_V2prime.is_yes
        counts["U"] += u
        counts["closure"] += cl
        counts["V"] += v
        violations += (u and not cl) or (cl and not v)
    ok = golden_ok and violations == 0
    record(6, ok, f"((01)*,(10)*): V2 yes, closure no, (u,v)=({c.u},{c.v}); 1000 random pairs "
                  f"U2={counts['U']} closure={counts['closure']} V2={counts['V']} "
                  f"(vacuous U2 antecedent {1000 - counts['U']}), violations={violations}")
    assert ok


def test_criterion_07_block_count():
    mismatches, checked = [], 0
    for N in (2, 3):
        for n in (2, 3, 4):
            for k in range(2, n + 1):
                checked += 1
                if block_count(N, n, k) != enumerate_block_count(N, n, k):
                    mismatches.append((N, n, k))
    ok = not mismatches
    record(7, ok, f"{checked} (N,n,k) cases, N in {{2,3}}, n <= 4: mismatches={len(mismatches)}")
    assert ok


def test_criterion_08_inequality_suite():
    rng = np.random.default_rng(88)
    const_bad = 0
    worst_width = 0.0
    for _ in range(50):
        x, y = rng.uniform(1.1, 3.0, size=2)
        c1, c2 = (int(v) for v in rng.integers(0, 8, size=2))
        v = eval_S_auto(SeriesInput(float(x), float(y), [c1], [c2]))
        worst_width = max(worst_width, float(v.width))
        const_bad += not (v.contains(0) and v.width < 1e-9)
    sweep_fail, trials, min_lower = 0, 0, float("inf")
    for x, y in [(2.0, 2.0), (1.2, 3.0), (1.5, 1.8), (2.7, 1.3)]:
        rep = verify_positivity_sweep(x, y, 250, seed=int(x * 100 + y), nonconstant_only=True)
        trials += rep.nonconstant
        sweep_fail += len(rep.failures)
        min_lower = min(min_lower, rep.min_lower_nonconstant)
    pairs = random_bprime_pairs(20, seed=808)
    root_bad = 0
    for (mu, al), r in zip(pairs, phi_inverse_many(pairs)):
        root_bad += not root_positivity(mu, al, r.q0, r.q1).lower > 0
    ok = const_bad == 0 and sweep_fail == 0 and root_bad == 0
    record(8, ok, f"constant: 50 enclosures contain 0 (max width {worst_width:.1e}, bad={const_bad}); "
                  f"{trials} random non-constant monotone inputs, failures={sweep_fail}, min lower={min_lower:.2e}; "
                  f"S>0 at 20 solved roots, bad={root_bad}")
    assert ok


def test_criterion_09_separation():
    pairs = sample_family_pairs(FamilyParams(3, 6, seed=99), 200)
    sols = phi_inverse_many(pairs)
    pts = np.array([[float(r.q0), float(r.q1)] for r in sols])
    eps = max(float(pts.max()) - 2.0, 0.0)
    d = np.abs(pts[:, None] - pts[None]).max(-1)
    np.fill_diagonal(d, np.inf)
    violations, ms = 0, []
    for i, j in enumerate(d.argmin(1)):
        rep = separation_check(sols[i].base_pair(), sols[j].base_pair(), 3, eps)
        cert = phi_forward(sols[i].base_pair(), max(rep.m, 1)).certified
        ms.append(rep.m)
        violations += not rep.passed or cert < rep.m
    ok = violations == 0
    record(9, ok, f"N=3, 200 pairs vs nearest neighbour, eps(3)={eps:.4f}, m in [{min(ms)},{max(ms)}], "
                  f"violations={violations}")
    assert ok


def test_criterion_10_dimension_trend():
    t = time.perf_counter()
    scales = [2.0 ** -k for k in range(4, 13)]
    e2 = estimate_dimension(FamilyParams(2, 6, seed=0), 10_000, scales)
    e3 = estimate_dimension(FamilyParams(3, 6, seed=0), 10_000, scales)
    gap = estimate_dimension_gap(3, 10_000, scales)
    dt = time.perf_counter() - t
    ok = (e3.slope > e2.slope and e3.slope >= 1.2 and e3.slope >= e3.bound - 0.2
          and gap.slope >= 0.7 and dt < 600)
    record(10, ok, f"slope N=2 {e2.slope:.3f} (bound {e2.bound:.3f}), N=3 {e3.slope:.3f} "
                   f"(bound {e3.bound:.3f}, eps {e3.eps_N:.4f}), gap N=3 {gap.slope:.3f}; {dt:.0f} s")
    assert ok


def test_criterion_11_perturbation_stability():
    bad = []
    for q0, q1 in random_b_region_rationals(10, seed=111):
        q = BasePair(q0, q1)
        reps = [perturbation_stability_probe(q, e, 32) for e in (1e-4, 1e-7, 1e-10)]
        r = [x.r_agreement for x in reps]
        ell = [x.ell_agreement for x in reps]
        if r != sorted(r) or ell != sorted(ell):
            bad.append((str(q0), str(q1), r, ell))
    ok = not bad
    record(11, ok, f"10 rational B pairs, eps 1e-4 -> 1e-7 -> 1e-10, non-monotone cases={len(bad)}")
    assert ok, bad
