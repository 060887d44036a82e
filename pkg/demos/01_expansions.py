"""
Digit expansions in a pair of bases
===================================

Greedy, lazy and quasi expansions of a few points, then the two
critical expansions that drive everything else.
"""
from fractions import Fraction

from dbx import BasePair, run_algorithm
from dbx.expand import critical_expansions
from dbx.expand import critical_points

q = BasePair(Fraction(3, 2), Fraction(7, 4))
cp = critical_points(q)
print("lower critical point", float(cp.ell))
print("upper critical point", float(cp.r))

# one point, four algorithms
x = Fraction(1, 3)
for mode in ("greedy", "quasi-greedy", "lazy", "quasi-lazy"):
    run = run_algorithm(q, x, mode, 24)
    print(f"{mode:>13}", run.digits, run.certified_depth)

#%%
# The critical expansions: greedy at the upper point, lazy at the lower one.
mu, alpha, cert = critical_expansions(q, 32)
print("mu   ", mu)
print("alpha", alpha, "certified", cert)

#%%
# Irrational bases go through interval arithmetic; the certified depth says
# how far the digits can be trusted at the working precision.
import mpmath
phi = (1 + mpmath.sqrt(5)) / 2
q2 = BasePair(phi, mpmath.mpf(3) / 2)
run = run_algorithm(q2, mpmath.mpf("0.4"), "greedy", 80)
print(run.digits[:40], "... certified to", run.certified_depth)
