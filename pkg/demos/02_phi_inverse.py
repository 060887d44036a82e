"""
From a pair of sequences back to a base pair
============================================
"""
import numpy as np

from dbx import EpSeq, phi_forward, phi_inverse
from dbx.phimap import phi_inverse_many

mu, alpha = EpSeq.parse("(00101)*"), EpSeq.parse("(11100)*")
res = phi_inverse(mu, alpha)
print(res.q0, res.q1)
print("residuals", res.residual_f, res.residual_ftilde)

# going forward again recovers the sequences we started from
fw = phi_forward(res.base_pair(), 30)
print(fw.mu_prefix)
print(fw.alpha_prefix)

#%%
# A batch: rotate the upper sequence and watch q0 move monotonically.
pairs = [(EpSeq.parse("(01)*"), EpSeq.parse(f"(1{'1' * k}0)*")) for k in range(1, 7)]
out = phi_inverse_many(pairs)
q0 = np.array([float(r.q0) for r in out])
q1 = np.array([float(r.q1) for r in out])
print(np.column_stack([q0, q1]))
print("q0 increasing:", bool(np.all(np.diff(q0) > 0)))
