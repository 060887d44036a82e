"""
Box counting on the block family
================================

Small sample sizes so this runs in under a minute; the acceptance
suite uses larger ones.
"""
import numpy as np

from dbx.dimension import FamilyParams, estimate_dimension, estimate_dimension_gap, tau

scales = np.geomspace(0.05, 0.0005, 12)

for N in (2, 3):
    est = estimate_dimension(FamilyParams(N, depth_blocks=6, seed=1), 20000, scales)
    print(f"N={N}  tau={tau(N):.3f}  slope={est.slope:.3f}  bound={est.bound:.3f}  "
          f"eps={est.eps_N:.4f}  failed={est.failed_solves}")

#%%
gap = estimate_dimension_gap(3, 20000, scales, seed=1)
print("gap slope", round(gap.slope, 3), "bound", round(gap.bound, 3))

# counts per scale, for plotting elsewhere
print(np.column_stack([gap.scales, gap.counts]))
