"""Two-component Gaussian mixtures that barely overlap.

P = N(-10,1)/2 + N(8,1)/2 labeled by x < -1, Q = N(-8,1)/2 + N(10,1)/2
labeled by x < 1.  A threshold at 0 is essentially perfect on both, so the
ideal joint error is tiny.  With r chosen between that error and its square
root, the localized divergence is orders of magnitude below the plain one.
The oracle column is an independent dense-grid brute force.
"""

import math

from locdisc import discrepancy as disc
from locdisc import oracle
from locdisc.scenarios import ex42_domains, threshold_class

P, Q = ex42_domains()
cls = threshold_class(P, Q)

lam, h = disc.ideal_joint_error(P, Q, cls)
print(f"ideal joint error {lam:.3e} at {h}; admissible r in ({lam:.1e}, {math.sqrt(lam):.1e})")

r = 1e-8
plain = disc.hdh_divergence(P, Q, cls)
local = disc.localized_hdh(P, Q, cls, r=r)
ora = oracle.oracle_sup(plain.kind, P, Q, cls, 1e-4)
print(f"plain divergence      {plain.value:.6f}   (oracle {ora:.6f})")
print(f"localized at r={r:g}  {local.value:.3e}")
print(f"ratio                 {plain.value / local.value:.0f}")
