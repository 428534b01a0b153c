"""An entire function that is unbounded on the unit ball.

``chi(x) = sum_i i x_i^i`` is holomorphic everywhere, yet along
``(1 - 1/i) e_i`` its value grows like ``i / e``. The explicit continuity
and remainder bounds still hold, with constants depending on how many
coordinates are large.
"""

import numpy as np

from holocurve.chifun import continuity_bound_check, remainder_bound_check, unboundedness_witness
from holocurve.lincomplex import norm

print(" n    |x|_1     chi(x)")
for n in (10, 100, 1000):
    x, value = unboundedness_witness(1.0, n)
    print(f"{n:>5}  {norm(x, 1):.5f}  {value.real:10.4f}")

rng = np.random.default_rng(0)
x = 0.3 * (rng.normal(size=32) + 1j * rng.normal(size=32))
u = rng.normal(size=32) + 1j * rng.normal(size=32)
u *= 0.1 / norm(u)
chk = continuity_bound_check(x, u)
print(f"\ncontinuity: |chi(x+u) - chi(x)| = {chk.lhs:.3e} <= {chk.rhs:.3e} (N = {chk.N})")
rem = remainder_bound_check(x, u, 1e-4)
print(f"remainder:  delta = {rem.delta:.3e}, worst Delta/eps = {rem.worst_ratio:.3e}")
