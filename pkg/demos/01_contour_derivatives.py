"""Differentiating with a circle of quadrature nodes.

A holomorphic map is differentiated by averaging its values on a circle,
no step-size tuning involved. This demo shows the error falling to
rounding level once the node count passes the polynomial degree, then
shows how the consistency check separates holomorphic maps from ``conj``.
"""

import math

import numpy as np

from holocurve.contour import ContourSpec, kth_differential, mean_value_check

coeffs = np.array([3.0**j / math.factorial(j) for j in range(13)])
poly = lambda z: np.polynomial.polynomial.polyval(z, coeffs)  # noqa: E731
exact = np.polynomial.polynomial.polyval(0.3, np.polynomial.polynomial.polyder(coeffs))

print("first derivative of a degree-12 polynomial at 0.3")
print(f"{'m_nodes':>8}  {'relative error':>15}")
for m in (8, 10, 12, 14, 16, 32):
    got = kth_differential(poly, [0.3], [[1.0]], ContourSpec(m, 1.0))[0]
    print(f"{m:>8}  {abs(got - exact) / abs(exact):>15.3e}")

print("\nsecond derivative of exp at 0 along (1, 1j):")
d2 = kth_differential(np.exp, [0.0], [[1.0], [1j]], ContourSpec(32, 0.5))[0]
print(f"  {d2:.15f}   (exact: 1j)")

spec = ContourSpec(32, 0.5)
print("\nconsistency residual (zero for holomorphic maps):")
print(f"  exp : {mean_value_check(np.exp, [0.2], [1.0], spec):.2e}")
print(f"  conj: {mean_value_check(np.conj, [0.0], [1.0], spec):.2e}   (equals the radius)")
