"""Composing a field with a curve and differentiating in the curve.

The derivative of ``y -> x o [id, y]`` in direction ``v`` is read off a
scaled contour that stays inside a certified tube around the graph of
``y``. The remainder of the first-order expansion shrinks linearly in
the complex step.
"""

import numpy as np

from holocurve.fieldexpr import Field
from holocurve.lincomplex import Box, Curve, Grid, Interval
from holocurve.superpose import partial2_apply, remainder_decay, safety_radius

box = Box(Interval(0.0, 1.0), [0.0], 2.0)
x = Field.from_source("exp(z0) + t*z0^3", box)
u = Field.from_source("z0^2", box)
grid = Grid(box.interval, 41)
y = Curve.from_function(grid, lambda t: 0.4 * t + 0.2j)
v = Curve.from_function(grid, lambda t: 1 + 0.5j * t)

eps = safety_radius(y, box)
print(f"certified tube radius around the graph: {eps:.3f}")

av = partial2_apply(x, y, v).values[:, 0]
T, Y, V = grid.nodes, y.values[:, 0], v.values[:, 0]
exact = (np.exp(Y) + 3 * T * Y**2) * V
print(f"contour derivative vs symbolic: max error {np.max(np.abs(av - exact)):.2e}")

study = remainder_decay(x, u, y, v, 0.4 * eps / 1.2)
print("\n|t|           remainder/|t|   (direction 1)")
for s, r in zip(study.moduli, study.remainders[0]):
    print(f"{s:.3e}     {r / s:.5f}")
print(f"fitted orders per direction: {np.round(study.orders, 3)}")
