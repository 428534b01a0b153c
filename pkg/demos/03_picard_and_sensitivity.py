"""Solving an initial value problem and differentiating its solution map.

The Riccati field ``z0^2`` from ``xi = 0.5`` has the closed form
``0.5 / (1 - 0.5 t)``. Its derivative in ``xi`` solves the variational
equation, and must agree with a central difference quotient.
"""

import numpy as np

from holocurve.fieldexpr import Field
from holocurve.lincomplex import Box, Interval
from holocurve.odesolve import condition_P, picard_solve, rk4_solve, solution_map_derivative

box = Box(Interval(0.0, 0.5), [0.5], 1.0)
phi = Field.from_source("z0^2", box)

ok, B1 = condition_P(phi, [0.5])
print(f"contraction condition holds: {ok} (closest rung B1 = {B1:.3f})")

rep = picard_solve(phi, [0.5], tol=1e-13)
t = rep.solution.grid.nodes
y = rep.solution.values[:, 0]
print(f"Picard iterations: {rep.iterations}, residual {rep.residual:.1e}")
print(f"error vs closed form: {np.max(np.abs(y - 0.5 / (1 - 0.5 * t))):.2e}")
print(f"error vs RK4:         {np.max(np.abs(y - rk4_solve(phi, [0.5]).values[:, 0])):.2e}")

v = solution_map_derivative(phi, [0.5], rep.solution, [1.0]).values[:, 0]
exact = 1 / (1 - 0.5 * t) ** 2
print(f"\nd y / d xi vs closed form 1/(1 - xi t)^2: {np.max(np.abs(v - exact)):.2e}")
vi = solution_map_derivative(phi, [0.5], rep.solution, [1j]).values[:, 0]
print(f"complex linearity, |D(i) - i D(1)|:       {np.max(np.abs(vi - 1j * v)):.2e}")
