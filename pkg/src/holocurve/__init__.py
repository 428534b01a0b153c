"""Contour-integral calculus for holomorphic fields and ODE solution maps."""

__version__ = "0.1.0"
