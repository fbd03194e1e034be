"""Curvature, positivity and Hermitian-curvature-flow computations for
invariant metrics on six-dimensional solvmanifolds and for the two-parameter
metric family on linear Hopf manifolds."""

__version__ = "0.1.0"
