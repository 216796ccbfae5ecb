"""Numerical workbench for the integrable inhomogeneous six-vertex model.

Builds every operator of the model on the full 2^N spin space of a
finite chain — transfer matrix, Baxter Q-operators, discrete symmetry
and conjugation operators, (quasi-)translations, Hamiltonians and the
Hermitian structures that make them self-adjoint — and cross-checks the
algebraic identities tying them together at desk scale.
"""

__version__ = "0.1.0"

from .lattice import ModelParams, Tolerances, TOLS  # noqa: F401
