"""Exact engine for piecewise-polynomial pushforward densities of torus and
unitary-group moment maps, moment polytopes, eigenvalue distributions of
reduced density matrices of random quantum states, and the quantized side:
weight-multiplicity lattice counts and Kronecker/plethysm coefficients."""

__version__ = "0.1.0"
