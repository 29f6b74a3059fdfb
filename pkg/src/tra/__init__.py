"""Tridiagonal representation approach (TRA) for the Schrodinger equation.

Modules: specfun (gamma and hypergeometric functions), orthopoly
(polynomial recursions), basis (coordinate maps and basis functions),
potentials, operator (matrix assembly), eigensolve, solver, fdoracle
(finite-difference reference solver) and cli.
"""

__version__ = "0.1.0"
