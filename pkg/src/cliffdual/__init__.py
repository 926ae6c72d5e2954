"""Exact tools for the commutant of Clifford tensor powers.

Modules cover cyclotomic scalars, linear algebra over Z_d, quadratic forms,
stochastic isotropic subspaces, orthogonal stochastic groups, the tensor-power
representation, commutant operators, decompositions and the conjugation
protocol.  The command line entry point lives in :mod:`cliffdual.cli`.
"""

__version__ = "0.1.0"
