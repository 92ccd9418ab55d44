"""Workbench for discrete quantum geometry on graphs, 2x2 matrices and
power sets: graph differential calculi with direction-dependent metric
weights, Markov/diffusion equivalence, discrete Schroedinger processes with
unitary connections, quantum Riemannian geometry of M2 over the complex and
GF(2) fields, and de Morgan duality of digital calculi."""

from .scalars import COMPLEX, GAUSS, GF2, GF2_DOMAIN, GaussianRational, ScalarDomain

__version__ = "0.1.0"

__all__ = [
    "COMPLEX",
    "GAUSS",
    "GF2",
    "GF2_DOMAIN",
    "GaussianRational",
    "ScalarDomain",
    "__version__",
]
