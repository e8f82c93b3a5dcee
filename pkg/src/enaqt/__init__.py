"""Steady-state transport simulator for open tight-binding exciton chains.

Builds restricted hard-core Fock spaces, chain Hamiltonians with disorder,
long-range hopping and nearest-neighbor interactions, Lindblad dissipators
for dephasing/injection/extraction, and solves for the unique steady-state
density matrix, from which particle current, site populations, population
spread and related observables are computed and disorder-averaged.
"""

__version__ = "0.1.0"

from .fock import FockBasis, enumerate_basis
from .model import ChainSpec, DisorderRealization, EigenStructure

__all__ = [
    "FockBasis",
    "enumerate_basis",
    "ChainSpec",
    "DisorderRealization",
    "EigenStructure",
    "__version__",
]
