"""Restricted exciton Fock space and second-quantized operators.

Excitons are hard-core particles: a site holds at most one, and the total
particle number is truncated at ``n_max`` (1 or 2).  Basis states are 0/1
occupation tuples ordered by particle number and then lexicographically by
the tuple of occupied sites, vacuum first.  All operators are dense real
matrices in this ordering; hopping amplitudes carry no fermionic signs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "FockBasis",
    "enumerate_basis",
    "creation_op",
    "annihilation_op",
    "number_op",
    "total_number_op",
]


@dataclass(frozen=True)
class FockBasis:
    """Enumerated occupation basis for a chain of ``n_sites`` sites.

    ``states[0]`` is the vacuum.  ``index_of`` maps an occupation tuple back
    to its basis index.  Instances are immutable and safe to share.
    """

    n_sites: int
    n_max: int
    states: tuple[tuple[int, ...], ...]
    index_of: dict[tuple[int, ...], int] = field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.states)

    def particle_number(self, k: int) -> int:
        return sum(self.states[k])

    def occupied_sites(self, k: int) -> tuple[int, ...]:
        """1-based site indices occupied in basis state ``k``."""
        return tuple(i + 1 for i, n in enumerate(self.states[k]) if n)

    def state_label(self, k: int) -> str:
        """Compact label: 'vac', '3', '3+4', ..."""
        occ = self.occupied_sites(k)
        return "+".join(str(i) for i in occ) if occ else "vac"

    def states_containing(self, site: int) -> np.ndarray:
        """Indices of all basis states with an exciton at ``site`` (1-based)."""
        _check_site(self, site)
        return np.array(
            [k for k, s in enumerate(self.states) if s[site - 1]], dtype=np.intp
        )


def enumerate_basis(n_sites: int, n_max: int) -> FockBasis:
    """Enumerate all occupation states with Hamming weight <= n_max.

    The dimension is 1 + L for n_max = 1 and 1 + L + L(L-1)/2 for n_max = 2
    (pairs live on distinct sites by the hard-core rule).
    """
    if n_sites < 1:
        raise ValueError(f"n_sites must be >= 1, got {n_sites}")
    if n_max not in (1, 2):
        raise ValueError(f"n_max must be 1 or 2, got {n_max}")

    states: list[tuple[int, ...]] = []
    for n_particles in range(min(n_max, n_sites) + 1):
        for occupied in itertools.combinations(range(n_sites), n_particles):
            s = [0] * n_sites
            for i in occupied:
                s[i] = 1
            states.append(tuple(s))
    index_of = {s: k for k, s in enumerate(states)}
    return FockBasis(n_sites=n_sites, n_max=n_max, states=tuple(states), index_of=index_of)


def _check_site(basis: FockBasis, site: int) -> None:
    if not 1 <= site <= basis.n_sites:
        raise ValueError(f"site index {site} out of range 1..{basis.n_sites}")


def creation_op(basis: FockBasis, site: int) -> np.ndarray:
    """Matrix of e† at ``site`` (1-based).

    Maps each state with an empty ``site`` and fewer than ``n_max`` particles
    to the state with ``site`` additionally occupied, amplitude 1.  States
    already occupied there, or at the particle-number truncation, map to 0.
    """
    _check_site(basis, site)
    d = basis.dim
    op = np.zeros((d, d))
    for k, s in enumerate(basis.states):
        if s[site - 1] or sum(s) >= basis.n_max:
            continue
        target = list(s)
        target[site - 1] = 1
        op[basis.index_of[tuple(target)], k] = 1.0
    return op


def annihilation_op(basis: FockBasis, site: int) -> np.ndarray:
    """Matrix of e at ``site``; the elementwise adjoint of :func:`creation_op`."""
    return creation_op(basis, site).T.copy()


def number_op(basis: FockBasis, site: int) -> np.ndarray:
    """Diagonal occupation projector for ``site`` (1-based)."""
    _check_site(basis, site)
    diag = np.array([float(s[site - 1]) for s in basis.states])
    return np.diag(diag)


def total_number_op(basis: FockBasis) -> np.ndarray:
    """Diagonal total particle-number operator (entries 0, 1 or 2)."""
    diag = np.array([float(sum(s)) for s in basis.states])
    return np.diag(diag)
