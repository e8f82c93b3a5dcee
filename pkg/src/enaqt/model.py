"""Chain Hamiltonians, disorder sampling, and single-particle eigenstructure.

Energies and rates are in s^-1 throughout (hbar = 1).  The Hamiltonian is

    H = sum_i eps_i n_i - sum_{i<j} t_ij (e+_i e_j + e+_j e_i) + U sum_i n_i n_{i+1}

with eps_i = eps0 + xi_i (+ barrier offset at one site), xi_i uniform on
[-W/2, W/2], and t_ij either nearest-neighbor (t on the super/sub-diagonal)
or long-range t/|i-j|.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import fock
from .fock import FockBasis

__all__ = [
    "NEAREST_NEIGHBOR",
    "LONG_RANGE",
    "ChainSpec",
    "DisorderRealization",
    "EigenStructure",
    "sample_disorder",
    "hopping_matrix",
    "single_particle_hamiltonian",
    "build_hamiltonian",
    "eigen_decompose",
    "ipr",
]

NEAREST_NEIGHBOR = "nearest_neighbor"
LONG_RANGE = "long_range"
_HOPPING_KINDS = (NEAREST_NEIGHBOR, LONG_RANGE)

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class ChainSpec:
    """Full physical description of an open chain.

    ``barrier`` is an optional ``(site, height)`` pair adding ``height`` to
    the on-site energy of ``site``.  Defaults reproduce the seven-site
    reference chain driven at site 1 and drained at site 6.
    """

    L: int = 7
    eps0: float = 43000.0
    t: float = 145.0
    W: float = 0.0
    hopping: str = NEAREST_NEIGHBOR
    U: float = 0.0
    barrier: tuple[int, float] | None = None
    gamma_inj: float = 17.0
    gamma_ext: float = 17.0
    gamma_deph: float = 0.0
    i_inj: int = 1
    i_ext: int = 6
    n_max: int = 1

    def __post_init__(self):
        if self.L < 1:
            raise ValueError(f"L must be >= 1, got {self.L}")
        if self.n_max not in (1, 2):
            raise ValueError(f"n_max must be 1 or 2, got {self.n_max}")
        if self.hopping not in _HOPPING_KINDS:
            raise ValueError(f"unknown hopping kind {self.hopping!r}")
        if self.W < 0:
            raise ValueError("disorder strength W must be >= 0")
        for name in ("gamma_inj", "gamma_ext", "gamma_deph"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        for name in ("i_inj", "i_ext"):
            site = getattr(self, name)
            if not 1 <= site <= self.L:
                raise ValueError(f"{name}={site} out of range 1..{self.L}")
        if self.barrier is not None:
            site, height = self.barrier
            if not 1 <= site <= self.L:
                raise ValueError(f"barrier site {site} out of range 1..{self.L}")
            object.__setattr__(self, "barrier", (int(site), float(height)))

    @property
    def eta(self) -> float:
        """Injection-to-extraction rate ratio."""
        return self.gamma_inj / self.gamma_ext

    def basis(self) -> FockBasis:
        return fock.enumerate_basis(self.L, self.n_max)


@dataclass(frozen=True)
class DisorderRealization:
    """One draw of the random on-site energies.

    ``seed`` is the 64-bit key actually fed to the counter-based generator;
    it is derived deterministically from (master seed, realization index),
    so identical pairs reproduce identical draws in any execution order.
    """

    seed: int
    xi: np.ndarray = field(repr=False)


def _splitmix64(x: int) -> int:
    """One splitmix64 finalizer round; bijective on 64-bit ints."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def realization_seed(master_seed: int, realization_index: int) -> int:
    """Derive the per-realization 64-bit generator key."""
    return _splitmix64(_splitmix64(master_seed & _MASK64) ^ (realization_index & _MASK64))


def sample_disorder(spec: ChainSpec, master_seed: int, realization_index: int) -> DisorderRealization:
    """Draw L independent on-site energies uniform on [-W/2, W/2].

    Uses a counter-based generator keyed per realization, so the draw is a
    pure function of (master_seed, realization_index) regardless of how many
    workers run or in which order.
    """
    seed = realization_seed(master_seed, realization_index)
    rng = np.random.Generator(np.random.Philox(key=seed))
    xi = spec.W * (rng.random(spec.L) - 0.5)
    return DisorderRealization(seed=seed, xi=xi)


def zero_disorder(spec: ChainSpec) -> DisorderRealization:
    """The W = 0 realization (all on-site energies at eps0)."""
    return DisorderRealization(seed=0, xi=np.zeros(spec.L))


def hopping_matrix(spec: ChainSpec) -> np.ndarray:
    """Symmetric L x L matrix of hopping amplitudes t_ij (diagonal zero)."""
    L = spec.L
    tmat = np.zeros((L, L))
    if spec.hopping == NEAREST_NEIGHBOR:
        for i in range(L - 1):
            tmat[i, i + 1] = tmat[i + 1, i] = spec.t
    else:
        for i in range(L):
            for j in range(i + 1, L):
                tmat[i, j] = tmat[j, i] = spec.t / (j - i)
    return tmat


def onsite_energies(spec: ChainSpec, real: DisorderRealization) -> np.ndarray:
    """eps0 + disorder + barrier offset, per site."""
    if real.xi.shape != (spec.L,):
        raise ValueError(
            f"disorder realization has {real.xi.shape[0]} sites, spec has {spec.L}"
        )
    eps = spec.eps0 + np.asarray(real.xi, dtype=float)
    if spec.barrier is not None:
        site, height = spec.barrier
        eps = eps.copy()
        eps[site - 1] += height
    return eps


def single_particle_hamiltonian(spec: ChainSpec, real: DisorderRealization) -> np.ndarray:
    """L x L matrix with on-site energies on the diagonal and -t_ij off it."""
    h = -hopping_matrix(spec)
    h[np.diag_indices(spec.L)] = onsite_energies(spec, real)
    return h


@lru_cache(maxsize=8)
def _site_operators(L: int, n_max: int):
    """Dense ladder/number matrices for the canonical basis, cached per (L, n_max)."""
    basis = fock.enumerate_basis(L, n_max)
    create = [fock.creation_op(basis, i) for i in range(1, L + 1)]
    annihilate = [m.T.copy() for m in create]
    number = [fock.number_op(basis, i) for i in range(1, L + 1)]
    return create, annihilate, number


def build_hamiltonian(spec: ChainSpec, real: DisorderRealization, basis: FockBasis) -> np.ndarray:
    """Assemble the full Hamiltonian over ``basis`` from ladder operators.

    Real symmetric by construction.  The interaction counts each bond once:
    U is the full energy penalty of one adjacent pair.
    """
    if (basis.n_sites, basis.n_max) != (spec.L, spec.n_max):
        raise ValueError(
            f"basis (L={basis.n_sites}, n_max={basis.n_max}) does not match "
            f"spec (L={spec.L}, n_max={spec.n_max})"
        )
    create, annihilate, number = _site_operators(spec.L, spec.n_max)
    eps = onsite_energies(spec, real)
    tmat = hopping_matrix(spec)

    H = np.zeros((basis.dim, basis.dim))
    for i in range(spec.L):
        H += eps[i] * number[i]
    for i in range(spec.L):
        for j in range(i + 1, spec.L):
            if tmat[i, j] != 0.0:
                hop = create[i] @ annihilate[j]
                H -= tmat[i, j] * (hop + hop.T)
    if spec.U != 0.0:
        for i in range(spec.L - 1):
            H += spec.U * (number[i] @ number[i + 1])
    return H


@dataclass(frozen=True)
class EigenStructure:
    """Eigen-decomposition of the single-particle Hamiltonian.

    ``values`` ascending; ``vectors[:, n]`` is the n-th orthonormal
    eigenvector psi_n(i) over sites.
    """

    values: np.ndarray
    vectors: np.ndarray


def eigen_decompose(spec: ChainSpec, real: DisorderRealization) -> EigenStructure:
    """Eigenvalues/eigenvectors of the L x L single-particle matrix."""
    h = single_particle_hamiltonian(spec, real)
    try:
        values, vectors = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(
            f"eigensolver failed for L={spec.L}, W={spec.W}, hopping={spec.hopping}: {exc}"
        ) from exc
    return EigenStructure(values=values, vectors=vectors)


def ipr(eig: EigenStructure) -> float:
    """Inverse participation ratio (sum_{n,i} |psi_n(i)|^4)^-1."""
    return 1.0 / float(np.sum(np.abs(eig.vectors) ** 4))
