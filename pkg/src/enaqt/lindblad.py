"""Lindblad dissipators and the Liouvillian superoperator.

The master equation is drho/dt = -i[H, rho] + sum_k (V_k rho V_k+ - 1/2 {V_k+ V_k, rho})
with jump operators

    dephasing   V_i   = sqrt(gamma_deph) n_i     (one per site)
    injection   V_inj = sqrt(gamma_inj) e+_{i_inj}
    extraction  V_ext = sqrt(gamma_ext) e_{i_ext}

Density matrices are vectorized by column stacking: vec(rho) = rho.reshape(-1,
order="F"), under which vec(A X B) = (B.T kron A) vec(X).  This convention is
fixed here and assumed by everything downstream.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import fock
from .fock import FockBasis
from .model import ChainSpec

__all__ = [
    "DEPHASE",
    "INJECT",
    "EXTRACT",
    "Dissipator",
    "Liouvillian",
    "build_dissipators",
    "build_liouvillian",
    "hamiltonian_superoperator",
    "dissipator_superoperator",
    "apply_dissipators",
    "lindblad_rhs",
    "vec",
    "unvec",
]

DEPHASE = "dephase"
INJECT = "inject"
EXTRACT = "extract"


@dataclass(frozen=True)
class Dissipator:
    """A single jump channel: kind, acting site (1-based), rate, and V matrix."""

    kind: str
    site: int
    rate: float
    V: np.ndarray = field(repr=False)


def build_dissipators(spec: ChainSpec, basis: FockBasis) -> list[Dissipator]:
    """One dephasing channel per site plus the injection and extraction channels.

    Always returns L + 2 dissipators; zero rates give zero jump matrices.
    """
    if (basis.n_sites, basis.n_max) != (spec.L, spec.n_max):
        raise ValueError("basis does not match spec (L or n_max differ)")
    out = []
    for i in range(1, spec.L + 1):
        out.append(
            Dissipator(DEPHASE, i, spec.gamma_deph,
                       np.sqrt(spec.gamma_deph) * fock.number_op(basis, i))
        )
    out.append(
        Dissipator(INJECT, spec.i_inj, spec.gamma_inj,
                   np.sqrt(spec.gamma_inj) * fock.creation_op(basis, spec.i_inj))
    )
    out.append(
        Dissipator(EXTRACT, spec.i_ext, spec.gamma_ext,
                   np.sqrt(spec.gamma_ext) * fock.annihilation_op(basis, spec.i_ext))
    )
    return out


@dataclass(frozen=True)
class Liouvillian:
    """Dense d^2 x d^2 generator acting on column-stacked density matrices."""

    dim: int
    matrix: np.ndarray = field(repr=False)

    @property
    def norm_inf(self) -> float:
        """Maximum absolute row sum of the superoperator matrix."""
        return float(np.max(np.sum(np.abs(self.matrix), axis=1)))


def vec(rho: np.ndarray) -> np.ndarray:
    """Column-stack a d x d matrix into a length-d^2 vector."""
    return np.asarray(rho).reshape(-1, order="F")


def unvec(v: np.ndarray, dim: int | None = None) -> np.ndarray:
    """Inverse of :func:`vec`."""
    v = np.asarray(v)
    if dim is None:
        dim = round(np.sqrt(v.size))
    if dim * dim != v.size:
        raise ValueError(f"vector of length {v.size} is not a stacked square matrix")
    return v.reshape((dim, dim), order="F")


def hamiltonian_superoperator(H: np.ndarray) -> np.ndarray:
    """Superoperator of the coherent part -i[H, .]."""
    d = H.shape[0]
    eye = np.eye(d)
    return -1j * (np.kron(eye, H) - np.kron(H.T, eye))


def dissipator_superoperator(dissipators: list[Dissipator], dim: int) -> np.ndarray:
    """Superoperator of sum_k (V_k . V_k+ - 1/2 {V_k+ V_k, .})."""
    eye = np.eye(dim)
    out = np.zeros((dim * dim, dim * dim), dtype=complex)
    for dis in dissipators:
        V = dis.V
        if V.shape != (dim, dim):
            raise ValueError(f"jump matrix shape {V.shape} does not match dim {dim}")
        if dis.rate == 0.0:
            continue
        VdV = V.conj().T @ V
        out += np.kron(V.conj(), V)
        out -= 0.5 * (np.kron(eye, VdV) + np.kron(VdV.T, eye))
    return out


def build_liouvillian(H: np.ndarray, dissipators: list[Dissipator]) -> Liouvillian:
    """Assemble the full generator -i[H, .] + dissipators as a dense matrix."""
    d = H.shape[0]
    if H.shape != (d, d):
        raise ValueError(f"H must be square, got shape {H.shape}")
    matrix = hamiltonian_superoperator(H) + dissipator_superoperator(dissipators, d)
    return Liouvillian(dim=d, matrix=matrix)


def apply_dissipators(dissipators: list[Dissipator], rho: np.ndarray) -> np.ndarray:
    """Apply a subset of jump channels directly in matrix form.

    Returns sum_k (V_k rho V_k+ - 1/2 {V_k+ V_k, rho}) without any
    vectorization round trip; used for the extraction-only current formula.
    """
    d = rho.shape[0]
    out = np.zeros((d, d), dtype=complex)
    for dis in dissipators:
        V = dis.V
        if V.shape != (d, d):
            raise ValueError(f"jump matrix shape {V.shape} does not match rho {rho.shape}")
        VdV = V.conj().T @ V
        out += V @ rho @ V.conj().T - 0.5 * (VdV @ rho + rho @ VdV)
    return out


def lindblad_rhs(H: np.ndarray, dissipators: list[Dissipator], rho: np.ndarray) -> np.ndarray:
    """Full right-hand side -i[H, rho] + dissipators, in matrix form."""
    return -1j * (H @ rho - rho @ H) + apply_dissipators(dissipators, rho)
