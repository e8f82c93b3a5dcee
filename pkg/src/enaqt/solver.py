"""Steady-state solver and an independent time-propagation oracle.

The steady state is the kernel of the Liouvillian.  We append the unit-trace
constraint to the d^2 x d^2 system L x = 0 and solve the over-determined
system by least squares; the kernel vector solves it exactly, so the residual
of the returned state is at backward-error level.  The singular values of the
stacked system double as a uniqueness guard: a kernel of dimension >= 2 makes
the stacked matrix rank-deficient.

The oracle integrates the same master equation with classical fixed-step
fourth-order Runge-Kutta.  For a linear autonomous system one RK4 step equals
multiplication by P = sum_{k<=4} (h M)^k / k!, so the trajectory is advanced
by cached powers of P in chunks of 2^k steps; this is step-for-step identical
to naive stepping and keeps millions of steps cheap.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .lindblad import Dissipator, Liouvillian, build_liouvillian, unvec, vec

__all__ = [
    "SteadyStateError",
    "DegenerateSteadyStateError",
    "PositivityError",
    "SteadyState",
    "steady_state",
    "PropagationResult",
    "propagate",
]

# Relative singular-value ratio below which the kernel is declared degenerate,
# and below which a near-degeneracy warning is emitted.  Exact degeneracies
# (e.g. multiple dark states) land near machine epsilon relative; legitimate
# near-dark chains at weak disorder stay above ~1e-10.
DEGENERACY_RTOL = 1e-13
NEAR_DEGENERACY_RTOL = 1e-10

RESIDUAL_RTOL = 1e-10
EIGENVALUE_FLOOR = -1e-9


class SteadyStateError(RuntimeError):
    """Base class for steady-state solver failures."""


class DegenerateSteadyStateError(SteadyStateError):
    """The Liouvillian kernel is not one-dimensional at tolerance."""

    def __init__(self, msg: str, smallest_singular_values: tuple[float, float]):
        super().__init__(msg)
        self.smallest_singular_values = smallest_singular_values


class PositivityError(SteadyStateError):
    """The solved state has an eigenvalue below the clipping tolerance."""


@dataclass(frozen=True)
class SteadyState:
    """Solved steady state plus solver diagnostics.

    ``degeneracy_margin`` is the smallest singular value of the
    trace-augmented system relative to its largest; it vanishes exactly when
    the kernel is degenerate.
    """

    rho: np.ndarray = field(repr=False)
    residual: float
    degeneracy_margin: float
    smallest_singular_values: tuple[float, float]
    min_eigenvalue: float


def _trace_row(d: int) -> np.ndarray:
    row = np.zeros(d * d, dtype=complex)
    row[:: d + 1] = 1.0  # diagonal positions under column stacking
    return row


def steady_state(liou: Liouvillian) -> SteadyState:
    """Solve L vec(rho) = 0 with Tr rho = 1 and validate the result.

    Raises :class:`DegenerateSteadyStateError` when the kernel is not unique
    (e.g. a dark state decoupled from both source and drain), and
    :class:`PositivityError` when the state is negative beyond clipping
    tolerance.  Tiny negative eigenvalues in (-2e-9, -1e-9) are clipped to
    zero and the trace renormalized; anything lower is an error.
    """
    d = liou.dim
    stacked = np.vstack([liou.matrix, _trace_row(d)])
    rhs = np.zeros(d * d + 1, dtype=complex)
    rhs[-1] = 1.0
    x, _, _, svals = np.linalg.lstsq(stacked, rhs, rcond=None)

    margin = float(svals[-1] / svals[0])
    if margin < DEGENERACY_RTOL:
        raise DegenerateSteadyStateError(
            "steady state is not unique: trace-augmented system is rank-deficient "
            f"(two smallest singular values {svals[-1]:.3e}, {svals[-2]:.3e} "
            f"vs largest {svals[0]:.3e})",
            (float(svals[-1]), float(svals[-2])),
        )
    if margin < NEAR_DEGENERACY_RTOL:
        # static text so repeated emissions deduplicate; the margin itself is
        # reported on the returned SteadyState
        warnings.warn(
            "steady state nearly degenerate; result may be ill-conditioned",
            RuntimeWarning,
            stacklevel=2,
        )

    rho = unvec(x, d)
    rho = 0.5 * (rho + rho.conj().T)
    rho /= np.trace(rho).real

    eigs = np.linalg.eigvalsh(rho)
    min_eig = float(eigs[0])
    if min_eig < EIGENVALUE_FLOOR:
        if min_eig >= 2 * EIGENVALUE_FLOOR:
            rho = _clip_negative_eigenvalues(rho)
        else:
            raise PositivityError(
                f"steady state has eigenvalue {min_eig:.3e} below tolerance {EIGENVALUE_FLOOR:.0e}"
            )

    residual = float(np.max(np.abs(liou.matrix @ vec(rho))))
    bound = RESIDUAL_RTOL * max(1.0, liou.norm_inf)
    if residual > bound:
        raise SteadyStateError(
            f"steady-state residual {residual:.3e} exceeds bound {bound:.3e}"
        )
    return SteadyState(
        rho=rho,
        residual=residual,
        degeneracy_margin=margin,
        smallest_singular_values=(float(svals[-1]), float(svals[-2])),
        min_eigenvalue=min_eig,
    )


def _clip_negative_eigenvalues(rho: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(rho)
    vals = np.clip(vals, 0.0, None)
    rho = (vecs * vals) @ vecs.conj().T
    return rho / np.trace(rho).real


def liouvillian_smallest_singular_values(liou: Liouvillian, k: int = 2) -> np.ndarray:
    """The k smallest singular values of the Liouvillian itself (ascending).

    Full SVD; meant for diagnostics and tests, not for the sweep hot path
    where the stacked-system margin from :func:`steady_state` stands in.
    """
    svals = np.linalg.svd(liou.matrix, compute_uv=False)
    return svals[::-1][:k]


@dataclass(frozen=True)
class PropagationResult:
    """Final state of a fixed-step integration run."""

    rho: np.ndarray = field(repr=False)
    converged: bool
    residual: float
    t_final: float
    dt: float
    steps: int


_MAX_CHUNK_LOG2 = 13  # advance at most 8192 steps between residual checks
_DT_HALVING_LIMIT = 8
_DT_AGREEMENT_ATOL = 1e-8


def _rk4_transfer_matrix(M: np.ndarray, h: float) -> np.ndarray:
    """One-step propagator of classical RK4 for dv/dt = M v."""
    hM = h * M
    P = np.eye(M.shape[0], dtype=complex)
    term = np.eye(M.shape[0], dtype=complex)
    for k in (1, 2, 3, 4):
        term = term @ hM / k
        P = P + term
    return P


def _run_fixed(M: np.ndarray, v0: np.ndarray, h: float, max_steps: int,
               tol: float) -> tuple[np.ndarray, int, float]:
    """Advance v0 by up to max_steps RK4 steps, stopping once |dv/dt|_inf < tol.

    Returns (v, steps_taken, final_residual).  Progress happens in
    power-of-two chunks of cached transfer-matrix powers, so the trajectory
    is identical to stepping one step at a time; only the stopping point is
    quantized to chunk boundaries.
    """
    v = v0.copy()
    residual = float(np.max(np.abs(M @ v)))
    if residual < tol:
        return v, 0, residual
    powers = {0: _rk4_transfer_matrix(M, h)}
    steps = 0
    while steps < max_steps:
        remaining = max_steps - steps
        k = min(_MAX_CHUNK_LOG2, remaining.bit_length() - 1)
        while k not in powers:
            j = max(p for p in powers if p < k) + 1
            powers[j] = powers[j - 1] @ powers[j - 1]
        v = powers[k] @ v
        steps += 1 << k
        residual = float(np.max(np.abs(M @ v)))
        if residual < tol:
            break
    return v, steps, residual


def propagate(H: np.ndarray, dissipators: list[Dissipator],
              rho0: np.ndarray | None = None, dt: float | None = None,
              t_max: float | None = None, tol: float = 1e-9) -> PropagationResult:
    """Integrate the master equation until |drho/dt|_inf < tol or t_max.

    With ``dt=None`` the step starts at 0.1/(|H|_inf + sum of rates) and is
    halved until two runs at dt and dt/2 agree elementwise to 1e-8 at the
    same final time.  Reaching t_max without convergence returns a result
    with ``converged=False`` carrying the residual, not an exception.
    """
    d = H.shape[0]
    if rho0 is None:
        rho0 = np.zeros((d, d), dtype=complex)
        rho0[0, 0] = 1.0  # vacuum projector
    M = build_liouvillian(H, dissipators).matrix
    total_rate = sum(dis.rate for dis in dissipators)
    if t_max is None:
        positive = [dis.rate for dis in dissipators if dis.rate > 0]
        if not positive:
            raise ValueError("t_max is required when all dissipation rates are zero")
        t_max = 2000.0 / min(positive)

    h_norm = float(np.max(np.sum(np.abs(H), axis=1)))
    h = dt if dt is not None else 0.1 / (h_norm + total_rate)
    v0 = vec(rho0)

    if dt is not None:
        steps_cap = max(1, int(np.ceil(t_max / h)))
        v, steps, residual = _run_fixed(M, v0, h, steps_cap, tol)
        return PropagationResult(unvec(v, d), residual < tol, residual, steps * h, h, steps)

    for _ in range(_DT_HALVING_LIMIT):
        steps_cap = max(1, int(np.ceil(t_max / h)))
        v_a, steps_a, residual_a = _run_fixed(M, v0, h, steps_cap, tol)
        if steps_a == 0:
            return PropagationResult(unvec(v_a, d), True, residual_a, 0.0, h, 0)
        # re-run at half the step to exactly the same final time
        v_b, _, residual_b = _run_fixed(M, v0, h / 2, 2 * steps_a, tol=0.0)
        if float(np.max(np.abs(v_a - v_b))) <= _DT_AGREEMENT_ATOL:
            # accept the finer trajectory; let it finish converging if the
            # coarse run stopped marginally under tol
            steps_b = 2 * steps_a
            budget = max(0, int(np.ceil(t_max / (h / 2))) - steps_b)
            if residual_b >= tol and budget > 0:
                v_b, extra, residual_b = _run_fixed(M, v_b, h / 2, budget, tol)
                steps_b += extra
            return PropagationResult(
                unvec(v_b, d), residual_b < tol, residual_b,
                steps_b * (h / 2), h / 2, steps_b,
            )
        h /= 2
    raise ArithmeticError(
        f"step-halving did not reach {_DT_AGREEMENT_ATOL:g} agreement after "
        f"{_DT_HALVING_LIMIT} halvings (last dt={h:g})"
    )
