"""Disorder-averaged parameter sweeps, deterministic under any parallelism.

Each (grid point, realization) work item is a pure function of the sweep
spec and master seed: the disorder draw is keyed by the flat realization
counter ``point_index * realizations + r``.  Workers fill preallocated
per-realization arrays by index and the reduction always runs in canonical
order, so results are bit-identical for any worker count.
"""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import __version__, lindblad, model, observables, solver
from .model import ChainSpec

__all__ = [
    "SweepAxis",
    "SweepSpec",
    "PointStats",
    "SweepResult",
    "run_sweep",
    "apply_axis_value",
    "AXIS_PARAMS",
]


def _set_barrier_height(spec: ChainSpec, height: float) -> ChainSpec:
    if spec.barrier is None:
        raise ValueError("barrier_height axis requires a base spec with a barrier site")
    return replace(spec, barrier=(spec.barrier[0], height))


AXIS_PARAMS = {
    "gamma_deph": lambda s, v: replace(s, gamma_deph=float(v)),
    "gamma_inj": lambda s, v: replace(s, gamma_inj=float(v)),
    "gamma_ext": lambda s, v: replace(s, gamma_ext=float(v)),
    "W": lambda s, v: replace(s, W=float(v)),
    "W_over_t": lambda s, v: replace(s, W=float(v) * s.t),
    "U": lambda s, v: replace(s, U=float(v)),
    "U_over_t": lambda s, v: replace(s, U=float(v) * s.t),
    "i_ext": lambda s, v: replace(s, i_ext=int(v)),
    "i_inj": lambda s, v: replace(s, i_inj=int(v)),
    "barrier_height": _set_barrier_height,
    "barrier_height_over_t": lambda s, v: _set_barrier_height(s, float(v) * s.t),
}


def apply_axis_value(spec: ChainSpec, param: str, value: float) -> ChainSpec:
    try:
        setter = AXIS_PARAMS[param]
    except KeyError:
        raise ValueError(
            f"unknown sweep parameter {param!r}; known: {sorted(AXIS_PARAMS)}"
        ) from None
    return setter(spec, value)


@dataclass(frozen=True)
class SweepAxis:
    """A named parameter with a strictly monotone, non-empty grid."""

    param: str
    values: tuple[float, ...]

    def __post_init__(self):
        if self.param not in AXIS_PARAMS:
            raise ValueError(f"unknown sweep parameter {self.param!r}")
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if not vals:
            raise ValueError("axis grid must be non-empty")
        diffs = np.diff(vals)
        if len(vals) > 1 and not (np.all(diffs > 0) or np.all(diffs < 0)):
            raise ValueError(f"axis grid for {self.param!r} must be strictly monotone")


@dataclass(frozen=True)
class SweepSpec:
    """A disorder-averaged sweep over one or two parameters."""

    base: ChainSpec
    axis1: SweepAxis
    axis2: SweepAxis | None = None
    realizations: int = 1
    master_seed: int = 0

    def __post_init__(self):
        if self.realizations < 1:
            raise ValueError("realizations must be >= 1")

    def points(self) -> list[tuple[float, float | None]]:
        """Flat (axis1 value, axis2 value) grid, axis2 fastest."""
        if self.axis2 is None:
            return [(v1, None) for v1 in self.axis1.values]
        return [(v1, v2) for v1 in self.axis1.values for v2 in self.axis2.values]

    def point_spec(self, v1: float, v2: float | None) -> ChainSpec:
        spec = apply_axis_value(self.base, self.axis1.param, v1)
        if self.axis2 is not None:
            spec = apply_axis_value(spec, self.axis2.param, v2)
        return spec


@dataclass(frozen=True)
class PointStats:
    """Aggregated observables at one grid point (means and standard errors)."""

    axis1_value: float
    axis2_value: float | None
    realizations: int
    failures: int
    J_mean: float
    J_stderr: float
    N_total_mean: float
    N_total_stderr: float
    delta_n_mean: float
    delta_n_stderr: float
    ipr_mean: float
    ipr_stderr: float
    populations_mean: np.ndarray = field(repr=False)
    populations_stderr: np.ndarray = field(repr=False)
    state_diagonal_mean: np.ndarray = field(repr=False)
    state_diagonal_stderr: np.ndarray = field(repr=False)
    eigen_populations_mean: np.ndarray | None = field(default=None, repr=False)
    eigen_populations_stderr: np.ndarray | None = field(default=None, repr=False)

    @property
    def failed(self) -> bool:
        """A point fails when more than 1% of its realizations failed."""
        return self.failures > 0.01 * self.realizations


@dataclass(frozen=True)
class SweepResult:
    """All point statistics plus reproducibility metadata."""

    spec: SweepSpec
    points: tuple[PointStats, ...]
    master_seed: int
    spec_hash: str
    code_version: str

    @property
    def failed_points(self) -> list[PointStats]:
        return [p for p in self.points if p.failed]

    def scalar(self, name: str) -> np.ndarray:
        """Flat array of one PointStats field across the grid."""
        return np.array([getattr(p, name) for p in self.points])


def chain_spec_to_dict(spec: ChainSpec) -> dict:
    return {
        "L": spec.L,
        "eps0": spec.eps0,
        "t": spec.t,
        "W": spec.W,
        "hopping": spec.hopping,
        "U": spec.U,
        "barrier": None if spec.barrier is None
        else {"site": spec.barrier[0], "height": spec.barrier[1]},
        "gamma_inj": spec.gamma_inj,
        "gamma_ext": spec.gamma_ext,
        "gamma_deph": spec.gamma_deph,
        "i_inj": spec.i_inj,
        "i_ext": spec.i_ext,
        "n_max": spec.n_max,
    }


def sweep_spec_to_dict(spec: SweepSpec) -> dict:
    out = {
        "chain": chain_spec_to_dict(spec.base),
        "axis1": {"param": spec.axis1.param, "values": list(spec.axis1.values)},
        "realizations": spec.realizations,
        "master_seed": spec.master_seed,
    }
    if spec.axis2 is not None:
        out["axis2"] = {"param": spec.axis2.param, "values": list(spec.axis2.values)}
    return out


def spec_hash(spec: SweepSpec) -> str:
    payload = json.dumps(sweep_spec_to_dict(spec), sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def _run_chunk(args):
    """Worker: realizations [r0, r1) of one grid point.

    Returns per-realization observable arrays; NaN rows mark solver failures.
    """
    point_spec, master_seed, realizations, point_index, r0, r1 = args
    basis = point_spec.basis()
    L, d = point_spec.L, basis.dim
    dissipators = lindblad.build_dissipators(point_spec, basis)
    diss_super = lindblad.dissipator_superoperator(dissipators, d)

    n = r1 - r0
    scalars = np.full((n, 4), np.nan)  # J, N_total, delta_n, ipr
    pops = np.full((n, L), np.nan)
    diag = np.full((n, d), np.nan)
    eigp = np.full((n, L), np.nan) if point_spec.n_max == 1 else None
    ok = np.zeros(n, dtype=bool)

    for k, r in enumerate(range(r0, r1)):
        counter = point_index * realizations + r
        real = model.sample_disorder(point_spec, master_seed, counter)
        H = model.build_hamiltonian(point_spec, real, basis)
        liou = lindblad.Liouvillian(
            dim=d, matrix=lindblad.hamiltonian_superoperator(H) + diss_super
        )
        eig = model.eigen_decompose(point_spec, real)
        try:
            ss = solver.steady_state(liou)
        except solver.SteadyStateError:
            continue
        obs = observables.compute_observables(ss.rho, basis, dissipators, eig)
        scalars[k] = (obs.current, obs.total_number, obs.delta_n, model.ipr(eig))
        pops[k] = obs.populations
        diag[k] = obs.state_diagonal
        if eigp is not None:
            eigp[k] = obs.eigen_populations
        ok[k] = True

    return point_index, r0, scalars, pops, diag, eigp, ok


def _mean_stderr(arr: np.ndarray, ok: np.ndarray):
    """Mean and standard error over successful realizations (stderr 0 for n<=1)."""
    good = arr[ok]
    n = good.shape[0]
    if n == 0:
        shape = good.shape[1:] if good.ndim > 1 else ()
        return np.full(shape, np.nan), np.full(shape, np.nan)
    mean = good.mean(axis=0)
    if n == 1:
        return mean, np.zeros_like(mean)
    stderr = good.std(axis=0, ddof=1) / np.sqrt(n)
    return mean, stderr


def run_sweep(spec: SweepSpec, jobs: int = 1) -> SweepResult:
    """Execute the sweep; the result is a pure function of (spec, master_seed).

    ``jobs`` only controls how many worker processes run the independent
    (point, realization) items; it cannot change any output bit.
    """
    points = spec.points()
    R = spec.realizations
    n_points = len(points)
    L = spec.base.L
    d = spec.base.basis().dim
    want_eigen = spec.base.n_max == 1

    chunk = max(1, min(500, R))
    tasks = []
    for p_idx, (v1, v2) in enumerate(points):
        p_spec = spec.point_spec(v1, v2)
        for r0 in range(0, R, chunk):
            tasks.append((p_spec, spec.master_seed, R, p_idx, r0, min(r0 + chunk, R)))

    scalars = np.full((n_points, R, 4), np.nan)
    pops = np.full((n_points, R, L), np.nan)
    diag = np.full((n_points, R, d), np.nan)
    eigp = np.full((n_points, R, L), np.nan) if want_eigen else None
    ok = np.zeros((n_points, R), dtype=bool)

    def _store(res):
        p_idx, r0, sc, pp, dg, ep, okk = res
        n = sc.shape[0]
        scalars[p_idx, r0 : r0 + n] = sc
        pops[p_idx, r0 : r0 + n] = pp
        diag[p_idx, r0 : r0 + n] = dg
        if eigp is not None and ep is not None:
            eigp[p_idx, r0 : r0 + n] = ep
        ok[p_idx, r0 : r0 + n] = okk

    if jobs <= 1:
        for task in tasks:
            _store(_run_chunk(task))
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for res in pool.map(_run_chunk, tasks):
                _store(res)

    stats = []
    for p_idx, (v1, v2) in enumerate(points):
        okp = ok[p_idx]
        sc_mean, sc_err = _mean_stderr(scalars[p_idx], okp)
        pop_mean, pop_err = _mean_stderr(pops[p_idx], okp)
        dg_mean, dg_err = _mean_stderr(diag[p_idx], okp)
        ep_mean = ep_err = None
        if eigp is not None:
            ep_mean, ep_err = _mean_stderr(eigp[p_idx], okp)
        stats.append(PointStats(
            axis1_value=v1,
            axis2_value=v2,
            realizations=R,
            failures=int(R - okp.sum()),
            J_mean=float(sc_mean[0]), J_stderr=float(sc_err[0]),
            N_total_mean=float(sc_mean[1]), N_total_stderr=float(sc_err[1]),
            delta_n_mean=float(sc_mean[2]), delta_n_stderr=float(sc_err[2]),
            ipr_mean=float(sc_mean[3]), ipr_stderr=float(sc_err[3]),
            populations_mean=pop_mean, populations_stderr=pop_err,
            state_diagonal_mean=dg_mean, state_diagonal_stderr=dg_err,
            eigen_populations_mean=ep_mean, eigen_populations_stderr=ep_err,
        ))

    return SweepResult(
        spec=spec,
        points=tuple(stats),
        master_seed=spec.master_seed,
        spec_hash=spec_hash(spec),
        code_version=__version__,
    )
