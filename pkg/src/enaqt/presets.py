"""Named experiment presets.

Every preset derives from the seven-site reference chain (eps0 = 43000 s^-1,
t = 145 s^-1, gamma_inj = gamma_ext = 17 s^-1, injection at site 1,
extraction at site 6) and varies one or two parameters.  Dephasing grids are
logarithmic because the interesting range spans five decades; 1e-2 s^-1
stands in for the near-zero quantum regime where exact zero dephasing would
leave a node-site chain stuck in a dark state.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .ensemble import SweepAxis, SweepSpec
from .model import ChainSpec, LONG_RANGE

__all__ = ["PresetJob", "preset_names", "preset_description",
           "default_realizations", "build_preset"]

BASE = ChainSpec()  # L=7, eps0=43000, t=145, gammas 17/17/0, inject 1, extract 6

GAMMA_DEPH_GRID = tuple(np.geomspace(1e-2, 1e3, 31))
GAMMA_DEPH_GRID_FINE = tuple(np.geomspace(1e-2, 1e3, 40))
W_OVER_T_GRID = tuple(np.geomspace(0.05, 20.0, 25))
W_OVER_T_STEPS = (0.0, 0.5, 1.0, 2.5, 10.0, 20.0)
LOW_DEPHASING = (0.0, 0.05, 0.2, 1.0, 5.0)


@dataclass(frozen=True)
class PresetJob:
    """One sweep belonging to a preset; output files are named after it."""

    name: str
    description: str
    sweep: SweepSpec


def _job(name, description, base, axis1, axis2=None, realizations=1, master_seed=0):
    return PresetJob(name, description, SweepSpec(
        base=base, axis1=axis1, axis2=axis2,
        realizations=realizations, master_seed=master_seed,
    ))


def _fig2(R, seed):
    jobs = []
    for i_ext in (6, 5):
        jobs.append(_job(
            f"drain{i_ext}",
            f"current vs disorder at low dephasing rates, drain at site {i_ext}",
            replace(BASE, i_ext=i_ext),
            SweepAxis("W_over_t", W_OVER_T_GRID),
            SweepAxis("gamma_deph", LOW_DEPHASING),
            R, seed,
        ))
    return jobs


def _fig3(R, seed):
    return [_job(
        "current",
        "current vs dephasing rate for several disorder strengths "
        "(ipr column holds the localization measure)",
        BASE,
        SweepAxis("gamma_deph", GAMMA_DEPH_GRID),
        SweepAxis("W_over_t", W_OVER_T_STEPS),
        R, seed,
    )]


def _fig4(R, seed):
    return [
        _job(
            "profiles",
            "site-population profiles in the quantum, uniformized and "
            "gradient regimes, for three disorder strengths",
            BASE,
            SweepAxis("gamma_deph", (1e-2, 30.0, 55.0, 98.0, 1000.0)),
            SweepAxis("W_over_t", (0.0, 1.0, 4.0)),
            R, seed,
        ),
        _job(
            "spread",
            "current and population spread vs dephasing, ordered and disordered",
            BASE,
            SweepAxis("gamma_deph", GAMMA_DEPH_GRID_FINE),
            SweepAxis("W_over_t", (0.0, 4.0)),
            R, seed,
        ),
    ]


def _fig5(R, seed):
    return [_job(
        "interactions",
        "two-exciton current vs dephasing for several repulsion strengths",
        replace(BASE, n_max=2),
        SweepAxis("gamma_deph", GAMMA_DEPH_GRID),
        SweepAxis("U_over_t", (0.0, 10.0, 20.0, 30.0)),
        R, seed,
    )]


def _appB(R, seed):
    low = replace(BASE, gamma_inj=0.17)  # eta = 0.01, low-population regime
    return [
        _job(
            "current_vs_disorder",
            "low-injection control: current vs disorder at low dephasing",
            low,
            SweepAxis("W_over_t", W_OVER_T_GRID),
            SweepAxis("gamma_deph", LOW_DEPHASING),
            R, seed,
        ),
        _job(
            "current_vs_dephasing",
            "low-injection control: current vs dephasing for several disorder strengths",
            low,
            SweepAxis("gamma_deph", GAMMA_DEPH_GRID),
            SweepAxis("W_over_t", W_OVER_T_STEPS),
            R, seed,
        ),
    ]


def _appC(R, seed):
    jobs = [_job(
        "drain_position",
        "current vs disorder without dephasing, drain moved along the chain",
        BASE,
        SweepAxis("W_over_t", W_OVER_T_GRID),
        SweepAxis("i_ext", (4, 5, 6, 7)),
        R, seed,
    )]
    for i_ext in (5, 6):
        jobs.append(_job(
            f"profiles_drain{i_ext}",
            f"real- and eigen-space populations vs disorder, drain at site {i_ext}",
            replace(BASE, i_ext=i_ext),
            SweepAxis("W_over_t", (0.0, 1.0, 5.0, 20.0)),
            None,
            R, seed,
        ))
    return jobs


def _appD(R, seed):
    lr = replace(BASE, hopping=LONG_RANGE)
    return [
        _job(
            "current_vs_disorder",
            "long-range hopping: current vs disorder without dephasing",
            lr,
            SweepAxis("W_over_t", W_OVER_T_GRID),
            None,
            R, seed,
        ),
        _job(
            "current_vs_dephasing",
            "long-range hopping: current vs dephasing for several disorder strengths",
            lr,
            SweepAxis("gamma_deph", GAMMA_DEPH_GRID),
            SweepAxis("W_over_t", W_OVER_T_STEPS),
            R, seed,
        ),
        _job(
            "spread",
            "long-range hopping: current and population spread vs dephasing",
            lr,
            SweepAxis("gamma_deph", GAMMA_DEPH_GRID_FINE),
            SweepAxis("W_over_t", (0.0, 4.0)),
            R, seed,
        ),
    ]


# Barrier / interacting-analogy chain: t = 144 s^-1, eps0 = 300 t, penalty 50 t.
_BARRIER_T = 144.0
_BARRIER_BASE = replace(
    BASE, t=_BARRIER_T, eps0=300.0 * _BARRIER_T, barrier=(4, 50.0 * _BARRIER_T)
)


def _appE(R, seed):
    return [_job(
        "barrier_vs_uniform",
        "current and site densities vs dephasing, with and without an "
        "on-site energy barrier at site 4",
        _BARRIER_BASE,
        SweepAxis("gamma_deph", GAMMA_DEPH_GRID),
        SweepAxis("barrier_height_over_t", (0.0, 50.0)),
        R, seed,
    )]


def _appF(R, seed):
    interacting = replace(
        BASE, n_max=2, t=_BARRIER_T, eps0=300.0 * _BARRIER_T, U=50.0 * _BARRIER_T
    )
    return [_job(
        "state_occupations",
        "diagonal of the two-exciton steady state at three dephasing rates",
        interacting,
        SweepAxis("gamma_deph", (1e-2, 47.0, 500.0)),
        None,
        R, seed,
    )]


_REGISTRY = {
    "fig2": (_fig2, 5000, "current vs disorder strength at low dephasing, drains 6 and 5"),
    "fig3": (_fig3, 1000, "current vs dephasing across disorder strengths, plus ipr"),
    "fig4": (_fig4, 2000, "population profiles and spread parameter vs dephasing"),
    "fig5": (_fig5, 1, "two-exciton transport vs dephasing for increasing repulsion"),
    "appB": (_appB, 1000, "low-injection (eta = 0.01) controls of fig2 and fig3"),
    "appC": (_appC, 1000, "drain-position dependence and eigen-space populations"),
    "appD": (_appD, 1000, "long-range hopping variants of fig2, fig3 and fig4"),
    "appE": (_appE, 1, "single barrier chain vs uniform chain"),
    "appF": (_appF, 1, "two-exciton state occupations vs dephasing"),
}


def preset_names() -> list[str]:
    return list(_REGISTRY)


def preset_description(name: str) -> str:
    return _REGISTRY[name][2]


def default_realizations(name: str) -> int:
    return _REGISTRY[name][1]


def build_preset(name: str, realizations: int | None = None,
                 master_seed: int = 0) -> list[PresetJob]:
    """Instantiate a preset's sweep jobs, optionally overriding R and seed."""
    try:
        builder, default_r, _ = _REGISTRY[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; known: {preset_names()}") from None
    return builder(realizations if realizations is not None else default_r, master_seed)
