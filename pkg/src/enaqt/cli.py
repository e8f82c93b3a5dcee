"""Command-line front end: validated JSON configs, figure presets, CSV/JSON output.

Exit codes: 0 success, 2 configuration error (message names the offending
field), 3 solver-failure threshold exceeded on at least one grid point.
Every output file embeds the fully resolved sweep description and master
seed, so any result can be reproduced from the file alone.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__, presets
from .ensemble import (
    AXIS_PARAMS,
    SweepAxis,
    SweepSpec,
    SweepResult,
    run_sweep,
    sweep_spec_to_dict,
)
from .model import ChainSpec

_AXIS_SCHEMA = {
    "type": "object",
    "required": ["param"],
    "oneOf": [{"required": ["values"]}, {"required": ["grid"]}],
    "additionalProperties": False,
    "properties": {
        "param": {"enum": sorted(AXIS_PARAMS)},
        "values": {"type": "array", "items": {"type": "number"}, "minItems": 1},
        "grid": {
            "type": "object",
            "required": ["kind", "start", "stop", "num"],
            "additionalProperties": False,
            "properties": {
                "kind": {"enum": ["log", "linear"]},
                "start": {"type": "number"},
                "stop": {"type": "number"},
                "num": {"type": "integer", "minimum": 2},
            },
        },
    },
}

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["chain", "sweep"],
    "additionalProperties": False,
    "properties": {
        "chain": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "L": {"type": "integer", "minimum": 1},
                "eps0": {"type": "number"},
                "t": {"type": "number", "exclusiveMinimum": 0},
                "W_over_t": {"type": "number", "minimum": 0},
                "hopping": {"enum": ["nearest_neighbor", "long_range"]},
                "U_over_t": {"type": "number"},
                "barrier": {
                    "type": "object",
                    "required": ["site", "height_over_t"],
                    "additionalProperties": False,
                    "properties": {
                        "site": {"type": "integer", "minimum": 1},
                        "height_over_t": {"type": "number"},
                    },
                },
                "gamma_inj": {"type": "number", "minimum": 0},
                "gamma_ext": {"type": "number", "minimum": 0},
                "gamma_deph": {"type": "number", "minimum": 0},
                "i_inj": {"type": "integer", "minimum": 1},
                "i_ext": {"type": "integer", "minimum": 1},
                "n_max": {"enum": [1, 2]},
            },
        },
        "sweep": {
            "type": "object",
            "required": ["axis1"],
            "additionalProperties": False,
            "properties": {
                "axis1": _AXIS_SCHEMA,
                "axis2": _AXIS_SCHEMA,
                "realizations": {"type": "integer", "minimum": 1},
                "master_seed": {"type": "integer"},
            },
        },
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"stem": {"type": "string"}},
        },
    },
}


class ConfigError(ValueError):
    pass


def chain_spec_from_config(chain: dict) -> ChainSpec:
    """Build a ChainSpec from the config's chain section (rates in s^-1,
    disorder/interaction/barrier expressed in units of t)."""
    defaults = ChainSpec()
    t = float(chain.get("t", defaults.t))
    kwargs = dict(
        L=chain.get("L", defaults.L),
        eps0=float(chain.get("eps0", defaults.eps0)),
        t=t,
        W=float(chain.get("W_over_t", 0.0)) * t,
        hopping=chain.get("hopping", defaults.hopping),
        U=float(chain.get("U_over_t", 0.0)) * t,
        gamma_inj=float(chain.get("gamma_inj", defaults.gamma_inj)),
        gamma_ext=float(chain.get("gamma_ext", defaults.gamma_ext)),
        gamma_deph=float(chain.get("gamma_deph", defaults.gamma_deph)),
        i_inj=chain.get("i_inj", defaults.i_inj),
        i_ext=chain.get("i_ext", defaults.i_ext),
        n_max=chain.get("n_max", defaults.n_max),
    )
    if "barrier" in chain:
        kwargs["barrier"] = (chain["barrier"]["site"],
                             float(chain["barrier"]["height_over_t"]) * t)
    try:
        return ChainSpec(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"chain: {exc}") from exc


def _axis_from_config(section: dict, name: str) -> SweepAxis:
    if "values" in section:
        values = tuple(section["values"])
    else:
        g = section["grid"]
        space = np.geomspace if g["kind"] == "log" else np.linspace
        values = tuple(space(g["start"], g["stop"], g["num"]))
    try:
        return SweepAxis(section["param"], values)
    except ValueError as exc:
        raise ConfigError(f"sweep.{name}: {exc}") from exc


def sweep_spec_from_config(config: dict) -> SweepSpec:
    """Validate a config dict against the schema and build the SweepSpec."""
    try:
        jsonschema.validate(config, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        path = ".".join(str(p) for p in exc.absolute_path) or "(root)"
        raise ConfigError(f"{path}: {exc.message}") from exc
    base = chain_spec_from_config(config["chain"])
    sweep = config["sweep"]
    axis1 = _axis_from_config(sweep["axis1"], "axis1")
    axis2 = _axis_from_config(sweep["axis2"], "axis2") if "axis2" in sweep else None
    try:
        return SweepSpec(
            base=base,
            axis1=axis1,
            axis2=axis2,
            realizations=sweep.get("realizations", 1),
            master_seed=sweep.get("master_seed", 0),
        )
    except ValueError as exc:
        raise ConfigError(f"sweep: {exc}") from exc


def _fmt(x) -> str:
    """Round-trip float formatting so CSV bytes are reproducible."""
    return repr(float(x))


def _config_header(result: SweepResult) -> str:
    payload = dict(sweep_spec_to_dict(result.spec))
    payload["spec_hash"] = result.spec_hash
    payload["code_version"] = result.code_version
    return "# config: " + json.dumps(payload, sort_keys=True)


def _axis_columns(result: SweepResult):
    names = [result.spec.axis1.param]
    if result.spec.axis2 is not None:
        names.append(result.spec.axis2.param)
    return names


def _axis_values(point, result: SweepResult):
    vals = [point.axis1_value]
    if result.spec.axis2 is not None:
        vals.append(point.axis2_value)
    return vals


def write_sweep_outputs(result: SweepResult, out_dir: Path, stem: str) -> list[Path]:
    """Write the scalar CSV, long-form population CSVs and the JSON mirror."""
    out_dir.mkdir(parents=True, exist_ok=True)
    axis_names = _axis_columns(result)
    header = _config_header(result)
    basis = result.spec.base.basis()
    written = []

    scalar_path = out_dir / f"{stem}.csv"
    with scalar_path.open("w", newline="") as fh:
        fh.write(header + "\n")
        writer = csv.writer(fh)
        writer.writerow(axis_names + [
            "J_mean", "J_stderr", "N_total_mean", "N_total_stderr",
            "delta_n_mean", "delta_n_stderr", "ipr_mean", "ipr_stderr",
            "realizations", "failures",
        ])
        for p in result.points:
            writer.writerow(
                [_fmt(v) for v in _axis_values(p, result)]
                + [_fmt(p.J_mean), _fmt(p.J_stderr),
                   _fmt(p.N_total_mean), _fmt(p.N_total_stderr),
                   _fmt(p.delta_n_mean), _fmt(p.delta_n_stderr),
                   _fmt(p.ipr_mean), _fmt(p.ipr_stderr),
                   p.realizations, p.failures]
            )
    written.append(scalar_path)

    sites_path = out_dir / f"{stem}_sites.csv"
    with sites_path.open("w", newline="") as fh:
        fh.write(header + "\n")
        writer = csv.writer(fh)
        writer.writerow(axis_names + ["site", "n_mean", "n_stderr"])
        for p in result.points:
            axis_vals = [_fmt(v) for v in _axis_values(p, result)]
            for site in range(result.spec.base.L):
                writer.writerow(axis_vals + [
                    site + 1,
                    _fmt(p.populations_mean[site]),
                    _fmt(p.populations_stderr[site]),
                ])
    written.append(sites_path)

    if result.points and result.points[0].eigen_populations_mean is not None:
        eigen_path = out_dir / f"{stem}_eigen.csv"
        with eigen_path.open("w", newline="") as fh:
            fh.write(header + "\n")
            writer = csv.writer(fh)
            writer.writerow(axis_names + ["mode", "p_mean", "p_stderr"])
            for p in result.points:
                axis_vals = [_fmt(v) for v in _axis_values(p, result)]
                for mode in range(result.spec.base.L):
                    writer.writerow(axis_vals + [
                        mode + 1,
                        _fmt(p.eigen_populations_mean[mode]),
                        _fmt(p.eigen_populations_stderr[mode]),
                    ])
        written.append(eigen_path)

    states_path = out_dir / f"{stem}_states.csv"
    with states_path.open("w", newline="") as fh:
        fh.write(header + "\n")
        writer = csv.writer(fh)
        writer.writerow(axis_names + ["state_index", "state", "p_mean", "p_stderr"])
        for p in result.points:
            axis_vals = [_fmt(v) for v in _axis_values(p, result)]
            for k in range(basis.dim):
                writer.writerow(axis_vals + [
                    k, basis.state_label(k),
                    _fmt(p.state_diagonal_mean[k]),
                    _fmt(p.state_diagonal_stderr[k]),
                ])
    written.append(states_path)

    json_path = out_dir / f"{stem}.json"
    payload = {
        "config": sweep_spec_to_dict(result.spec),
        "spec_hash": result.spec_hash,
        "master_seed": result.master_seed,
        "code_version": result.code_version,
        "axis_columns": axis_names,
        "points": [
            {
                "axis_values": _axis_values(p, result),
                "J_mean": p.J_mean, "J_stderr": p.J_stderr,
                "N_total_mean": p.N_total_mean, "N_total_stderr": p.N_total_stderr,
                "delta_n_mean": p.delta_n_mean, "delta_n_stderr": p.delta_n_stderr,
                "ipr_mean": p.ipr_mean, "ipr_stderr": p.ipr_stderr,
                "realizations": p.realizations,
                "failures": p.failures,
                "populations_mean": list(p.populations_mean),
                "populations_stderr": list(p.populations_stderr),
                "eigen_populations_mean": None
                if p.eigen_populations_mean is None else list(p.eigen_populations_mean),
                "eigen_populations_stderr": None
                if p.eigen_populations_stderr is None else list(p.eigen_populations_stderr),
                "state_diagonal_mean": list(p.state_diagonal_mean),
                "state_diagonal_stderr": list(p.state_diagonal_stderr),
            }
            for p in result.points
        ],
    }
    with json_path.open("w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=1)
        fh.write("\n")
    written.append(json_path)
    return written


def _report_failures(result: SweepResult, label: str) -> bool:
    bad = result.failed_points
    if not bad:
        return False
    print(f"{label}: {len(bad)} grid point(s) exceeded the 1% solver-failure "
          "threshold:", file=sys.stderr)
    for p in bad:
        print(f"  axis1={p.axis1_value} axis2={p.axis2_value}: "
              f"{p.failures}/{p.realizations} realizations failed", file=sys.stderr)
    return True


def _cmd_run(args) -> int:
    path = Path(args.config)
    if not path.exists():
        print(f"config file not found: {path}", file=sys.stderr)
        return 2
    try:
        config = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        print(f"config is not valid JSON: {exc}", file=sys.stderr)
        return 2
    try:
        spec = sweep_spec_from_config(config)
    except ConfigError as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return 2
    stem = config.get("output", {}).get("stem", path.stem)
    result = run_sweep(spec, jobs=args.jobs)
    for out in write_sweep_outputs(result, Path(args.out), stem):
        print(out)
    return 3 if _report_failures(result, stem) else 0


def _cmd_fig(args) -> int:
    try:
        jobs_list = presets.build_preset(args.preset, args.realizations, args.seed)
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    any_failed = False
    for job in jobs_list:
        result = run_sweep(job.sweep, jobs=args.jobs)
        stem = f"{args.preset}_{job.name}"
        for out in write_sweep_outputs(result, Path(args.out), stem):
            print(out)
        any_failed |= _report_failures(result, stem)
    return 3 if any_failed else 0


def _cmd_list(_args) -> int:
    rows = [
        (name, str(presets.default_realizations(name)), presets.preset_description(name))
        for name in presets.preset_names()
    ]
    widths = [max(len(r[i]) for r in rows + [("preset", "R", "description")])
              for i in range(3)]
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    print(fmt.format("preset", "R", "description"))
    for row in rows:
        print(fmt.format(*row))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="enaqt",
        description="Steady-state transport sweeps for open tight-binding chains",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a sweep described by a JSON config")
    p_run.add_argument("config", help="path to the JSON config file")
    p_run.add_argument("--jobs", type=int, default=1, help="worker processes")
    p_run.add_argument("--out", default=".", help="output directory")
    p_run.set_defaults(func=_cmd_run)

    p_fig = sub.add_parser("fig", help="run a named preset")
    p_fig.add_argument("preset", help="preset name (see 'enaqt list')")
    p_fig.add_argument("--jobs", type=int, default=1, help="worker processes")
    p_fig.add_argument("--realizations", type=int, default=None,
                       help="override disorder realizations per point")
    p_fig.add_argument("--seed", type=int, default=0, help="master seed")
    p_fig.add_argument("--out", default=".", help="output directory")
    p_fig.set_defaults(func=_cmd_fig)

    p_list = sub.add_parser("list", help="list available presets")
    p_list.set_defaults(func=_cmd_list)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
