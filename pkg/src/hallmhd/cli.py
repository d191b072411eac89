"""The ``hallmhd`` command line driver.

Subcommands:

- ``run``       scenario run from a TOML config (CSV + JSON summary + checkpoints)
- ``gen-data``  construct initial data, write a checkpoint and measured properties
- ``verify``    property sweeps (lp, commutator, gn, linflow, qkernel, energy)
- ``linflow``   shell-width sweep of the linear-flow forcings, CSV output
- ``lp-norms``  dyadic-sum vs multiplier Sobolev norms on random fields

Exit codes: 0 success, 1 configuration or I/O error, 2 blow-up.
"""

from __future__ import annotations

import argparse
import copy
import csv
import json
import math
import sys
import time as _time
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import diagnostics, suites
from .initial_data import (
    ShellDataParams,
    coefficient_norms,
    make_decomposed_data,
    random_divfree_field,
    spectral_support_check,
)
from .linear_flows import LinearFlowPair
from .solver import (
    SimState,
    StepControl,
    read_checkpoint,
    run,
    write_checkpoint,
)
from .spectral import (
    ConfigError,
    ExponentConfig,
    Grid,
    SpectralVectorField,
    curl,
    divergence_residual,
    fractional_laplacian,
    l2_norm,
    multiplier_norm,
    set_fft_workers,
)

DEFAULT_CONFIG = {
    "grid": {"n": 64, "box_length": 32.0 * math.pi, "dealias": 2.0 / 3.0},
    "exponents": {"alpha": 1.0, "beta": 0.5, "s": 3.0},
    "data": {
        "kind": "small_random",
        "epsilon": 1.0 / 16.0,
        "alpha1": 1.0,
        "alpha2": 1.0,
        "u01_norm": 0.005,
        "b01_norm": 0.005,
        "seed": 0,
        "path": "",
    },
    "control": {
        "dt": 0.02,
        "cfl_safety": 0.3,
        "mode": "fixed",
        "t_end": 1.0,
        "diagnostics_every": 1,
        "checkpoint_every": 0,
        "hall_enabled": True,
        "nonlinear_enabled": True,
    },
    "output": {"directory": "out", "prefix": "run"},
}

DATA_KINDS = ("small_random", "shell", "checkpoint")


def _validate_config(raw: dict) -> dict:
    config = copy.deepcopy(DEFAULT_CONFIG)
    for section, entries in raw.items():
        if section not in config:
            raise ConfigError(f"unknown config section {section!r}")
        if not isinstance(entries, dict):
            raise ConfigError(f"section {section!r} must be a table")
        for key, value in entries.items():
            if key not in config[section]:
                raise ConfigError(f"unknown config key {section}.{key}")
            default = config[section][key]
            if isinstance(default, bool):
                if not isinstance(value, bool):
                    raise ConfigError(f"{section}.{key} must be a boolean")
            elif isinstance(default, (int, float)) and not isinstance(value, (int, float)):
                raise ConfigError(f"{section}.{key} must be numeric")
            elif isinstance(default, str) and not isinstance(value, str):
                raise ConfigError(f"{section}.{key} must be a string")
            config[section][key] = value
    if config["data"]["kind"] not in DATA_KINDS:
        raise ConfigError(
            f"data.kind must be one of {DATA_KINDS}, got {config['data']['kind']!r}"
        )
    return config


def _parse_set_override(spec: str):
    if "=" not in spec or "." not in spec.split("=", 1)[0]:
        raise ConfigError(f"--set expects section.key=value, got {spec!r}")
    dotted, text = spec.split("=", 1)
    section, key = dotted.split(".", 1)
    try:
        value = tomllib.loads(f"v = {text}")["v"]
    except tomllib.TOMLDecodeError:
        value = text  # bare string
    return section, key, value


def load_config(path: str | None, overrides=()) -> dict:
    raw = {}
    if path:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    config = _validate_config(raw)
    for spec in overrides:
        section, key, value = _parse_set_override(spec)
        probe = _validate_config({section: {key: value}})  # same checking path
        config[section][key] = probe[section][key]
    return config


def _build_state(config: dict):
    g = config["grid"]
    grid = Grid(int(g["n"]), box_length=float(g["box_length"]), dealias_fraction=float(g["dealias"]))
    e = config["exponents"]
    exponents = ExponentConfig(alpha=float(e["alpha"]), beta=float(e["beta"]), s=float(e["s"]))
    d = config["data"]
    flow = None
    if d["kind"] == "small_random":
        u0 = random_divfree_field(grid, exponents.s, float(d["u01_norm"]), seed=int(d["seed"]))
        b0 = random_divfree_field(grid, exponents.s, float(d["b01_norm"]), seed=int(d["seed"]) + 1)
    elif d["kind"] == "shell":
        params = ShellDataParams(
            epsilon=float(d["epsilon"]),
            alpha1=float(d["alpha1"]),
            alpha2=float(d["alpha2"]),
            seed=int(d["seed"]),
        )
        data = make_decomposed_data(
            grid, params, float(d["u01_norm"]), float(d["b01_norm"]), s=exponents.s
        )
        u0, b0 = data.u0, data.b0
        flow = LinearFlowPair(
            data.v0,
            alpha1=params.alpha1,
            alpha2=params.alpha2,
            alpha=exponents.alpha,
            epsilon=params.epsilon,
        )
    elif d["kind"] == "checkpoint":
        state = read_checkpoint(d["path"])
        return state, None
    state = SimState(
        u=u0, b=b0, time=0.0, step_count=0, exponents=exponents, galerkin_radius=np.inf
    )
    return state, flow


def cmd_run(args) -> int:
    t0 = _time.time()
    try:
        config = load_config(args.config, args.set or ())
        state, flow = _build_state(config)
    except (ConfigError, OSError, tomllib.TOMLDecodeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    c = config["control"]
    control = StepControl(
        dt=float(c["dt"]),
        cfl_safety=float(c["cfl_safety"]),
        mode=c["mode"],
        nonlinear_enabled=bool(c["nonlinear_enabled"]),
        hall_enabled=bool(c["hall_enabled"]),
    )
    out_dir = Path(args.out or config["output"]["directory"])
    out_dir.mkdir(parents=True, exist_ok=True)
    prefix = config["output"]["prefix"]
    try:
        record = run(
            state,
            control,
            float(c["t_end"]),
            diagnostics_every=int(c["diagnostics_every"]),
            checkpoint_every=int(c["checkpoint_every"]),
            checkpoint_dir=str(out_dir),
            flow=flow,
        )
        record.config = config
        diagnostics.write_csv(record, out_dir / f"{prefix}_diag.csv")
        diagnostics.write_summary(
            record, out_dir / f"{prefix}_summary.json", wall_clock=_time.time() - t0
        )
        if record.final_state is not None:
            write_checkpoint(record.final_state, out_dir / f"{prefix}_final.hmhd")
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    print(f"{record.status}: {len(record.reports)} diagnostics rows -> {out_dir}")
    return 0 if record.status == "completed" else 2


def cmd_gen_data(args) -> int:
    try:
        grid = Grid(int(args.n), box_length=float(args.box_length))
        exponents = ExponentConfig(alpha=float(args.alpha), beta=0.5, s=float(args.s))
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        properties: dict = {"kind": args.kind}
        if args.kind == "shell":
            params = ShellDataParams(
                epsilon=float(args.epsilon),
                alpha1=float(args.alpha1),
                alpha2=float(args.alpha2),
                seed=int(args.seed),
            )
            data = make_decomposed_data(
                grid, params, float(args.u01_norm), float(args.b01_norm), s=exponents.s
            )
            state = SimState(
                u=data.u0, b=data.b0, time=0.0, step_count=0,
                exponents=exponents, galerkin_radius=np.inf,
            )
            eps = params.epsilon
            beltrami = l2_norm(
                SpectralVectorField(
                    grid,
                    curl(data.v0).coefficients
                    - fractional_laplacian(data.v0, 0.5).coefficients,
                )
            ) / max(l2_norm(data.v0), 1e-300)
            l1, l2 = coefficient_norms(data.v0)
            support = spectral_support_check(data.v0, 1 - eps, 1 + eps)
            properties.update(
                {
                    "epsilon": eps,
                    "divergence_residual": max(
                        divergence_residual(data.u0), divergence_residual(data.b0)
                    ),
                    "beltrami_residual": beltrami,
                    "support_ok": support.ok,
                    "support_leaked_fraction": support.leaked_fraction,
                    "coefficient_l1": l1,
                    "coefficient_l2": l2,
                    "smallness_value": data.smallness_value,
                    "hs_u0": l2_norm(data.u0) + multiplier_norm(data.u0, exponents.s),
                    "hs_b0": l2_norm(data.b0) + multiplier_norm(data.b0, exponents.s),
                }
            )
        elif args.kind == "small_random":
            u0 = random_divfree_field(grid, exponents.s, float(args.u01_norm), seed=int(args.seed))
            b0 = random_divfree_field(
                grid, exponents.s, float(args.b01_norm), seed=int(args.seed) + 1
            )
            state = SimState(
                u=u0, b=b0, time=0.0, step_count=0, exponents=exponents,
                galerkin_radius=np.inf,
            )
            properties.update(
                {
                    "hs_u0": l2_norm(u0) + multiplier_norm(u0, exponents.s),
                    "hs_b0": l2_norm(b0) + multiplier_norm(b0, exponents.s),
                    "divergence_residual": max(
                        divergence_residual(u0), divergence_residual(b0)
                    ),
                }
            )
        else:
            raise ConfigError(f"unknown data kind {args.kind!r}")
        write_checkpoint(state, out_dir / "data.hmhd")
        with open(out_dir / "data_properties.json", "w") as fh:
            json.dump(properties, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except (ConfigError, OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    print(f"wrote {out_dir}/data.hmhd and data_properties.json")
    return 0


def _write_rows(rows: list[dict], path: Path) -> None:
    if not rows:
        path.write_text("")
        return
    fields = list(rows[0].keys())
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def cmd_verify(args) -> int:
    try:
        result = suites.run_suite(args.suite)
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_rows(result.rows, out_dir / f"verify_{result.name}.csv")
    with open(out_dir / f"verify_{result.name}_summary.json", "w") as fh:
        json.dump(
            {
                "suite": result.name,
                "ok": result.ok,
                "summary": result.summary,
                "failures": result.failures,
            },
            fh,
            indent=2,
            sort_keys=True,
        )
        fh.write("\n")
    print(f"suite {result.name}: {'PASS' if result.ok else 'FAIL'}")
    for key, value in sorted(result.summary.items()):
        print(f"  {key}: {value}")
    for failure in result.failures:
        print(f"  failure: {failure}")
    return 0 if result.ok else 1


def cmd_linflow(args) -> int:
    epsilons = [float(x) for x in args.epsilons.split(",")]
    try:
        result = suites.suite_linflow(
            epsilons=epsilons,
            n=int(args.n),
            box_length=float(args.box_length),
            alpha=float(args.alpha),
            s=float(args.s),
        )
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_rows(result.rows, out_dir / "linflow_sweep.csv")
    print(f"linflow sweep: {'PASS' if result.ok else 'FAIL'}")
    for key, value in sorted(result.summary.items()):
        print(f"  {key}: {value}")
    for failure in result.failures:
        print(f"  failure: {failure}")
    return 0 if result.ok else 1


def cmd_lp_norms(args) -> int:
    result = suites.suite_lp(n=int(args.n), seeds=int(args.seeds))
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_rows(result.rows, out_dir / "lp_norms.csv")
    print(f"lp norms: {'PASS' if result.ok else 'FAIL'}")
    print(f"  partition_residual: {result.summary['partition_residual']}")
    return 0 if result.ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hallmhd",
        description="Pseudo-spectral Hall-MHD simulator and verification harness",
    )
    parser.add_argument("--threads", type=int, default=None, help="FFT worker threads")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario from a TOML config")
    p_run.add_argument("--config", help="TOML config path")
    p_run.add_argument("--set", action="append", metavar="SECTION.KEY=VALUE")
    p_run.add_argument("--out", help="output directory (overrides config)")
    p_run.set_defaults(func=cmd_run)

    p_gen = sub.add_parser("gen-data", help="construct and store initial data")
    p_gen.add_argument("--kind", choices=("shell", "small_random"), required=True)
    p_gen.add_argument("--out", required=True)
    p_gen.add_argument("--n", default=128)
    p_gen.add_argument("--box-length", dest="box_length", default=32.0 * math.pi)
    p_gen.add_argument("--epsilon", default=1 / 16)
    p_gen.add_argument("--alpha", default=1.0)
    p_gen.add_argument("--alpha1", default=1.0)
    p_gen.add_argument("--alpha2", default=1.0)
    p_gen.add_argument("--u01-norm", dest="u01_norm", default=0.01)
    p_gen.add_argument("--b01-norm", dest="b01_norm", default=0.01)
    p_gen.add_argument("--s", default=3.0)
    p_gen.add_argument("--seed", default=0)
    p_gen.set_defaults(func=cmd_gen_data)

    p_verify = sub.add_parser("verify", help="run a verification suite")
    p_verify.add_argument("--suite", choices=sorted(suites.SUITES), required=True)
    p_verify.add_argument("--out", default="out")
    p_verify.set_defaults(func=cmd_verify)

    p_lin = sub.add_parser("linflow", help="linear-flow forcing sweep")
    p_lin.add_argument("--epsilons", default="0.125,0.0625,0.03125")
    p_lin.add_argument("--n", default=128)
    p_lin.add_argument("--box-length", dest="box_length", default=32.0 * math.pi)
    p_lin.add_argument("--alpha", default=1.0)
    p_lin.add_argument("--s", default=3.0)
    p_lin.add_argument("--out", default="out")
    p_lin.set_defaults(func=cmd_linflow)

    p_lp = sub.add_parser("lp-norms", help="dyadic vs multiplier norm table")
    p_lp.add_argument("--n", default=32)
    p_lp.add_argument("--seeds", default=20)
    p_lp.add_argument("--out", default="out")
    p_lp.set_defaults(func=cmd_lp_norms)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads:
        set_fft_workers(args.threads)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
