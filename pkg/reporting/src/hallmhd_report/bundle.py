"""Parsing of the simulator's diagnostics CSV and run-summary JSON.

The diagnostics schema is a fixed contract: fourteen required columns in
order, optionally followed by the documented extras.  Unknown columns are
an error; silently plotting misaligned data is worse than failing.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

REQUIRED_COLUMNS = [
    "time",
    "l2_u",
    "l2_b",
    "hs_u",
    "hs_b",
    "diss_u_cum",
    "diss_b_cum",
    "E_total",
    "div_u",
    "div_b",
    "hall_cancel",
    "pert_f_hs",
    "pert_h_hs",
    "dt",
]

OPTIONAL_COLUMNS = [
    "diss_u_rate_l2",
    "diss_b_rate_l2",
    "k_lambda_s_u",
    "k_lambda_s_b",
    "k_diss_u_cum",
    "k_diss_b_cum",
]


class SchemaError(ValueError):
    """Diagnostics header does not match the published schema."""


@dataclass
class SeriesBundle:
    """One run's diagnostics columns plus its summary, keyed by label."""

    label: str
    columns: dict[str, np.ndarray]
    summary: dict | None = None

    def __post_init__(self):
        t = self.columns["time"]
        if len(t) >= 2 and not np.all(np.diff(t) > 0):
            raise SchemaError(f"{self.label}: times are not strictly increasing")

    @property
    def times(self) -> np.ndarray:
        return self.columns["time"]

    def __len__(self) -> int:
        return len(self.times)


def read_diagnostics(path) -> dict[str, np.ndarray]:
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header[: len(REQUIRED_COLUMNS)] != REQUIRED_COLUMNS:
            raise SchemaError(
                f"{path}: header does not start with the required columns; got {header[:14]}"
            )
        for name in header[len(REQUIRED_COLUMNS) :]:
            if name not in OPTIONAL_COLUMNS:
                raise SchemaError(f"{path}: unknown column {name!r}")
        rows = []
        for row in reader:
            if len(row) != len(header):
                raise SchemaError(f"{path}: malformed row of width {len(row)}")
            rows.append([float(v) for v in row])
    data = np.asarray(rows, dtype=float).reshape(len(rows), len(header))
    return {name: data[:, i].copy() for i, name in enumerate(header)}


def load_bundle(csv_path, summary_path=None, label: str | None = None) -> SeriesBundle:
    columns = read_diagnostics(csv_path)
    summary = None
    if summary_path is not None and Path(summary_path).exists():
        summary = json.loads(Path(summary_path).read_text())
    return SeriesBundle(label=label or Path(csv_path).stem, columns=columns, summary=summary)


def load_run_dir(run_dir, prefix: str = "run", label: str | None = None) -> SeriesBundle:
    run_dir = Path(run_dir)
    return load_bundle(
        run_dir / f"{prefix}_diag.csv",
        run_dir / f"{prefix}_summary.json",
        label=label or run_dir.name,
    )


def read_sweep_csv(path) -> dict[str, np.ndarray]:
    """Generic numeric CSV (one header row), e.g. the shell-width sweeps."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{path}: empty sweep file")
    out = {}
    for name in rows[0]:
        out[name] = np.array([float(r[name]) for r in rows])
    return out
