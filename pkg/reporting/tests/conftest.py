"""Fixtures: synthetic diagnostics files matching the published schema."""

import json
import math

import numpy as np
import pytest

from hallmhd_report.bundle import OPTIONAL_COLUMNS, REQUIRED_COLUMNS

ALL_COLUMNS = REQUIRED_COLUMNS + OPTIONAL_COLUMNS


def write_diagnostics(path, times, l2_total=None, extras=True):
    """Write a schema-conforming diagnostics CSV with synthetic decay."""
    names = ALL_COLUMNS if extras else REQUIRED_COLUMNS
    rows = []
    for i, t in enumerate(times):
        e = l2_total[i] if l2_total is not None else math.exp(-2.0 * t)
        values = {name: 0.0 for name in names}
        values.update(
            time=t,
            l2_u=0.5 * e,
            l2_b=0.5 * e,
            hs_u=e,
            hs_b=e,
            E_total=2.0 * e,
            dt=0.05,
            pert_f_hs=float("nan"),
            pert_h_hs=float("nan"),
        )
        rows.append(values)
    with open(path, "w") as fh:
        fh.write(",".join(names) + "\n")
        for values in rows:
            fh.write(",".join("%.17g" % values[name] for name in names) + "\n")
    return path


def write_summary(path, status="completed", rows=0):
    payload = {
        "status": status,
        "rows": rows,
        "final_time": 1.0,
        "config": {"grid": {"n": 16}, "control": {"dt": 0.05}},
    }
    path.write_text(json.dumps(payload))
    return path


@pytest.fixture
def run_dir(tmp_path):
    d = tmp_path / "runout"
    d.mkdir()
    times = np.linspace(0.0, 1.0, 21)
    write_diagnostics(d / "run_diag.csv", times)
    write_summary(d / "run_summary.json", rows=21)
    return d
