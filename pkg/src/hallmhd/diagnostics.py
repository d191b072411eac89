"""Energy functionals and run persistence.

Every norm column uses direct Fourier multipliers; the H^s convention is
the norm sum ||f||_L2 + ||f||_Hdot_s, and squared columns store the square
of that sum.  Cumulative dissipation columns accumulate by the trapezoid
rule at report times; the instantaneous rate columns let consumers
re-integrate at higher order (the energy-balance acceptance check uses
composite Simpson on the rates).
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field
from typing import TYPE_CHECKING

import numpy as np
import scipy.integrate

from .initial_data import smallness_functional
from .spectral import (
    SpectralVectorField,
    divergence_residual,
    hall_term,
    inner_product,
    l2_norm,
    multiplier_norm,
)

if TYPE_CHECKING:
    from .linear_flows import LinearFlowPair
    from .solver import SimState

__all__ = [
    "EnergyReport",
    "RunRecord",
    "DissipationAccumulator",
    "report",
    "smallness_functional",
    "shell_spectrum",
    "write_csv",
    "read_csv",
    "write_summary",
    "energy_balance_residual",
]

# first fourteen columns are the stable schema; the rest are documented extras
COLUMNS = [
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
    "diss_u_rate_l2",
    "diss_b_rate_l2",
    "k_lambda_s_u",
    "k_lambda_s_b",
    "k_diss_u_cum",
    "k_diss_b_cum",
]


@dataclass(frozen=True)
class EnergyReport:
    """One diagnostics row; field order matches the CSV schema."""

    time: float
    l2_u: float
    l2_b: float
    hs_u: float
    hs_b: float
    diss_u_cum: float
    diss_b_cum: float
    E_total: float
    div_u: float
    div_b: float
    hall_cancel: float
    pert_f_hs: float
    pert_h_hs: float
    dt: float
    diss_u_rate_l2: float
    diss_b_rate_l2: float
    k_lambda_s_u: float
    k_lambda_s_b: float
    k_diss_u_cum: float
    k_diss_b_cum: float


@dataclass
class RunRecord:
    config: dict
    reports: list
    checkpoint_paths: list = field(default_factory=list)
    status: str = "completed"
    final_state: object = None  # SimState at termination (last good on blow-up)


class DissipationAccumulator:
    """Trapezoid accumulation of dissipation rates across report times."""

    def __init__(self):
        self.prev_time: float | None = None
        self.prev_rates: dict[str, float] = {}
        self.cums: dict[str, float] = {}

    def update(self, time: float, rates: dict[str, float]) -> dict[str, float]:
        if self.prev_time is not None:
            h = time - self.prev_time
            for name, rate in rates.items():
                self.cums[name] = self.cums.get(name, 0.0) + 0.5 * h * (
                    rate + self.prev_rates[name]
                )
        else:
            for name in rates:
                self.cums[name] = 0.0
        self.prev_time = time
        self.prev_rates = dict(rates)
        return dict(self.cums)


def _hs_sum(fld: SpectralVectorField, s: float) -> float:
    return l2_norm(fld) + multiplier_norm(fld, s)


def report(
    state: "SimState",
    exponents=None,
    flow: "LinearFlowPair | None" = None,
    acc: DissipationAccumulator | None = None,
    dt: float = float("nan"),
) -> EnergyReport:
    """Compute all energy columns for one state snapshot."""
    exponents = exponents or state.exponents
    s, alpha, beta = exponents.s, exponents.alpha, exponents.beta
    u, b = state.u, state.b

    l2_u, l2_b = l2_norm(u) ** 2, l2_norm(b) ** 2
    hs_u, hs_b = _hs_sum(u, s) ** 2, _hs_sum(b, s) ** 2

    rates = {
        "diss_u_cum": (multiplier_norm(u, alpha) + multiplier_norm(u, alpha + s)) ** 2,
        "diss_b_cum": (multiplier_norm(b, beta) + multiplier_norm(b, beta + s)) ** 2,
        "k_diss_u_cum": multiplier_norm(u, alpha + s) ** 2,
        "k_diss_b_cum": multiplier_norm(b, beta + s) ** 2,
    }
    acc = acc or DissipationAccumulator()
    cums = acc.update(state.time, rates)

    h = hall_term(b)
    denom = l2_norm(h) * l2_norm(b)
    hall_cancel = abs(inner_product(h, b)) / denom if denom > 0 else 0.0

    if flow is not None:
        f = SpectralVectorField(u.grid, u.coefficients - flow.velocity(state.time).coefficients)
        hh = SpectralVectorField(b.grid, b.coefficients - flow.magnetic(state.time).coefficients)
        pert_f, pert_h = _hs_sum(f, s) ** 2, _hs_sum(hh, s) ** 2
    else:
        pert_f = pert_h = float("nan")

    return EnergyReport(
        time=state.time,
        l2_u=l2_u,
        l2_b=l2_b,
        hs_u=hs_u,
        hs_b=hs_b,
        diss_u_cum=cums["diss_u_cum"],
        diss_b_cum=cums["diss_b_cum"],
        E_total=hs_u + hs_b + cums["diss_u_cum"] + cums["diss_b_cum"],
        div_u=divergence_residual(u),
        div_b=divergence_residual(b),
        hall_cancel=hall_cancel,
        pert_f_hs=pert_f,
        pert_h_hs=pert_h,
        dt=dt,
        diss_u_rate_l2=multiplier_norm(u, alpha) ** 2,
        diss_b_rate_l2=multiplier_norm(b, beta) ** 2,
        k_lambda_s_u=multiplier_norm(u, s) ** 2,
        k_lambda_s_b=multiplier_norm(b, s) ** 2,
        k_diss_u_cum=cums["k_diss_u_cum"],
        k_diss_b_cum=cums["k_diss_b_cum"],
    )


def shell_spectrum(fld: SpectralVectorField) -> tuple[np.ndarray, np.ndarray]:
    """Integer-binned lattice-radius shells and their L^2 energies.

    Energies use the box-volume convention, so they sum to the squared
    L^2 norm of the field.
    """
    grid = fld.grid
    radius = grid.xi_mag * grid.box_length / (2.0 * np.pi)
    bins = np.rint(radius).astype(int).ravel()
    power = (grid.box_length**3 * np.sum(np.abs(fld.coefficients) ** 2, axis=0)).ravel()
    energies = np.bincount(bins, weights=power)
    return np.arange(energies.size), energies


def write_csv(record: RunRecord, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(COLUMNS)
        for rep in record.reports:
            row = asdict(rep)
            writer.writerow(["%.17g" % row[c] for c in COLUMNS])


def read_csv(path) -> list[EnergyReport]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header[: len(COLUMNS)] != COLUMNS[: len(header)] or header[:14] != COLUMNS[:14]:
            raise ValueError(f"unexpected diagnostics header: {header}")
        out = []
        for row in reader:
            if len(row) != len(header):
                raise ValueError(f"malformed row: {row}")
            values = dict(zip(header, (float(v) for v in row)))
            for name in COLUMNS:
                values.setdefault(name, float("nan"))
            out.append(EnergyReport(**values))
    return out


def write_summary(record: RunRecord, path, wall_clock: float = 0.0, extra: dict | None = None):
    reports = record.reports
    summary = {
        "config": record.config,
        "status": record.status,
        "rows": len(reports),
        "wall_clock_seconds": wall_clock,
        "checkpoints": list(record.checkpoint_paths),
    }
    if reports:
        summary["peak"] = {
            "hs_u": max(r.hs_u for r in reports),
            "hs_b": max(r.hs_b for r in reports),
            "E_total": max(r.E_total for r in reports),
        }
        summary["final_time"] = reports[-1].time
    if extra:
        summary.update(extra)
    with open(path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")


def energy_balance_residual(reports: list) -> float:
    """Relative defect of the L^2 energy identity computed from a report
    series: |E(t) + 2 int(dissipation) - E(0)| / E(0), with the time
    integral done by composite Simpson on the rate columns."""
    if len(reports) < 3:
        raise ValueError("need at least three reports")
    t = np.array([r.time for r in reports])
    e = np.array([r.l2_u + r.l2_b for r in reports])
    rate = np.array([r.diss_u_rate_l2 + r.diss_b_rate_l2 for r in reports])
    integral = scipy.integrate.simpson(rate, x=t)
    return abs(e[-1] + 2.0 * integral - e[0]) / e[0]
