"""Verification sweeps behind ``hallmhd verify`` and the acceptance tests.

Each suite runs a property sweep, collects per-sample rows for CSV export,
and reports hard assertion failures (empirical constants are logged, never
asserted).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .initial_data import (
    ShellDataParams,
    amplified_shell_field,
    coefficient_norms,
    random_divfree_field,
)
from .linear_flows import (
    LinearFlowPair,
    coupling_forcing_integral,
    q_kernel_bound_check,
)
from .littlewood_paley import (
    commutator_advection,
    commutator_bound_ratio,
    dyadic_block,
    gagliardo_nirenberg_ratio,
    get_blocks,
    sobolev_norm,
)
from .solver import SimState, StepControl, rhs_nonlinear, run
from .spectral import (
    ExponentConfig,
    Grid,
    PhysicalVectorField,
    SpectralVectorField,
    hall_term,
    inner_product,
    l2_norm,
    leray_project,
    spectral_from_raw,
    transform_forward,
)

__all__ = [
    "SuiteResult",
    "SUITES",
    "run_suite",
    "suite_lp",
    "suite_commutator",
    "suite_gn",
    "suite_linflow",
    "suite_qkernel",
    "suite_energy",
    "loglog_slope",
]


@dataclass
class SuiteResult:
    name: str
    ok: bool
    rows: list[dict] = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    failures: list[str] = field(default_factory=list)


def loglog_slope(xs, ys) -> float:
    """Least-squares slope of log(y) against log(x)."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.size < 2:
        raise ValueError("need at least two points for a slope fit")
    coeffs = np.polyfit(np.log(xs), np.log(ys), 1)
    return float(coeffs[0])


def _random_band_field(grid: Grid, seed: int, decay: float = 2.0) -> SpectralVectorField:
    rng = np.random.default_rng(seed)
    raw = transform_forward(
        PhysicalVectorField(grid, rng.standard_normal((3, grid.n, grid.n, grid.n)))
    ).coefficients
    mag = grid.xi_mag.copy()
    mag[0, 0, 0] = 1.0
    envelope = mag**-decay
    envelope[0, 0, 0] = 0.0
    return spectral_from_raw(grid, raw * envelope)


def suite_lp(n: int = 32, box_length: float = 2.0 * np.pi, seeds: int = 20) -> SuiteResult:
    """Partition of unity, block reconstruction, and norm equivalence."""
    grid = Grid(n, box_length=box_length)
    blocks = get_blocks(grid)
    failures = []
    partition = blocks.partition_residual()
    if partition >= 1e-14:
        failures.append(f"partition residual {partition:.3e} >= 1e-14")
    rows = []
    for seed in range(seeds):
        f = leray_project(_random_band_field(grid, 10_000 + seed))
        total = np.zeros_like(f.coefficients)
        for j in range(blocks.j_min, blocks.j_max + 1):
            total += dyadic_block(f, j).coefficients
        recon = l2_norm(SpectralVectorField(grid, total - f.coefficients)) / l2_norm(f)
        if recon >= 1e-12:
            failures.append(f"seed {seed}: reconstruction {recon:.3e} >= 1e-12")
        row = {"seed": seed, "reconstruction": recon}
        for s in (0.5, 1.0, 3.0):
            lp = sobolev_norm(f, s, homogeneous=True, method="lp")
            direct = sobolev_norm(f, s, homogeneous=True, method="direct")
            ratio = lp / direct
            row[f"ratio_s{s}"] = ratio
            if not 0.5 <= ratio <= 2.0:
                failures.append(f"seed {seed}: s={s} ratio {ratio:.3f} outside [0.5, 2]")
        rows.append(row)
    summary = {
        "partition_residual": partition,
        "max_reconstruction": max(r["reconstruction"] for r in rows),
    }
    return SuiteResult("lp", not failures, rows, summary, failures)


def suite_commutator(
    n: int = 32,
    box_length: float = 2.0 * np.pi,
    seeds: int = 100,
    j_values=(0, 1, 2, 3, 4),
) -> SuiteResult:
    """Commutator-estimate probe: constant-velocity exactness plus the
    empirical bound constant over random divergence-free triples."""
    grid = Grid(n, box_length=box_length)
    failures = []

    const = np.zeros((3, n, n, n), dtype=np.complex128)
    const[0][0, 0, 0] = 1.0
    H0 = SpectralVectorField(grid, const)
    X0 = leray_project(_random_band_field(grid, 1))
    for j in (0, 1, 2):
        resid = np.max(np.abs(commutator_advection(H0, X0, j).coefficients))
        if resid >= 1e-12:
            failures.append(f"constant velocity commutator {resid:.3e} >= 1e-12 at j={j}")

    rows = []
    max_ratio = 0.0
    j_max = get_blocks(grid).j_max
    for seed in range(seeds):
        H = leray_project(_random_band_field(grid, 20_000 + seed))
        X = leray_project(_random_band_field(grid, 30_000 + seed))
        W = leray_project(_random_band_field(grid, 40_000 + seed))
        for j in j_values:
            if j > j_max:
                ratio = 0.0
            else:
                ratio = commutator_bound_ratio(H, X, W, j)
            if not np.isfinite(ratio):
                failures.append(f"seed {seed}, j={j}: ratio not finite")
            max_ratio = max(max_ratio, ratio)
            rows.append({"seed": seed, "j": j, "ratio": ratio})
    summary = {"empirical_max_ratio": max_ratio, "samples": len(rows)}
    return SuiteResult("commutator", not failures, rows, summary, failures)


def suite_gn(n: int = 32, box_length: float = 2.0 * np.pi, seeds: int = 100) -> SuiteResult:
    """Interpolation-inequality ratios: equality on single modes, at most
    one on random fields."""
    grid = Grid(n, box_length=box_length)
    failures = []
    rows = []
    xx, yy, _ = grid.collocation_points()
    for k, s, gamma in [(1, 1.0, 0.5), (2, 3.0, 0.5), (3, 2.0, 1.0)]:
        f = transform_forward(
            PhysicalVectorField(
                grid, np.stack((np.cos(k * xx),) + (np.zeros_like(xx),) * 2)
            )
        )
        ratio = gagliardo_nirenberg_ratio(f, s, gamma)
        rows.append({"kind": "single_mode", "seed": k, "s": s, "gamma": gamma, "ratio": ratio})
        if abs(ratio - 1.0) >= 1e-12:
            failures.append(f"single mode k={k}: ratio {ratio} != 1")
    for seed in range(seeds):
        f = _random_band_field(grid, 50_000 + seed)
        for s, gamma in [(1.0, 0.5), (3.0, 0.5)]:
            ratio = gagliardo_nirenberg_ratio(f, s, gamma)
            rows.append({"kind": "random", "seed": seed, "s": s, "gamma": gamma, "ratio": ratio})
            if ratio > 1.0 + 1e-10:
                failures.append(f"seed {seed}: ratio {ratio} exceeds 1 + 1e-10")
    summary = {"max_ratio": max(r["ratio"] for r in rows)}
    return SuiteResult("gn", not failures, rows, summary, failures)


def suite_linflow(
    epsilons=(1 / 8, 1 / 16, 1 / 32),
    n: int = 128,
    box_length: float = 32.0 * np.pi,
    alpha: float = 1.0,
    s: float = 3.0,
    t_max: float = 15.0,
    dt_quad: float = 0.05,
) -> SuiteResult:
    """Coupling-forcing integral scaling across the shell-width sweep, plus
    the exact-zero degenerate cases."""
    failures = []
    rows = []
    ratios = []
    for eps in epsilons:
        grid = Grid(n, box_length=box_length)
        v0 = amplified_shell_field(grid, ShellDataParams(epsilon=eps))
        l1, l2 = coefficient_norms(v0)
        flow = LinearFlowPair(v0, alpha1=1.0, alpha2=1.0, alpha=alpha, epsilon=eps)
        res = coupling_forcing_integral(flow, s, t_max=t_max, dt_quad=dt_quad)
        if not res.tail_ok:
            failures.append(f"eps={eps}: integrand tail {res.tail_fraction:.2e} not decayed")
        ratio = res.value / (eps * l1 * l2)
        ratios.append(ratio)
        rows.append(
            {
                "epsilon": eps,
                "integral": res.value,
                "l1": l1,
                "l2": l2,
                "normalized": ratio,
            }
        )
        # degenerate cases are exactly zero
        zero_amp = coupling_forcing_integral(
            LinearFlowPair(v0, alpha1=0.0, alpha2=1.0, alpha=alpha), s, t_max=1.0, dt_quad=0.5
        )
        if zero_amp.value != 0.0:
            failures.append(f"eps={eps}: zero-amplitude integral {zero_amp.value} != 0")
    band = max(ratios) / min(ratios)
    if band >= 4.0:
        failures.append(f"normalized integral varies {band:.2f}x across sweep (>= 4x)")
    summary = {
        "ratio_band": band,
        "slope": loglog_slope(epsilons, [r["integral"] for r in rows]),
    }
    return SuiteResult("linflow", not failures, rows, summary, failures)


def suite_qkernel(
    alpha: float = 1.0,
    epsilon: float = 1 / 8,
    t_points: int = 100,
    shell_samples: int = 10_000,
    seed: int = 0,
) -> SuiteResult:
    """Decay-difference kernel: vanishing at alpha = 1/2, finite normalized
    ratio, and near-linear shrinkage of max |Q| under shell halving."""
    failures = []
    ts = np.linspace(0.1, 10.0, t_points)
    degenerate = q_kernel_bound_check(0.5, epsilon, ts, shell_samples, seed)
    if degenerate.max_abs_q != 0.0:
        failures.append(f"alpha=1/2 kernel max {degenerate.max_abs_q} != 0")
    full = q_kernel_bound_check(alpha, epsilon, ts, shell_samples, seed)
    half = q_kernel_bound_check(alpha, epsilon / 2, ts, shell_samples, seed)
    if not np.isfinite(full.max_ratio):
        failures.append("normalized ratio not finite")
    shrink = half.max_abs_q / full.max_abs_q if full.max_abs_q > 0 else 0.0
    if not 0.3 <= shrink <= 0.8:
        failures.append(f"half-shell shrink factor {shrink:.3f} outside [0.3, 0.8]")
    rows = [
        {"alpha": 0.5, "epsilon": epsilon, "max_ratio": degenerate.max_ratio, "max_abs_q": degenerate.max_abs_q},
        {"alpha": alpha, "epsilon": epsilon, "max_ratio": full.max_ratio, "max_abs_q": full.max_abs_q},
        {"alpha": alpha, "epsilon": epsilon / 2, "max_ratio": half.max_ratio, "max_abs_q": half.max_abs_q},
    ]
    summary = {"max_ratio": full.max_ratio, "shrink": shrink}
    return SuiteResult("qkernel", not failures, rows, summary, failures)


def suite_energy(
    n: int = 32,
    box_length: float = 8.0 * np.pi,
    seeds: int = 10,
    run_dt: float = 0.02,
    run_t: float = 0.5,
) -> SuiteResult:
    """Discrete energy structure: tendency neutrality and the short-run
    balance residual."""
    from .diagnostics import energy_balance_residual

    grid = Grid(n, box_length=box_length)
    failures = []
    rows = []
    for seed in range(seeds):
        u = random_divfree_field(grid, 3.0, 1.0, seed=60_000 + seed)
        b = random_divfree_field(grid, 3.0, 0.8, seed=70_000 + seed)
        st = SimState(u=u, b=b, time=0.0, step_count=0, exponents=ExponentConfig())
        du, db = rhs_nonlinear(st)
        val = inner_product(du, u) + inner_product(db, b)
        scale = (l2_norm(du) + l2_norm(db)) * (l2_norm(u) + l2_norm(b))
        neutrality = abs(val) / scale if scale > 0 else 0.0
        rows.append({"seed": seed, "neutrality": neutrality})
        if neutrality >= 1e-10:
            failures.append(f"seed {seed}: tendency neutrality {neutrality:.3e} >= 1e-10")
        h = hall_term(b)
        denom = l2_norm(h) * l2_norm(b)
        cancel = abs(inner_product(h, b)) / denom if denom > 0 else 0.0
        rows[-1]["hall_cancel"] = cancel
        if cancel >= 1e-10:
            failures.append(f"seed {seed}: hall cancellation {cancel:.3e} >= 1e-10")

    u0 = random_divfree_field(grid, 3.0, 0.01, seed=123)
    b0 = random_divfree_field(grid, 3.0, 0.01, seed=124)
    st = SimState(u=u0, b=b0, time=0.0, step_count=0, exponents=ExponentConfig())
    rec = run(st, StepControl(dt=run_dt), run_t)
    resid = energy_balance_residual(rec.reports)
    if resid >= 1e-4:
        failures.append(f"balance residual {resid:.3e} >= 1e-4")
    summary = {
        "max_neutrality": max(r["neutrality"] for r in rows),
        "balance_residual": resid,
    }
    return SuiteResult("energy", not failures, rows, summary, failures)


SUITES = {
    "lp": suite_lp,
    "commutator": suite_commutator,
    "gn": suite_gn,
    "linflow": suite_linflow,
    "qkernel": suite_qkernel,
    "energy": suite_energy,
}


def run_suite(name: str, **kwargs) -> SuiteResult:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    return SUITES[name](**kwargs)
