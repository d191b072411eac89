"""Acceptance suite: one test per criterion, each printing a PASS line.

Criteria 1-12 cover the primary component end to end: discrete energy
identity, exact linear decay, small-data and large-data scenario runs,
shell-data construction and scalings, the linear-flow forcing bounds, the
decay-difference kernel, the dyadic decomposition, the commutator probe,
the interpolation inequality, and the Hall-term structure.
"""

import math

import numpy as np
import pytest

from hallmhd.diagnostics import energy_balance_residual
from hallmhd.initial_data import (
    ShellDataParams,
    amplified_shell_field,
    coefficient_norms,
    make_decomposed_data,
    random_divfree_field,
)
from hallmhd.linear_flows import LinearFlowPair, coupling_forcing_integral
from hallmhd.solver import SimState, StepControl, run
from hallmhd.spectral import (
    ExponentConfig,
    Grid,
    PhysicalVectorField,
    SpectralVectorField,
    curl,
    divergence_residual,
    fractional_laplacian,
    hall_term,
    inner_product,
    l2_norm,
    multiplier_norm,
    transform_forward,
)
from hallmhd.suites import (
    loglog_slope,
    suite_commutator,
    suite_gn,
    suite_linflow,
    suite_lp,
    suite_qkernel,
)

from conftest import random_divfree

SMALL = dict(n=64, box=32 * math.pi, alpha=1.0, beta=0.5, s=3.0, norm_each=0.005)


def _small_state(grid):
    u0 = random_divfree_field(grid, SMALL["s"], SMALL["norm_each"], seed=0)
    b0 = random_divfree_field(grid, SMALL["s"], SMALL["norm_each"], seed=1)
    exponents = ExponentConfig(alpha=SMALL["alpha"], beta=SMALL["beta"], s=SMALL["s"])
    return SimState(u=u0, b=b0, time=0.0, step_count=0, exponents=exponents,
                    galerkin_radius=np.inf)


@pytest.fixture(scope="module")
def small_run_dt02():
    grid = Grid(SMALL["n"], box_length=SMALL["box"])
    return run(_small_state(grid), StepControl(dt=0.02), 10.0, diagnostics_every=1)


@pytest.fixture(scope="module")
def small_run_dt01():
    grid = Grid(SMALL["n"], box_length=SMALL["box"])
    return run(_small_state(grid), StepControl(dt=0.01), 1.0, diagnostics_every=1)


@pytest.fixture(scope="module")
def shell_run():
    grid = Grid(128, box_length=32 * math.pi)
    params = ShellDataParams(epsilon=1 / 16, alpha1=1.0, alpha2=1.0)
    data = make_decomposed_data(grid, params, 1.0, 1.0, s=3.0)
    flow = LinearFlowPair(data.v0, alpha1=1.0, alpha2=1.0, alpha=1.0, epsilon=1 / 16)
    exponents = ExponentConfig(alpha=1.0, beta=0.5, s=3.0)
    state = SimState(
        u=data.u0, b=data.b0, time=0.0, step_count=0,
        exponents=exponents, galerkin_radius=grid.cutoff,
    )
    record = run(state, StepControl(dt=0.04), 5.0, diagnostics_every=5, flow=flow)
    return record, data


def test_criterion_01_energy_identity(small_run_dt02, small_run_dt01):
    rows_coarse = [r for r in small_run_dt02.reports if r.time <= 1.0 + 1e-12]
    resid_coarse = energy_balance_residual(rows_coarse)
    resid_fine = energy_balance_residual(small_run_dt01.reports)
    assert resid_coarse < 1e-4
    ratio = resid_coarse / resid_fine
    assert ratio >= 6.0
    print(
        f"ACCEPTANCE 01 energy identity: PASS "
        f"(residual {resid_coarse:.3e}, refinement ratio {ratio:.1f})"
    )


@pytest.mark.parametrize("gamma", [0.5, 1.0])
def test_criterion_02_linear_exactness(gamma):
    grid = Grid(16, box_length=2 * math.pi)
    xx, _, _ = grid.collocation_points()
    f = np.stack((np.zeros_like(xx), np.sin(2 * xx), np.zeros_like(xx)))
    mode = transform_forward(PhysicalVectorField(grid, f))
    exponents = ExponentConfig(alpha=gamma, beta=gamma, s=3.0)
    state = SimState(u=mode, b=mode, time=0.0, step_count=0, exponents=exponents,
                     galerkin_radius=np.inf)
    record = run(state, StepControl(dt=0.02, nonlinear_enabled=False), 1.0)
    final = record.final_state
    expected = math.exp(-1.0 * 2.0 ** (2 * gamma))  # |xi| = 2
    got_u = final.u.coefficients[1][2, 0, 0] / mode.coefficients[1][2, 0, 0]
    got_b = final.b.coefficients[1][2, 0, 0] / mode.coefficients[1][2, 0, 0]
    assert abs(got_u - expected) < 1e-12
    assert abs(got_b - expected) < 1e-12
    print(f"ACCEPTANCE 02 linear exactness (gamma={gamma}): PASS "
          f"(decay error {abs(got_u - expected):.2e})")


def test_criterion_03_small_data_horizon(small_run_dt02):
    reports = small_run_dt02.reports
    assert small_run_dt02.status == "completed"
    assert reports[-1].time == pytest.approx(10.0)
    e0 = reports[0].E_total
    assert all(r.E_total <= 2.0 * e0 for r in reports)
    energies = [r.l2_u + r.l2_b for r in reports]
    assert all(a >= b for a, b in zip(energies, energies[1:]))
    print(
        f"ACCEPTANCE 03 small-data horizon: PASS "
        f"(max E/E0 {max(r.E_total for r in reports) / e0:.4f}, energy monotone)"
    )


def test_criterion_04_large_data_horizon(shell_run):
    record, data = shell_run
    assert record.status == "completed"
    reports = record.reports
    assert reports[-1].time == pytest.approx(5.0)
    hs_u0 = l2_norm(data.u0) + multiplier_norm(data.u0, 3.0)
    hs_u01 = l2_norm(data.u01) + multiplier_norm(data.u01, 3.0)
    assert hs_u0 >= 10.0 * hs_u01
    pert = [r.pert_f_hs + r.pert_h_hs for r in reports]
    assert all(np.isfinite(p) for p in pert)
    assert all(p <= 4.0 * pert[0] for p in pert)
    print(
        f"ACCEPTANCE 04 large-data horizon: PASS "
        f"(norm ratio {hs_u0 / hs_u01:.0f}, max pert growth {max(pert) / pert[0]:.3f})"
    )


def test_criterion_05_beltrami_construction():
    grid = Grid(128, box_length=32 * math.pi)
    g = amplified_shell_field(grid, ShellDataParams(epsilon=1 / 16))
    div = divergence_residual(g)
    beltrami = l2_norm(
        SpectralVectorField(
            grid, curl(g).coefficients - fractional_laplacian(g, 0.5).coefficients
        )
    ) / l2_norm(g)
    assert div < 1e-12
    assert beltrami < 1e-12
    print(f"ACCEPTANCE 05 Beltrami construction: PASS "
          f"(div {div:.2e}, curl-eigen residual {beltrami:.2e})")


def test_criterion_06_shell_norm_scalings():
    grid = Grid(128, box_length=64 * math.pi)
    epsilons = (1 / 8, 1 / 16, 1 / 32)
    l1s, l2s = [], []
    for eps in epsilons:
        v0 = amplified_shell_field(grid, ShellDataParams(epsilon=eps))
        l1, l2 = coefficient_norms(v0)
        l1s.append(l1)
        l2s.append(l2)
    logs = [math.log(1 / e) for e in epsilons]
    band_l2 = [v / (e**-0.5 * lg) for v, e, lg in zip(l2s, epsilons, logs)]
    band_l1 = [v / (e**0.5 * lg) for v, e, lg in zip(l1s, epsilons, logs)]
    assert max(band_l2) / min(band_l2) < 4.0
    assert max(band_l1) / min(band_l1) < 4.0
    # slopes are fitted on the log-compensated norms
    slope_l2 = loglog_slope(epsilons, [v / lg for v, lg in zip(l2s, logs)])
    slope_l1 = loglog_slope(epsilons, [v / lg for v, lg in zip(l1s, logs)])
    assert abs(slope_l2 - (-0.5)) <= 0.3
    assert abs(slope_l1 - 0.5) <= 0.3
    print(
        f"ACCEPTANCE 06 shell norm scalings: PASS "
        f"(slopes {slope_l2:+.3f}/{slope_l1:+.3f}, bands "
        f"{max(band_l2) / min(band_l2):.2f}x/{max(band_l1) / min(band_l1):.2f}x)"
    )


def test_criterion_07_coupling_integral_scaling():
    result = suite_linflow(
        epsilons=(1 / 8, 1 / 16, 1 / 32), n=128, box_length=32 * math.pi,
        alpha=1.0, s=3.0, t_max=15.0, dt_quad=0.05,
    )
    assert result.ok, result.failures
    # degenerate exact zeros on a small shell grid
    grid = Grid(48, box_length=8 * math.pi)
    v0 = amplified_shell_field(grid, ShellDataParams(epsilon=1 / 4))
    same_semigroup = coupling_forcing_integral(
        LinearFlowPair(v0, alpha1=1.0, alpha2=1.0, alpha=0.5), 3.0,
        t_max=5.0, dt_quad=0.25, method="spectral",
    )
    assert same_semigroup.value == 0.0
    no_amp = coupling_forcing_integral(
        LinearFlowPair(v0, alpha1=0.0, alpha2=1.0, alpha=1.0), 3.0,
        t_max=5.0, dt_quad=0.25,
    )
    assert no_amp.value == 0.0
    print(
        f"ACCEPTANCE 07 coupling-forcing integral: PASS "
        f"(normalized band {result.summary['ratio_band']:.2f}x, zeros exact)"
    )


def test_criterion_08_decay_kernel():
    result = suite_qkernel(alpha=1.0, epsilon=1 / 8, t_points=100, shell_samples=10_000)
    assert result.ok, result.failures
    print(
        f"ACCEPTANCE 08 decay kernel: PASS "
        f"(max normalized ratio {result.summary['max_ratio']:.3f}, "
        f"half-shell shrink {result.summary['shrink']:.3f})"
    )


def test_criterion_09_littlewood_paley():
    result = suite_lp(n=32, seeds=20)
    assert result.ok, result.failures
    print(
        f"ACCEPTANCE 09 dyadic decomposition: PASS "
        f"(partition {result.summary['partition_residual']:.2e}, "
        f"reconstruction {result.summary['max_reconstruction']:.2e})"
    )


def test_criterion_10_commutator_bound():
    result = suite_commutator(n=32, seeds=100, j_values=(0, 1, 2, 3, 4))
    assert result.ok, result.failures
    print(
        f"ACCEPTANCE 10 commutator bound: PASS "
        f"(empirical max ratio {result.summary['empirical_max_ratio']:.3f} "
        f"over {result.summary['samples']} samples)"
    )


def test_criterion_11_interpolation_inequality():
    result = suite_gn(n=32, seeds=100)
    assert result.ok, result.failures
    print(
        f"ACCEPTANCE 11 interpolation inequality: PASS "
        f"(max ratio {result.summary['max_ratio']:.12f})"
    )


def test_criterion_12_hall_structure():
    grid = Grid(32, box_length=2 * math.pi)
    worst_cancel = 0.0
    worst_route = 0.0
    for seed in range(50):
        b = random_divfree(grid, 90_000 + seed)
        h = hall_term(b)
        denom = l2_norm(h) * l2_norm(b)
        if denom > 0:
            worst_cancel = max(worst_cancel, abs(inner_product(h, b)) / denom)
        other = hall_term(b, route="advective")
        scale = np.max(np.abs(h.coefficients))
        worst_route = max(
            worst_route, np.max(np.abs(h.coefficients - other.coefficients)) / scale
        )
    assert worst_cancel < 1e-10
    assert worst_route < 1e-10
    print(
        f"ACCEPTANCE 12 Hall structure: PASS "
        f"(cancellation {worst_cancel:.2e}, route agreement {worst_route:.2e})"
    )
