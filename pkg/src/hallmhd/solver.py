"""Time integration of the Fourier-truncated Hall-MHD system.

The stiff fractional dissipation is handled by exact per-mode integrating
factors; convection, Lorentz force, and Hall term are advanced explicitly
with a three-stage third-order strong-stability-preserving Runge-Kutta
scheme.  Pressure never appears: incompressibility is enforced by the
projection, re-applied at the end of every step to suppress roundoff
drift.  Modes outside the truncation ball of radius ``galerkin_radius``
(and outside the dealias mask) are zeroed after every stage.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import TYPE_CHECKING

import numpy as np

from .spectral import (
    ConfigError,
    ExponentConfig,
    Grid,
    SpectralVectorField,
    _half_forward,
    _half_inverse,
    _inverse_samples,
)

if TYPE_CHECKING:
    from .diagnostics import RunRecord
    from .linear_flows import LinearFlowPair

__all__ = [
    "SimState",
    "StepControl",
    "BlowUpError",
    "galerkin_truncate",
    "rhs_nonlinear",
    "step",
    "cfl_dt",
    "run",
    "write_checkpoint",
    "read_checkpoint",
]

CHECKPOINT_MAGIC = b"HMHD"
CHECKPOINT_VERSION = 1


class BlowUpError(RuntimeError):
    """Raised when coefficients stop being finite; carries the last good state."""

    def __init__(self, message: str, state: "SimState"):
        super().__init__(message)
        self.state = state


@dataclass(frozen=True)
class SimState:
    """Immutable snapshot of the spectral state at one time level."""

    u: SpectralVectorField
    b: SpectralVectorField
    time: float
    step_count: int
    exponents: ExponentConfig
    galerkin_radius: float = np.inf

    @property
    def grid(self) -> Grid:
        return self.u.grid


@dataclass(frozen=True)
class StepControl:
    dt: float = 0.02
    cfl_safety: float = 0.3
    mode: str = "fixed"  # fixed | adaptive
    nonlinear_enabled: bool = True
    hall_enabled: bool = True
    dt_max: float = 0.05
    dt_floor: float = 1e-6

    def __post_init__(self):
        if self.dt <= 0:
            raise ConfigError(f"dt must be positive, got {self.dt}")
        if not 0 < self.cfl_safety <= 1:
            raise ConfigError(f"cfl_safety must be in (0, 1], got {self.cfl_safety}")
        if self.mode not in ("fixed", "adaptive"):
            raise ConfigError(f"mode must be fixed or adaptive, got {self.mode!r}")


@lru_cache(maxsize=8)
def _ball_mask(grid: Grid, radius: float) -> np.ndarray:
    if not np.isfinite(radius):
        return grid.dealias_mask
    mask = grid.dealias_mask & (grid.xi_mag <= radius)
    mask.flags.writeable = False
    return mask


def galerkin_truncate(state: SimState, radius: float) -> SimState:
    """Zero all modes with |xi| > radius in both fields."""
    if radius <= 0:
        raise ValueError(f"radius must be positive, got {radius}")
    mask = _ball_mask(state.grid, radius)
    return replace(
        state,
        u=SpectralVectorField(state.grid, state.u.coefficients * mask),
        b=SpectralVectorField(state.grid, state.b.coefficients * mask),
        galerkin_radius=min(radius, state.galerkin_radius),
    )


@lru_cache(maxsize=8)
def _inverse_mag2(grid: Grid) -> np.ndarray:
    mag2 = grid.xi_mag**2
    inv = np.zeros_like(mag2)
    nz = mag2 > 0
    inv[nz] = 1.0 / mag2[nz]
    inv.flags.writeable = False
    return inv


def _leray_inplace(c: np.ndarray, grid: Grid) -> None:
    x1, x2, x3 = grid.xi
    dot = (x1 * c[0] + x2 * c[1] + x3 * c[2]) * _inverse_mag2(grid)
    c[0] -= x1 * dot
    c[1] -= x2 * dot
    c[2] -= x3 * dot


# --- half-spectrum pipeline -------------------------------------------------
# The stepping hot path works on the rfft layout (n, n, n/2 + 1), which
# halves transform and array traffic; Hermitian symmetry is implied by the
# layout.  States convert at the step boundary; public fields remain full.


@lru_cache(maxsize=8)
class _HalfGeometry:
    def __init__(self, grid: Grid):
        n = grid.n
        h = n // 2 + 1
        base = 2.0 * np.pi / grid.box_length * grid.wavenumbers
        self.h = h
        self.x1 = base.reshape(-1, 1, 1).copy()
        self.x2 = base.reshape(1, -1, 1).copy()
        self.x3 = (2.0 * np.pi / grid.box_length) * np.arange(h, dtype=float).reshape(1, 1, -1)
        self.mag = np.sqrt(self.x1**2 + self.x2**2 + self.x3**2)
        mag2 = self.mag**2
        self.inv_mag2 = np.zeros_like(mag2)
        nz = mag2 > 0
        self.inv_mag2[nz] = 1.0 / mag2[nz]
        k = grid.wavenumbers
        cut = grid.dealias_fraction * n / 2.0
        keep = (np.abs(k) <= cut) & (k != -(n // 2))
        keep3 = keep[:h].copy()
        keep3[-1] = False  # the k3 = n/2 plane is always dropped
        self.dealias = (
            keep.reshape(-1, 1, 1) & keep.reshape(1, -1, 1) & keep3.reshape(1, 1, -1)
        )


@lru_cache(maxsize=8)
def _ball_mask_half(grid: Grid, radius: float) -> np.ndarray:
    geo = _HalfGeometry(grid)
    if not np.isfinite(radius):
        return geo.dealias
    mask = geo.dealias & (geo.mag <= radius)
    mask.flags.writeable = False
    return mask


@lru_cache(maxsize=4)
def _integrating_factors_half(grid: Grid, dt: float, alpha: float, beta: float):
    """Exact per-mode diffusion factors for full and half substeps."""
    geo = _HalfGeometry(grid)
    with np.errstate(over="ignore"):
        sig_u = geo.mag ** (2.0 * alpha)
        sig_b = geo.mag ** (2.0 * beta)
        factors = (
            np.exp(-dt * sig_u),
            np.exp(-dt * sig_b),
            np.exp(-0.5 * dt * sig_u),
            np.exp(-0.5 * dt * sig_b),
            np.exp(0.5 * dt * sig_u),
            np.exp(0.5 * dt * sig_b),
        )
    for f in factors:
        f.flags.writeable = False
    return factors


def _to_half(full: np.ndarray, n: int) -> np.ndarray:
    return np.ascontiguousarray(full[..., : n // 2 + 1])


def _to_full(half: np.ndarray, n: int) -> np.ndarray:
    """Rebuild the full spectrum from the rfft layout by Hermitian
    reflection of the interior k3 planes."""
    h = n // 2 + 1
    full = np.empty(half.shape[:-3] + (n, n, n), dtype=np.complex128)
    full[..., :h] = half
    neg = (-np.arange(n)) % n
    src3 = n - np.arange(h, n)  # k3 tail maps to 1 .. n/2 - 1
    tail = np.conj(half[..., src3][..., neg, :, :][..., :, neg, :])
    full[..., h:] = tail
    return full


def _half_tendencies(
    u_hat: np.ndarray, b_hat: np.ndarray, grid: Grid, control: StepControl, mask: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Fused dealiased evaluation of the convective, Lorentz, and Hall
    tendencies in the half-spectrum layout (dissipation excluded; handled
    by the integrating factor).  Gradients stream one derivative axis at a
    time to keep the working set small; this is the solver's hot path."""
    n = grid.n
    if not control.nonlinear_enabled:
        z = np.zeros_like(u_hat)
        return z, z.copy()
    geo = _HalfGeometry(grid)
    x = (geo.x1, geo.x2, geo.x3)
    u = _half_inverse(u_hat, n)
    b = _half_inverse(b_hat, n)

    # m_u = -(u.grad)u + (b.grad)b ; m_b = -(u.grad)b + (b.grad)u
    m_u = np.zeros_like(u)
    m_b = np.zeros_like(u)
    for k in range(3):
        ixk = 1j * x[k]
        du_k = _half_inverse(ixk * u_hat, n)  # d_k of all three u comps
        db_k = _half_inverse(ixk * b_hat, n)
        m_u -= u[k] * du_k
        m_u += b[k] * db_k
        m_b -= u[k] * db_k
        m_b += b[k] * du_k
    du = _half_forward(m_u)
    db = _half_forward(m_b)

    if control.hall_enabled:
        x1, x2, x3 = x
        j_hat = np.stack(
            (
                1j * (x2 * b_hat[2] - x3 * b_hat[1]),
                1j * (x3 * b_hat[0] - x1 * b_hat[2]),
                1j * (x1 * b_hat[1] - x2 * b_hat[0]),
            )
        )
        j = _half_inverse(j_hat, n)
        jxb = np.stack(
            (
                j[1] * b[2] - j[2] * b[1],
                j[2] * b[0] - j[0] * b[2],
                j[0] * b[1] - j[1] * b[0],
            )
        )
        jxb_hat = _half_forward(jxb)
        db[0] -= 1j * (x2 * jxb_hat[2] - x3 * jxb_hat[1])
        db[1] -= 1j * (x3 * jxb_hat[0] - x1 * jxb_hat[2])
        db[2] -= 1j * (x1 * jxb_hat[1] - x2 * jxb_hat[0])

    du *= mask
    db *= mask
    # project the velocity tendency (pressure elimination)
    x1, x2, x3 = x
    dot = (x1 * du[0] + x2 * du[1] + x3 * du[2]) * geo.inv_mag2
    du[0] -= x1 * dot
    du[1] -= x2 * dot
    du[2] -= x3 * dot
    return du, db


def rhs_nonlinear(state: SimState, control: StepControl | None = None):
    """Projected, truncated nonlinear tendencies (du, db) as fields."""
    control = control or StepControl()
    n = state.grid.n
    mask = _ball_mask_half(state.grid, state.galerkin_radius)
    du, db = _half_tendencies(
        _to_half(state.u.coefficients, n),
        _to_half(state.b.coefficients, n),
        state.grid,
        control,
        mask,
    )
    return (
        SpectralVectorField(state.grid, _to_full(du, n)),
        SpectralVectorField(state.grid, _to_full(db, n)),
    )


def step(state: SimState, control: StepControl) -> SimState:
    """One integrating-factor SSP-RK3 step of size control.dt."""
    grid = state.grid
    n = grid.n
    dt = control.dt
    mask = _ball_mask_half(grid, state.galerkin_radius)
    u0 = _to_half(state.u.coefficients, n)
    b0 = _to_half(state.b.coefficients, n)
    e_u, e_b, eh_u, eh_b, ehi_u, ehi_b = _integrating_factors_half(
        grid, dt, state.exponents.alpha, state.exponents.beta
    )

    # overflow inside a diverging step is caught by the finite check below;
    # tendency buffers are consumed in place to limit memory traffic
    with np.errstate(over="ignore", invalid="ignore"):
        du, db = _half_tendencies(u0, b0, grid, control, mask)
        for buf, prev, fac in ((du, u0, e_u), (db, b0, e_b)):
            buf *= dt
            buf += prev
            buf *= fac
        u1, b1 = du, db

        du, db = _half_tendencies(u1, b1, grid, control, mask)
        for buf, stage, base, fac_i, fac_h in (
            (du, u1, u0, ehi_u, eh_u),
            (db, b1, b0, ehi_b, eh_b),
        ):
            buf *= dt
            buf += stage
            buf *= fac_i
            buf *= 0.25
            buf += (0.75 * fac_h) * base
        u2, b2 = du, db

        du, db = _half_tendencies(u2, b2, grid, control, mask)
        for buf, stage, base, fac_f, fac_h in (
            (du, u2, u0, e_u, eh_u),
            (db, b2, b0, e_b, eh_b),
        ):
            buf *= dt
            buf += stage
            buf *= fac_h
            buf *= 2.0 / 3.0
            buf += (fac_f / 3.0) * base
        u_half, b_half = du, db

        u_half *= mask
        b_half *= mask
        geo = _HalfGeometry(grid)
        dot = (geo.x1 * u_half[0] + geo.x2 * u_half[1] + geo.x3 * u_half[2]) * geo.inv_mag2
        u_half[0] -= geo.x1 * dot
        u_half[1] -= geo.x2 * dot
        u_half[2] -= geo.x3 * dot

    if not (np.all(np.isfinite(u_half)) and np.all(np.isfinite(b_half))):
        raise BlowUpError(f"non-finite coefficients at t={state.time + dt}", state)

    return replace(
        state,
        u=SpectralVectorField(grid, _to_full(u_half, n)),
        b=SpectralVectorField(grid, _to_full(b_half, n)),
        time=state.time + dt,
        step_count=state.step_count + 1,
    )


def cfl_dt(state: SimState, control: StepControl) -> tuple[float, bool]:
    """Advective and whistler-wave step bound; returns (dt, floored flag).

    dt = safety * min(h/max|u|, h/max|b|, 1/(max|b| k_max^2)) capped at
    dt_max; the quadratic k_max term is the Hall (whistler) constraint.
    """
    grid = state.grid
    u_max = float(np.max(np.abs(_inverse_samples(state.u.coefficients, grid.n))))
    b_max = float(np.max(np.abs(_inverse_samples(state.b.coefficients, grid.n))))
    h = grid.spacing
    k_max = min(state.galerkin_radius, np.sqrt(3.0) * grid.cutoff)
    candidates = [control.dt_max]
    if u_max > 0:
        candidates.append(control.cfl_safety * h / u_max)
    if b_max > 0:
        candidates.append(control.cfl_safety * h / b_max)
        if control.hall_enabled:
            candidates.append(control.cfl_safety / (b_max * k_max**2))
    dt = min(candidates)
    if dt < control.dt_floor:
        return control.dt_floor, True
    return dt, False


def run(
    initial: SimState,
    control: StepControl,
    t_end: float,
    diagnostics_every: int = 1,
    checkpoint_every: int = 0,
    checkpoint_dir=None,
    flow: "LinearFlowPair | None" = None,
) -> "RunRecord":
    """Advance to t_end, emitting energy reports every diagnostics_every
    steps and optional checkpoints; a blow-up terminates gracefully with
    the partial record flagged."""
    from . import diagnostics

    if t_end <= initial.time:
        raise ConfigError(f"t_end={t_end} must exceed initial time {initial.time}")

    state = _projected(galerkin_truncate(initial, initial.galerkin_radius))
    acc = diagnostics.DissipationAccumulator()
    reports = [diagnostics.report(state, state.exponents, flow=flow, acc=acc, dt=control.dt)]
    initial_hs = np.sqrt(reports[0].hs_u + reports[0].hs_b)
    checkpoints: list[str] = []
    status = "completed"
    current = control

    while state.time < t_end - 1e-12:
        if current.mode == "adaptive":
            dt, _ = cfl_dt(state, current)
            dt = min(dt, t_end - state.time)
            current = replace(current, dt=dt)
        elif state.time + current.dt > t_end + 1e-12:
            current = replace(current, dt=t_end - state.time)
        try:
            state = step(state, current)
        except BlowUpError as err:
            state = err.state
            status = "blow_up"
            break
        if state.step_count % diagnostics_every == 0 or state.time >= t_end - 1e-12:
            rep = diagnostics.report(state, state.exponents, flow=flow, acc=acc, dt=current.dt)
            reports.append(rep)
            hs_now = np.sqrt(rep.hs_u + rep.hs_b)
            if initial_hs > 0 and hs_now > 1e6 * initial_hs:
                status = "blow_up"
                break
        if checkpoint_every and checkpoint_dir and state.step_count % checkpoint_every == 0:
            path = f"{checkpoint_dir}/state_{state.step_count:08d}.hmhd"
            write_checkpoint(state, path)
            checkpoints.append(path)

    return diagnostics.RunRecord(
        config={},
        reports=reports,
        checkpoint_paths=checkpoints,
        status=status,
        final_state=state,
    )


def _projected(state: SimState) -> SimState:
    u = state.u.coefficients.copy()
    b = state.b.coefficients.copy()
    _leray_inplace(u, state.grid)
    _leray_inplace(b, state.grid)
    return replace(
        state,
        u=SpectralVectorField(state.grid, u),
        b=SpectralVectorField(state.grid, b),
    )


def write_checkpoint(state: SimState, path) -> None:
    """Binary snapshot: magic, version, header, then six complex arrays
    (u then b, components x/y/z), full N^3 row-major, little-endian."""
    grid = state.grid
    header = struct.pack(
        "<4sIIdddddd",
        CHECKPOINT_MAGIC,
        CHECKPOINT_VERSION,
        grid.n,
        grid.box_length,
        state.time,
        state.exponents.alpha,
        state.exponents.beta,
        state.exponents.s,
        float(state.galerkin_radius),
    )
    with open(path, "wb") as fh:
        fh.write(header)
        for field in (state.u, state.b):
            for comp in range(3):
                fh.write(np.ascontiguousarray(field.coefficients[comp], dtype="<c16").tobytes())


def read_checkpoint(path) -> SimState:
    header_size = struct.calcsize("<4sIIdddddd")
    with open(path, "rb") as fh:
        header = fh.read(header_size)
        magic, version, n, box, time, alpha, beta, s, radius = struct.unpack(
            "<4sIIdddddd", header
        )
        if magic != CHECKPOINT_MAGIC:
            raise ConfigError(f"not a checkpoint file: bad magic {magic!r}")
        if version != CHECKPOINT_VERSION:
            raise ConfigError(f"unsupported checkpoint version {version}")
        grid = Grid(n, box_length=box)
        arrays = []
        count = n**3
        for _ in range(6):
            buf = np.frombuffer(fh.read(16 * count), dtype="<c16").reshape(n, n, n)
            arrays.append(buf.astype(np.complex128))
    u = SpectralVectorField(grid, np.stack(arrays[:3]))
    b = SpectralVectorField(grid, np.stack(arrays[3:]))
    exponents = ExponentConfig(alpha=alpha, beta=beta, s=s)
    return SimState(u=u, b=b, time=time, step_count=0, exponents=exponents, galerkin_radius=radius)
