"""Periodic-box spectral representation of 3D vector fields and operators.

Fields live on a cubic lattice of N^3 collocation points with period L.
Spectral coefficients follow the amplitude convention: the coefficient of
cos(xi.x) with unit amplitude is 1/2 at +/-xi, so transform_forward is
fftn/N^3.  All quadratic terms (advection, Hall term, cross products) are
evaluated pseudo-spectrally and dealiased with the 2/3 rule, which makes
them exact convolutions on the retained modes.

Every operation is a pure function; constructed fields are immutable
(backing arrays are marked read-only) and safe to share across threads.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.fft

__all__ = [
    "ConfigError",
    "Grid",
    "ExponentConfig",
    "SpectralVectorField",
    "SpectralScalarField",
    "PhysicalVectorField",
    "set_fft_workers",
    "get_fft_workers",
    "transform_forward",
    "transform_inverse",
    "fractional_laplacian",
    "leray_project",
    "curl",
    "divergence",
    "gradient",
    "advect",
    "hall_term",
    "cross_product",
    "inner_product",
    "l2_norm",
    "multiplier_norm",
    "pressure_recover",
    "regrid",
    "hermitian_residual",
    "divergence_residual",
]


class ConfigError(ValueError):
    """Invalid grid/field configuration (shape or grid mismatch, bad sizes)."""


_fft_workers = os.cpu_count() or 1


def set_fft_workers(n: int) -> None:
    """Set the worker-thread hint passed to the FFT backend."""
    global _fft_workers
    _fft_workers = max(1, int(n))


def get_fft_workers() -> int:
    return _fft_workers


def _fftn(a: np.ndarray, norm: str = "backward") -> np.ndarray:
    return scipy.fft.fftn(a, axes=(-3, -2, -1), workers=_fft_workers, norm=norm)


def _ifftn(a: np.ndarray, norm: str = "backward") -> np.ndarray:
    return scipy.fft.ifftn(a, axes=(-3, -2, -1), workers=_fft_workers, norm=norm)


def _freeze(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class Grid:
    """Cubic periodic lattice: N points per axis, period L, 2/3-rule mask.

    Lattice frequencies are xi = (2*pi/L) * k for integer triples k in the
    centered range.  The dealias mask zeroes every mode with any
    |k_i| > dealias_fraction * N/2 and the whole Nyquist plane.
    """

    n: int
    box_length: float = 32.0 * np.pi
    dealias_fraction: float = 2.0 / 3.0

    def __post_init__(self):
        if self.n % 2 != 0 or self.n < 8:
            raise ConfigError(f"points_per_axis must be even and >= 8, got {self.n}")
        if not self.box_length > 0:
            raise ConfigError(f"box_length must be positive, got {self.box_length}")
        if not 0 < self.dealias_fraction <= 1:
            raise ConfigError(
                f"dealias_fraction must be in (0, 1], got {self.dealias_fraction}"
            )

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """Integer wavenumbers along one axis in FFT order."""
        return _freeze(np.fft.fftfreq(self.n, d=1.0 / self.n))

    @cached_property
    def xi(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Broadcastable frequency components (2*pi/L)*k along each axis."""
        base = 2.0 * np.pi / self.box_length * self.wavenumbers
        return (
            _freeze(base.reshape(-1, 1, 1).copy()),
            _freeze(base.reshape(1, -1, 1).copy()),
            _freeze(base.reshape(1, 1, -1).copy()),
        )

    @cached_property
    def xi_mag(self) -> np.ndarray:
        x1, x2, x3 = self.xi
        return _freeze(np.sqrt(x1**2 + x2**2 + x3**2))

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        k = self.wavenumbers
        cut = self.dealias_fraction * self.n / 2.0
        keep1 = (np.abs(k) <= cut) & (k != -self.n // 2)
        return _freeze(
            keep1.reshape(-1, 1, 1)
            & keep1.reshape(1, -1, 1)
            & keep1.reshape(1, 1, -1)
        )

    @property
    def cutoff(self) -> float:
        """Largest |xi| along an axis kept by the dealias mask."""
        return (
            2.0 * np.pi / self.box_length * self.dealias_fraction * self.n / 2.0
        )

    @property
    def spacing(self) -> float:
        """Collocation spacing L/N."""
        return self.box_length / self.n

    @property
    def mode_volume(self) -> float:
        """Frequency-space cell volume (2*pi/L)^3, the lattice quadrature weight."""
        return (2.0 * np.pi / self.box_length) ** 3

    def collocation_points(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        x = np.arange(self.n) * self.spacing
        return np.meshgrid(x, x, x, indexing="ij")


@dataclass(frozen=True)
class ExponentConfig:
    """Dissipation exponents (alpha for velocity, beta for the magnetic
    field) and the Sobolev regularity index s."""

    alpha: float = 1.0
    beta: float = 0.5
    s: float = 3.0

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigError(f"alpha must be in [0, 1], got {self.alpha}")
        if not self.beta > 0:
            raise ConfigError(f"beta must be positive, got {self.beta}")
        if not self.s > 2.5:
            raise ConfigError(f"s must exceed 5/2, got {self.s}")


@dataclass(frozen=True)
class SpectralVectorField:
    """Three complex coefficient arrays indexed by lattice frequency.

    Invariants: Hermitian symmetry (the field is real in physical space)
    and zero Nyquist-plane coefficients.
    """

    grid: Grid
    coefficients: np.ndarray  # shape (3, n, n, n), complex128

    def __post_init__(self):
        c = self.coefficients
        n = self.grid.n
        if c.shape != (3, n, n, n):
            raise ConfigError(f"coefficient shape {c.shape} does not match grid n={n}")
        if c.dtype != np.complex128:
            raise ConfigError(f"coefficients must be complex128, got {c.dtype}")
        _freeze(c)

    def component(self, i: int) -> np.ndarray:
        return self.coefficients[i]


@dataclass(frozen=True)
class SpectralScalarField:
    """A single complex coefficient array on the lattice."""

    grid: Grid
    coefficients: np.ndarray  # shape (n, n, n), complex128

    def __post_init__(self):
        n = self.grid.n
        if self.coefficients.shape != (n, n, n):
            raise ConfigError(
                f"coefficient shape {self.coefficients.shape} does not match grid n={n}"
            )
        _freeze(self.coefficients)


@dataclass(frozen=True)
class PhysicalVectorField:
    """Three real sample arrays on the N^3 collocation lattice."""

    grid: Grid
    samples: np.ndarray  # shape (3, n, n, n), float64

    def __post_init__(self):
        n = self.grid.n
        if self.samples.shape != (3, n, n, n):
            raise ConfigError(f"sample shape {self.samples.shape} does not match grid n={n}")
        if not np.all(np.isfinite(self.samples)):
            raise ConfigError("physical samples must be finite")
        _freeze(self.samples)


def _require_same_grid(a, b) -> Grid:
    if a.grid != b.grid:
        raise ConfigError("fields live on different grids")
    return a.grid


def spectral_from_raw(grid: Grid, coeffs: np.ndarray, mask: bool = True) -> SpectralVectorField:
    """Wrap raw coefficients, optionally applying the dealias mask."""
    c = np.ascontiguousarray(coeffs, dtype=np.complex128)
    if mask:
        c = c * grid.dealias_mask
    return SpectralVectorField(grid, c)


def zero_field(grid: Grid) -> SpectralVectorField:
    return SpectralVectorField(grid, np.zeros((3, grid.n, grid.n, grid.n), dtype=np.complex128))


def transform_forward(pfield: PhysicalVectorField) -> SpectralVectorField:
    """Collocation samples -> spectral coefficients (fftn / N^3)."""
    c = _fftn(pfield.samples, norm="forward")
    return SpectralVectorField(pfield.grid, np.ascontiguousarray(c))


def transform_inverse(sfield: SpectralVectorField) -> PhysicalVectorField:
    """Spectral coefficients -> real collocation samples."""
    s = _ifftn(sfield.coefficients, norm="forward").real
    return PhysicalVectorField(sfield.grid, np.ascontiguousarray(s))


def _inverse_samples(coeffs: np.ndarray, n: int) -> np.ndarray:
    """Raw coefficients -> real samples, without wrapping."""
    return np.ascontiguousarray(_ifftn(coeffs, norm="forward").real)


def _forward_coeffs(samples: np.ndarray) -> np.ndarray:
    """Raw real samples -> coefficients, without wrapping."""
    return _fftn(samples, norm="forward")


def _half_forward(samples: np.ndarray) -> np.ndarray:
    """Real samples -> half-spectrum (rfft layout) coefficients."""
    return scipy.fft.rfftn(samples, axes=(-3, -2, -1), workers=_fft_workers, norm="forward")


def _half_inverse(half: np.ndarray, n: int) -> np.ndarray:
    """Half-spectrum coefficients -> real samples."""
    return scipy.fft.irfftn(
        half, s=(n, n, n), axes=(-3, -2, -1), workers=_fft_workers, norm="forward"
    )


def fractional_laplacian(sfield: SpectralVectorField, gamma: float) -> SpectralVectorField:
    """Apply the Fourier multiplier |xi|^(2*gamma); identity when gamma == 0."""
    if not np.isfinite(gamma) or gamma < 0:
        raise ValueError(f"gamma must be finite and >= 0, got {gamma}")
    if gamma == 0:
        return sfield
    mult = sfield.grid.xi_mag ** (2.0 * gamma)
    if gamma > 0:
        mult = mult.copy()
        mult[0, 0, 0] = 0.0
    return SpectralVectorField(sfield.grid, sfield.coefficients * mult)


def semigroup_factor(grid: Grid, t: float, gamma: float) -> np.ndarray:
    """Per-mode decay factors exp(-t |xi|^(2*gamma))."""
    if t < 0:
        raise ValueError(f"time must be >= 0, got {t}")
    return np.exp(-t * grid.xi_mag ** (2.0 * gamma))


def leray_project(sfield: SpectralVectorField) -> SpectralVectorField:
    """Per-mode projection (Id - xi xi^T / |xi|^2); zero mode unchanged."""
    grid = sfield.grid
    x1, x2, x3 = grid.xi
    mag2 = grid.xi_mag**2
    inv = np.zeros_like(mag2)
    nz = mag2 > 0
    inv[nz] = 1.0 / mag2[nz]
    c = sfield.coefficients
    dot = (x1 * c[0] + x2 * c[1] + x3 * c[2]) * inv
    out = np.stack((c[0] - x1 * dot, c[1] - x2 * dot, c[2] - x3 * dot))
    return SpectralVectorField(grid, out)


def curl(sfield: SpectralVectorField) -> SpectralVectorField:
    """Per-mode i*xi x coefficients."""
    grid = sfield.grid
    x1, x2, x3 = grid.xi
    c = sfield.coefficients
    out = np.stack(
        (
            1j * (x2 * c[2] - x3 * c[1]),
            1j * (x3 * c[0] - x1 * c[2]),
            1j * (x1 * c[1] - x2 * c[0]),
        )
    )
    return SpectralVectorField(grid, out)


def divergence(sfield: SpectralVectorField) -> SpectralScalarField:
    """Per-mode i*xi . coefficients."""
    grid = sfield.grid
    x1, x2, x3 = grid.xi
    c = sfield.coefficients
    return SpectralScalarField(grid, 1j * (x1 * c[0] + x2 * c[1] + x3 * c[2]))


def gradient(scalar: SpectralScalarField) -> SpectralVectorField:
    grid = scalar.grid
    x1, x2, x3 = grid.xi
    c = scalar.coefficients
    return SpectralVectorField(grid, np.stack((1j * x1 * c, 1j * x2 * c, 1j * x3 * c)))


def _grad_components(coeffs: np.ndarray, grid: Grid) -> np.ndarray:
    """Physical-space gradients d_i f_j, shape (3, 3, n, n, n); index [i, j]."""
    x = grid.xi
    n = grid.n
    out = np.empty((3, 3, n, n, n))
    for i in range(3):
        out[i] = _inverse_samples(1j * x[i] * coeffs, n)
    return out


def advect(velocity: SpectralVectorField, target: SpectralVectorField) -> SpectralVectorField:
    """(velocity . grad) target, pseudo-spectral with dealiasing."""
    grid = _require_same_grid(velocity, target)
    v = _inverse_samples(velocity.coefficients, grid.n)
    g = _grad_components(target.coefficients, grid)
    prod = v[0] * g[0] + v[1] * g[1] + v[2] * g[2]
    c = _forward_coeffs(prod) * grid.dealias_mask
    return SpectralVectorField(grid, np.ascontiguousarray(c))


def cross_product(a: SpectralVectorField, b: SpectralVectorField) -> SpectralVectorField:
    """Pointwise a x b evaluated in physical space, dealiased."""
    grid = _require_same_grid(a, b)
    pa = _inverse_samples(a.coefficients, grid.n)
    pb = _inverse_samples(b.coefficients, grid.n)
    prod = np.stack(
        (
            pa[1] * pb[2] - pa[2] * pb[1],
            pa[2] * pb[0] - pa[0] * pb[2],
            pa[0] * pb[1] - pa[1] * pb[0],
        )
    )
    c = _forward_coeffs(prod) * grid.dealias_mask
    return SpectralVectorField(grid, np.ascontiguousarray(c))


def hall_term(b: SpectralVectorField, route: str = "cross") -> SpectralVectorField:
    """curl((curl b) x b), the Hall contribution to the induction equation.

    route "cross" forms the current j = curl(b) and the pointwise product
    j x b; route "advective" uses curl((b . grad) b), equivalent because the
    curl annihilates the gradient half of b x (curl b) = grad(b.b)/2 - (b.grad)b.
    """
    if route == "cross":
        j = curl(b)
        return curl(cross_product(j, b))
    if route == "advective":
        return curl(advect(b, b))
    raise ValueError(f"unknown hall route {route!r}")


def inner_product(a: SpectralVectorField, b: SpectralVectorField) -> float:
    """L^2(box) pairing; equals the physical-space integral of a . b."""
    grid = _require_same_grid(a, b)
    return grid.box_length**3 * float(
        np.sum(a.coefficients.real * b.coefficients.real)
        + np.sum(a.coefficients.imag * b.coefficients.imag)
    )


def l2_norm(a: SpectralVectorField) -> float:
    return float(np.sqrt(grid_weighted_power(a)))


def grid_weighted_power(a: SpectralVectorField, weights: np.ndarray | None = None) -> float:
    """box^3-weighted sum of |coeff|^2 (optionally multiplied per mode)."""
    p = np.abs(a.coefficients) ** 2
    if weights is not None:
        p = p * weights
    return a.grid.box_length**3 * float(np.sum(p))


def multiplier_norm(a: SpectralVectorField, s: float) -> float:
    """Direct-multiplier homogeneous norm (sum |xi|^(2s) |coeff|^2)^(1/2)."""
    if s == 0:
        return l2_norm(a)
    w = a.grid.xi_mag ** (2.0 * s)
    w = w.copy()
    w[0, 0, 0] = 0.0
    return float(np.sqrt(grid_weighted_power(a, w)))


def pressure_recover(u: SpectralVectorField, b: SpectralVectorField) -> SpectralScalarField:
    """Solve -Lap P = div(u.grad u - b.grad b) spectrally; zero-mean P.

    Diagnostic only: time stepping enforces incompressibility with the
    projection and never carries P.
    """
    grid = _require_same_grid(u, b)
    nl = advect(u, u).coefficients - advect(b, b).coefficients
    x1, x2, x3 = grid.xi
    div_nl = 1j * (x1 * nl[0] + x2 * nl[1] + x3 * nl[2])
    mag2 = grid.xi_mag**2
    p = np.zeros_like(div_nl)
    nz = mag2 > 0
    p[nz] = div_nl[nz] / mag2[nz]
    return SpectralScalarField(grid, p)


def regrid(sfield: SpectralVectorField, new_grid: Grid) -> SpectralVectorField:
    """Transfer coefficients to a grid of different resolution (same box).

    Shared modes are copied; refinement zero-pads, coarsening truncates.
    """
    if abs(new_grid.box_length - sfield.grid.box_length) > 1e-12 * new_grid.box_length:
        raise ConfigError("regrid requires identical box lengths")
    n_old, n_new = sfield.grid.n, new_grid.n
    m = min(n_old, n_new) // 2
    out = np.zeros((3, n_new, n_new, n_new), dtype=np.complex128)
    sl_old = np.r_[0:m, n_old - m : n_old]
    sl_new = np.r_[0:m, n_new - m : n_new]
    out[np.ix_(range(3), sl_new, sl_new, sl_new)] = sfield.coefficients[
        np.ix_(range(3), sl_old, sl_old, sl_old)
    ]
    out *= new_grid.dealias_mask
    return SpectralVectorField(new_grid, out)


def _conjugate_reflection(c: np.ndarray) -> np.ndarray:
    """conj(coeff(-k)) for an array in FFT index order."""
    rev = c[..., ::-1, ::-1, ::-1]
    return np.conj(np.roll(rev, 1, axis=(-3, -2, -1)))


def hermitian_residual(sfield: SpectralVectorField) -> float:
    """max |coeff(k) - conj(coeff(-k))| over retained modes."""
    c = sfield.coefficients * sfield.grid.dealias_mask
    return float(np.max(np.abs(c - _conjugate_reflection(c))))


def divergence_residual(sfield: SpectralVectorField) -> float:
    """max |i xi . coeff| over modes, normalized by the largest coefficient."""
    d = divergence(sfield).coefficients
    scale = float(np.max(np.abs(sfield.coefficients)))
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(d))) / (scale * max(1.0, float(np.max(sfield.grid.xi_mag))))
