"""Initial-condition constructors: shell-supported Beltrami data and small
random divergence-free fields.

The Beltrami field is assembled directly in coefficient space.  For each
lattice frequency xi inside the shell 1-eps <= |xi| <= 1+eps, the pair
n(xi) sin(x.xi) + |xi|^(-1) (xi x n) cos(x.xi) is the curl eigen-structure
at xi, so curl g = |xi| g holds exactly mode by mode; the lattice sum
carries the frequency-cell quadrature weight (2*pi/L)^3.

The shell weight combines the radial bump with an angular cap of width
~sqrt(eps) around a reference direction.  The cap gives the weight support
volume ~eps^2, which is what makes the coefficient-norm scalings
l2 ~ eps^(-1/2) log(1/eps) and l1 ~ eps^(1/2) log(1/eps) hold; a purely
radial bump cannot satisfy both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .spectral import (
    ConfigError,
    Grid,
    PhysicalVectorField,
    SpectralVectorField,
    l2_norm,
    leray_project,
    multiplier_norm,
    transform_forward,
)

__all__ = [
    "ShellDataParams",
    "DecomposedData",
    "SupportCheck",
    "default_radial_profile",
    "beltrami_shell_field",
    "amplified_shell_field",
    "coefficient_norms",
    "random_divfree_field",
    "make_decomposed_data",
    "smallness_functional",
    "spectral_support_check",
]


def default_radial_profile(epsilon: float) -> Callable[[np.ndarray], np.ndarray]:
    """C^2 bump (1 - ((r-1)/eps)^2)^2 supported on (1-eps, 1+eps)."""

    def profile(r: np.ndarray) -> np.ndarray:
        u = (r - 1.0) / epsilon
        return np.where(np.abs(u) < 1.0, (1.0 - u**2) ** 2, 0.0)

    return profile


@dataclass(frozen=True)
class ShellDataParams:
    """Parameters of the shell-supported data family.

    epsilon is the shell half-width; alpha1/alpha2 scale the amplified
    field inside the velocity/magnetic initial data; tangent_axis is the
    axis e of the frame n(xi) = (xi x e)/|xi x e| (in-shell modes parallel
    to e are zeroed); cap_center/cap_scale set the angular concentration
    (cap half-angle = cap_scale * sqrt(eps)); delta is the smallness
    budget the assembled data is reported against.
    """

    epsilon: float
    alpha1: float = 1.0
    alpha2: float = 1.0
    seed: int = 0
    delta: float = 1.0
    tangent_axis: tuple[float, float, float] = (0.0, 0.0, 1.0)
    cap_center: tuple[float, float, float] = (1.0, 0.0, 0.0)
    cap_scale: float = 1.0
    amplitude: float = 1.0
    radial_profile: Callable[[np.ndarray], np.ndarray] | None = field(
        default=None, compare=False
    )

    def __post_init__(self):
        if not 0.0 < self.epsilon <= 0.5:
            raise ConfigError(f"epsilon must be in (0, 1/2], got {self.epsilon}")
        if not self.delta > 0:
            raise ConfigError(f"delta must be positive, got {self.delta}")
        e = np.asarray(self.tangent_axis, dtype=float)
        c = np.asarray(self.cap_center, dtype=float)
        if np.linalg.norm(e) == 0 or np.linalg.norm(c) == 0:
            raise ConfigError("tangent_axis and cap_center must be nonzero")
        cross = np.linalg.norm(np.cross(e / np.linalg.norm(e), c / np.linalg.norm(c)))
        if cross < 1e-8:
            raise ConfigError("cap_center must not be parallel to tangent_axis")

    def shell_weight(self, xi: np.ndarray, xi_mag: np.ndarray) -> np.ndarray:
        """psi evaluated on frequency samples: radial bump times angular cap."""
        radial = self.radial_profile or default_radial_profile(self.epsilon)
        w = self.amplitude * radial(xi_mag)
        center = np.asarray(self.cap_center, dtype=float)
        center /= np.linalg.norm(center)
        with np.errstate(invalid="ignore", divide="ignore"):
            cosang = np.where(
                xi_mag > 0,
                (xi[0] * center[0] + xi[1] * center[1] + xi[2] * center[2]) / xi_mag,
                0.0,
            )
        theta = np.arccos(np.clip(cosang, -1.0, 1.0))
        theta_c = self.cap_scale * math.sqrt(self.epsilon)
        u = theta / theta_c
        cap = np.where(u < 1.0, (1.0 - u**2) ** 2, 0.0)
        return w * cap


class SupportCheck(NamedTuple):
    ok: bool
    leaked_fraction: float


def spectral_support_check(field: SpectralVectorField, lo: float, hi: float) -> SupportCheck:
    """True iff the coefficient energy outside lo <= |xi| <= hi is negligible."""
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    power = np.sum(np.abs(field.coefficients) ** 2, axis=0)
    total = float(np.sum(power))
    if total == 0.0:
        return SupportCheck(True, 0.0)
    mag = field.grid.xi_mag
    outside = float(np.sum(power[(mag < lo) | (mag > hi)]))
    fraction = outside / total
    return SupportCheck(fraction < 1e-24, fraction)


def beltrami_shell_field(grid: Grid, params: ShellDataParams) -> SpectralVectorField:
    """Divergence-free field with curl g = |xi| g per mode, shell-supported."""
    if 1.0 + params.epsilon > grid.cutoff:
        raise ConfigError(
            f"shell top 1+eps = {1 + params.epsilon:.4f} exceeds dealias cutoff "
            f"{grid.cutoff:.4f}; refine the grid"
        )
    x1, x2, x3 = grid.xi
    mag = grid.xi_mag
    n = grid.n
    xi_full = (
        np.broadcast_to(x1, mag.shape),
        np.broadcast_to(x2, mag.shape),
        np.broadcast_to(x3, mag.shape),
    )
    psi = params.shell_weight(xi_full, mag)

    e = np.asarray(params.tangent_axis, dtype=float)
    e /= np.linalg.norm(e)
    idx = np.nonzero(psi > 0)
    if idx[0].size == 0:
        raise ConfigError("shell contains no lattice points; refine the grid")

    xi = np.stack([xi_full[i][idx] for i in range(3)])  # (3, m)
    mags = mag[idx]
    weights = psi[idx]
    cross_e = np.stack(
        (
            xi[1] * e[2] - xi[2] * e[1],
            xi[2] * e[0] - xi[0] * e[2],
            xi[0] * e[1] - xi[1] * e[0],
        )
    )
    cross_norm = np.sqrt(np.sum(cross_e**2, axis=0))
    good = cross_norm > 1e-12
    xi, mags, weights, cross_e, cross_norm = (
        xi[:, good],
        mags[good],
        weights[good],
        cross_e[:, good],
        cross_norm[good],
    )
    idx = tuple(i[good] for i in idx)
    nvec = cross_e / cross_norm
    xhat = xi / mags
    mvec = np.stack(
        (
            xhat[1] * nvec[2] - xhat[2] * nvec[1],
            xhat[2] * nvec[0] - xhat[0] * nvec[2],
            xhat[0] * nvec[1] - xhat[1] * nvec[0],
        )
    )
    # sin part -> -i/2 at +xi; cos part -> 1/2 at +xi
    contrib = grid.mode_volume * weights * (-0.5j * nvec + 0.5 * mvec)

    coeffs = np.zeros((3, n, n, n), dtype=np.complex128)
    neg = tuple((-i) % n for i in idx)
    for comp in range(3):
        np.add.at(coeffs[comp], idx, contrib[comp])
        np.add.at(coeffs[comp], neg, np.conj(contrib[comp]))
    return SpectralVectorField(grid, coeffs)


def amplified_shell_field(grid: Grid, params: ShellDataParams) -> SpectralVectorField:
    """eps^(-3/2) log(1/eps) times the shell Beltrami field."""
    g = beltrami_shell_field(grid, params)
    scale = params.epsilon**-1.5 * math.log(1.0 / params.epsilon)
    return SpectralVectorField(grid, scale * g.coefficients)


def coefficient_norms(field: SpectralVectorField) -> tuple[float, float]:
    """Lattice-quadrature L1 and L2 norms of the coefficient function.

    Each mode carries the frequency-cell weight (2*pi/L)^3; the pointwise
    magnitude is the Euclidean norm over the three components.
    """
    w = field.grid.mode_volume
    mag = np.sqrt(np.sum(np.abs(field.coefficients) ** 2, axis=0))
    l1 = w * float(np.sum(mag))
    l2 = math.sqrt(w * float(np.sum(mag**2)))
    return l1, l2


def random_divfree_field(
    grid: Grid,
    s: float,
    target_hs_norm: float,
    spectrum_decay: float = 2.0,
    seed: int = 0,
) -> SpectralVectorField:
    """Reproducible random divergence-free field with an exact H^s norm.

    Random phases come from real white noise (which makes the coefficients
    Hermitian by construction), shaped by a |xi|^(-decay) envelope,
    projected divergence-free, and rescaled so the inhomogeneous H^s norm
    equals the target.
    """
    if target_hs_norm < 0:
        raise ValueError("target norm must be >= 0")
    if target_hs_norm == 0.0:
        return SpectralVectorField(grid, np.zeros((3, grid.n, grid.n, grid.n), np.complex128))
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal((3, grid.n, grid.n, grid.n))
    raw = transform_forward(PhysicalVectorField(grid, noise)).coefficients
    mag = grid.xi_mag.copy()
    mag[0, 0, 0] = 1.0
    envelope = mag**-spectrum_decay
    envelope[0, 0, 0] = 0.0
    shaped = SpectralVectorField(grid, raw * envelope * grid.dealias_mask)
    projected = leray_project(shaped)
    current = l2_norm(projected) + multiplier_norm(projected, s)
    if current == 0.0:
        raise ConfigError("random field degenerated to zero; change the seed")
    return SpectralVectorField(grid, (target_hs_norm / current) * projected.coefficients)


def smallness_functional(
    u01: SpectralVectorField,
    b01: SpectralVectorField,
    v0: SpectralVectorField,
    epsilon: float,
    s: float = 3.0,
    constant: float = 1.0,
) -> float:
    """Size functional of the decomposed data against which the smallness
    budget is reported:

    (||u01||_Hs^2 + ||b01||_Hs^2 + (eps^(s+1/2) + eps) l2 l1 + l1) exp(C l1)

    with (l1, l2) the coefficient norms of the amplified field.
    """
    if not 0.0 < epsilon <= 0.5:
        raise ValueError(f"epsilon must be in (0, 1/2], got {epsilon}")
    l1, l2 = coefficient_norms(v0)
    hs_u = l2_norm(u01) + multiplier_norm(u01, s)
    hs_b = l2_norm(b01) + multiplier_norm(b01, s)
    base = hs_u**2 + hs_b**2 + (epsilon ** (s + 0.5) + epsilon) * l2 * l1 + l1
    return base * math.exp(constant * l1)


@dataclass(frozen=True)
class DecomposedData:
    """Initial data split into small random parts plus the amplified
    shell field: u0 = u01 + alpha1 v0, b0 = b01 + alpha2 v0."""

    u0: SpectralVectorField
    b0: SpectralVectorField
    u01: SpectralVectorField
    b01: SpectralVectorField
    v0: SpectralVectorField
    params: ShellDataParams
    smallness_value: float


def make_decomposed_data(
    grid: Grid,
    params: ShellDataParams,
    u01_norm: float,
    b01_norm: float,
    s: float = 3.0,
    spectrum_decay: float = 2.0,
    smallness_constant: float = 1.0,
) -> DecomposedData:
    v0 = amplified_shell_field(grid, params)
    u01 = random_divfree_field(grid, s, u01_norm, spectrum_decay, params.seed)
    b01 = random_divfree_field(grid, s, b01_norm, spectrum_decay, params.seed + 1)
    u0 = SpectralVectorField(grid, u01.coefficients + params.alpha1 * v0.coefficients)
    b0 = SpectralVectorField(grid, b01.coefficients + params.alpha2 * v0.coefficients)
    value = smallness_functional(u01, b01, v0, params.epsilon, s, smallness_constant)
    return DecomposedData(u0, b0, u01, b01, v0, params, value)
