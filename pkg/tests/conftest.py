"""Shared fixtures and field builders for the test suite."""

import numpy as np
import pytest

from hallmhd.spectral import (
    Grid,
    PhysicalVectorField,
    SpectralVectorField,
    leray_project,
    spectral_from_raw,
    transform_forward,
)


def random_field(grid: Grid, seed: int, decay: float = 2.0, band_fraction: float = 1.0):
    """Random real-valued band-limited field with a power-law spectrum.

    band_fraction < 1 confines the spectrum to a fraction of the dealias
    ball, which makes quadratic products exactly alias-free.
    """
    rng = np.random.default_rng(seed)
    samples = rng.standard_normal((3, grid.n, grid.n, grid.n))
    raw = transform_forward(PhysicalVectorField(grid, samples)).coefficients
    mag = grid.xi_mag.copy()
    mag[0, 0, 0] = 1.0
    envelope = mag**-decay
    envelope[0, 0, 0] = 0.0
    if band_fraction < 1.0:
        envelope = envelope * (grid.xi_mag <= band_fraction * grid.cutoff)
    return spectral_from_raw(grid, raw * envelope)


def random_divfree(grid: Grid, seed: int, decay: float = 2.0, band_fraction: float = 1.0):
    return leray_project(random_field(grid, seed, decay, band_fraction))


def abc_flow(grid: Grid, a: float = 1.0, b: float = 1.0, c: float = 1.0) -> SpectralVectorField:
    """Unit-mode field with curl W = W (requires box length 2*pi)."""
    xx, yy, zz = grid.collocation_points()
    w = np.stack(
        (
            a * np.sin(zz) + c * np.cos(yy),
            b * np.sin(xx) + a * np.cos(zz),
            c * np.sin(yy) + b * np.cos(xx),
        )
    )
    return transform_forward(PhysicalVectorField(grid, w))


@pytest.fixture(scope="session")
def grid16():
    return Grid(16, box_length=2 * np.pi)


@pytest.fixture(scope="session")
def grid32():
    return Grid(32, box_length=2 * np.pi)
