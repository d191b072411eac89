"""Pseudo-spectral Hall-MHD simulator and verification harness.

Core layers:

- ``spectral``: periodic-box fields and constant-coefficient/quadratic operators
- ``littlewood_paley``: dyadic decomposition, Sobolev/Besov norms, estimate probes
- ``initial_data``: shell-supported Beltrami data and randomized small data
- ``linear_flows``: fractional-heat semigroup flows and their interaction forcings
- ``solver``: Galerkin-truncated time integration with integrating-factor RK3
- ``diagnostics``: energy functionals, CSV/JSON persistence
- ``suites``: the property sweeps behind ``hallmhd verify``
- ``cli``: the ``hallmhd`` command line driver
"""

from .diagnostics import EnergyReport, RunRecord, report
from .initial_data import (
    DecomposedData,
    ShellDataParams,
    amplified_shell_field,
    beltrami_shell_field,
    make_decomposed_data,
    random_divfree_field,
)
from .linear_flows import LinearFlowPair, forcing_F, forcing_G, semigroup_apply
from .solver import BlowUpError, SimState, StepControl, run, step
from .spectral import (
    ConfigError,
    ExponentConfig,
    Grid,
    PhysicalVectorField,
    SpectralScalarField,
    SpectralVectorField,
    set_fft_workers,
)

__version__ = "0.1.0"

__all__ = [
    "BlowUpError",
    "ConfigError",
    "DecomposedData",
    "EnergyReport",
    "ExponentConfig",
    "Grid",
    "LinearFlowPair",
    "PhysicalVectorField",
    "RunRecord",
    "ShellDataParams",
    "SimState",
    "SpectralScalarField",
    "SpectralVectorField",
    "StepControl",
    "amplified_shell_field",
    "beltrami_shell_field",
    "forcing_F",
    "forcing_G",
    "make_decomposed_data",
    "random_divfree_field",
    "report",
    "run",
    "semigroup_apply",
    "set_fft_workers",
    "step",
    "__version__",
]
