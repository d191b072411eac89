"""Offline figures and Markdown summaries from hallmhd run outputs."""

from .bundle import SchemaError, SeriesBundle, load_bundle, load_run_dir, read_sweep_csv
from .plots import EnvelopeCheck, SweepFit, plot_energy, plot_sweep
from .summary import render_summary

__version__ = "0.1.0"

__all__ = [
    "SchemaError",
    "SeriesBundle",
    "load_bundle",
    "load_run_dir",
    "read_sweep_csv",
    "EnvelopeCheck",
    "SweepFit",
    "plot_energy",
    "plot_sweep",
    "render_summary",
    "__version__",
]
