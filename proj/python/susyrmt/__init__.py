"""Python access to the susyrmt library: verify suites, pipelines, spectra."""

import json

from ._susy import (
    DimensionError,
    DomainError,
    NumericError,
    SusyError,
    berezin_norm,
    compare_color_flavor,
    propagator_k1,
    sample_levels,
    semicircle_density,
    sine_kernel_y2,
    suite_names,
    z0_initial,
)
from . import _susy


def run_suite(name, seed=42, beta=None, n=None, k=None, tol=None, threads=0):
    """Run a verify suite; returns the report as a dict."""
    return json.loads(_susy.run_suite_json(name, seed, beta, n, k, tol or {}, threads))


def run_pipeline(kind, cls="GUE", n=50, samples=1000, seed=42, threads=0, unfold="auto",
                 t_grid=(0.0, 2.0, 0.1), blocks=20):
    """Run a pipeline. Returns (csv_text, result) where result holds config, columns, data."""
    lo, hi, step = t_grid
    csv, meta = _susy.run_pipeline_raw(kind, cls, n, samples, seed, threads, unfold, lo, hi, step, blocks)
    return csv, json.loads(meta)


__all__ = [
    "DimensionError", "DomainError", "NumericError", "SusyError",
    "berezin_norm", "compare_color_flavor", "propagator_k1", "run_pipeline", "run_suite",
    "sample_levels", "semicircle_density", "sine_kernel_y2", "suite_names", "z0_initial",
]
