"""Exact evaluation of slope-type inequalities for fibred varieties."""

from __future__ import annotations

from .exact import BigOPoly, Poly, Q
from .model import (
    BoundReport,
    FibposError,
    FibrationFlags,
    FibrationNumerics,
    SurfaceCanonicalData,
    Verdict,
    ch_invariant,
    f_positivity,
    slope,
    slope_inequality,
)

__all__ = [
    "BigOPoly",
    "BoundReport",
    "FibposError",
    "FibrationFlags",
    "FibrationNumerics",
    "Poly",
    "Q",
    "SurfaceCanonicalData",
    "Verdict",
    "ch_invariant",
    "f_positivity",
    "slope",
    "slope_inequality",
]

__version__ = "0.1.0"
