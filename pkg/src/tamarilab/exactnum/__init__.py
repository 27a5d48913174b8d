"""Exact polynomial and truncated-series arithmetic."""

from .multipoly import MultiPoly, parse_poly
from .series import (TruncSeries, SeriesError, series_newton_root, newton_residual,
                     parse_series, parse_in_unknown,
                     substitute_series)

__all__ = [
    "MultiPoly",
    "parse_poly",
    "TruncSeries",
    "SeriesError",
    "series_newton_root",
    "newton_residual",
    "substitute_series",
    "parse_series",
    "parse_in_unknown",
]
