"""Point and interval forecast accuracy: AMSE, coverage and interval score."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionError, InvalidDataError


@dataclass(frozen=True)
class MetricRow:
    amse: float
    coverage: float
    score: float
    h: int
    method: str = ""
    config: str = ""


def _arrays(*arrs):
    out = [np.atleast_2d(np.asarray(a, dtype=float)) for a in arrs]
    shape = out[0].shape
    for a in out[1:]:
        if a.shape != shape:
            raise DimensionError(f"shape mismatch: {a.shape} vs {shape}")
    return out


def _check_interval(lower, upper):
    if np.any(lower > upper):
        raise InvalidDataError("lower bound exceeds upper bound")


def amse(actual, predicted) -> float:
    """Mean squared error over every horizon x grid-point cell."""
    a, p = _arrays(actual, predicted)
    return float(np.mean((a - p) ** 2))


def coverage(actual, lower, upper) -> float:
    """Fraction of cells inside the closed interval ``[lower, upper]``."""
    a, lo, hi = _arrays(actual, lower, upper)
    _check_interval(lo, hi)
    return float(np.mean((lo <= a) & (a <= hi)))


def interval_score(actual, lower, upper, alpha: float) -> float:
    """Mean interval score of a central ``(1 - alpha)`` prediction interval.

    Width plus ``2 / alpha`` times the distance by which ``actual`` falls
    outside the interval.
    """
    if not 0 < alpha < 1:
        raise InvalidDataError("alpha must lie in (0, 1)")
    a, lo, hi = _arrays(actual, lower, upper)
    _check_interval(lo, hi)
    below = np.where(a < lo, lo - a, 0.0)
    above = np.where(a > hi, a - hi, 0.0)
    return float(np.mean((hi - lo) + (2.0 / alpha) * (below + above)))


def evaluate(actual, point, lower, upper, alpha, h=None, method="", config="") -> MetricRow:
    actual = np.atleast_2d(actual)
    return MetricRow(
        amse=amse(actual, point),
        coverage=coverage(actual, lower, upper),
        score=interval_score(actual, lower, upper, alpha),
        h=actual.shape[0] if h is None else h,
        method=method,
        config=config,
    )
