"""Rolling (expanding-window) holdout evaluation and holdout choice of ``K``.

For each holdout index ``t`` the whole pipeline is refit on curves
``0..t-1`` and scored on its one-step forecast of curve ``t``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .core import FunctionalSeries, RngStream
from .exceptions import DimensionError
from .forecast import point_forecast
from .metrics import MetricRow, evaluate
from .pipeline import DEFAULT_P_MAX, fit_model, forecast_model
from .smoothing import smooth_series
from .fpca import fit_fpca
from .wle_ar import MLE, WLE, forecast_scores

HOLDOUT_FRACTION = 0.2


def holdout_indices(n_curves: int, fraction: float = HOLDOUT_FRACTION) -> range:
    """Indices of the last ``round(fraction * N)`` curves (at least one)."""
    if not 0 < fraction < 1:
        raise ValueError("fraction must lie in (0, 1)")
    n_test = max(1, int(math.floor(fraction * n_curves + 0.5)))
    if n_test >= n_curves:
        raise DimensionError(f"holdout of {n_test} curves leaves no training data")
    return range(n_curves - n_test, n_curves)


def _map(fn, items, threads):
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(fn, items))
    return [fn(i) for i in items]


def rolling_holdout(series: FunctionalSeries, K: int, methods=(WLE, MLE), B: int = 199,
                    alpha: float = 0.05, rng: RngStream | None = None, *,
                    fraction: float = HOLDOUT_FRACTION, penalty=None, wle=None,
                    p_max: int = DEFAULT_P_MAX, threads: int = 1):
    """One ``MetricRow`` per (holdout index, method), in index order.

    Index ``t`` and method ``j`` bootstrap from ``rng.substream(t).substream(j)``,
    so the table does not depend on ``threads``.
    """
    rng = rng if rng is not None else RngStream(0)
    methods = tuple(methods)
    ids = series.ids

    def one(t):
        train = series.head(t)
        smoothed = smooth_series(train, penalty)
        fpca = fit_fpca(smoothed.smooth, K)
        actual = series.values[t:t + 1]
        rows = []
        for j, method in enumerate(methods):
            model = fit_model(train, K, method, smoothed=smoothed, fpca=fpca, wle=wle, p_max=p_max)
            res = forecast_model(model, 1, B, alpha, rng.substream(t).substream(j))
            rows.append(evaluate(actual, res.point, res.lower, res.upper, alpha, h=1,
                                 method=method, config=ids[t]))
        return rows

    out = _map(one, holdout_indices(series.n_curves, fraction), threads)
    return [r for rows in out for r in rows]


def summarize(rows) -> list[MetricRow]:
    """Mean metrics per method over holdout rows, methods in first-seen order."""
    order = list(dict.fromkeys(r.method for r in rows))
    out = []
    for m in order:
        sel = [r for r in rows if r.method == m]
        out.append(MetricRow(
            amse=float(np.mean([r.amse for r in sel])),
            coverage=float(np.mean([r.coverage for r in sel])),
            score=float(np.mean([r.score for r in sel])),
            h=1, method=m, config=f"mean of {len(sel)}",
        ))
    return out


def holdout_k_selection(series: FunctionalSeries, k_candidates, rng: RngStream | None = None, *,
                        method: str = WLE, fraction: float = HOLDOUT_FRACTION, penalty=None,
                        wle=None, p_max: int = DEFAULT_P_MAX, threads: int = 1,
                        rtol: float = 1e-9) -> int:
    """Number of components with the smallest mean one-step holdout AMSE.

    Only point forecasts enter the criterion, so ``rng`` is not consumed; it is
    accepted so callers can pass their run stream uniformly.  Scores within a
    relative ``rtol`` of the best count as ties, which go to the smaller ``K``.
    """
    ks = sorted(set(int(k) for k in k_candidates))
    if not ks:
        raise ValueError("k_candidates must be non-empty")
    limit = min(series.n_curves, series.n_points)
    if ks[0] < 1 or ks[-1] >= limit:
        raise DimensionError(f"candidates must lie in [1, {limit - 1}]")
    if len(ks) == 1:
        return ks[0]
    idx = holdout_indices(series.n_curves, fraction)

    def one(t):
        train = series.head(t)
        smoothed = smooth_series(train, penalty)
        errs = []
        for K in ks:
            fpca = fit_fpca(smoothed.smooth, K)
            model = fit_model(train, K, method, smoothed=smoothed, fpca=fpca, wle=wle, p_max=p_max)
            sf = np.array([forecast_scores(f, fpca.scores[:, k], 1)
                           for k, f in enumerate(model.fits)]).T
            pred = point_forecast(fpca, sf)
            errs.append(float(np.mean((series.values[t] - pred[0]) ** 2)))
        return errs

    table = np.array(_map(one, idx, threads))
    means = table.mean(axis=0)
    best = means.min()
    for K, m in zip(ks, means):
        if m <= best + rtol * max(abs(best), 1e-300):
            return K
    return ks[int(np.argmin(means))]  # unreachable


__all__ = ["HOLDOUT_FRACTION", "holdout_indices", "rolling_holdout", "summarize",
           "holdout_k_selection", "MLE", "WLE"]
