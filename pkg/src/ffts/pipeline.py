"""Fit-and-forecast pipeline: smooth, decompose, model scores, bootstrap."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import FunctionalSeries, RngStream
from .forecast import ForecastResult, bootstrap_forecast
from .fpca import FpcaModel, fit_fpca
from .smoothing import SmoothedSeries, smooth_series
from .wle_ar import MLE, WLE, ArFit, WleConfig, fit_ar_mle, fit_ar_wle, select_order

DEFAULT_P_MAX = 3


@dataclass(frozen=True, eq=False)
class FittedModel:
    smoothed: SmoothedSeries
    fpca: FpcaModel
    fits: tuple
    method: str

    @property
    def orders(self):
        return [f.order for f in self.fits]


def max_order(n_scores: int, p_max: int = DEFAULT_P_MAX) -> int:
    """Largest admissible order: ``p_max`` capped so that ``p_max < N / 4``."""
    cap = int(np.ceil(n_scores / 4)) - 1
    return max(0, min(p_max, cap))


def fit_score_models(scores, method, p_max=DEFAULT_P_MAX, wle=None, include_mean=True):
    wle = wle or WleConfig()
    fits = []
    pm = max_order(scores.shape[0], p_max)
    for k in range(scores.shape[1]):
        series = scores[:, k]
        p = select_order(series, pm, MLE, include_mean)
        if method == MLE:
            fits.append(fit_ar_mle(series, p, include_mean))
        elif method == WLE:
            fits.append(fit_ar_wle(series, p, wle, include_mean))
        else:
            raise ValueError(f"unknown method {method!r}")
    return tuple(fits)


def fit_model(raw: FunctionalSeries, K: int, method: str = WLE, *, penalty=None,
              p_max=DEFAULT_P_MAX, wle=None, include_mean=True, smoothed=None,
              fpca=None) -> FittedModel:
    """Fit the full pipeline; ``smoothed``/``fpca`` may be reused between methods."""
    smoothed = smoothed if smoothed is not None else smooth_series(raw, penalty)
    fpca = fpca if fpca is not None else fit_fpca(smoothed.smooth, K)
    fits = fit_score_models(fpca.scores, method, p_max, wle, include_mean)
    return FittedModel(smoothed=smoothed, fpca=fpca, fits=fits, method=method)


def forecast_model(model: FittedModel, h: int, B: int, alpha: float, rng: RngStream,
                   workers: int = 1) -> ForecastResult:
    return bootstrap_forecast(model.smoothed, model.fpca, model.fits, h, B, alpha, rng,
                              workers=workers)
