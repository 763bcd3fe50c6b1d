"""Point forecasts and bootstrap prediction intervals for future curves.

A bootstrap replicate for horizon ``i`` adds three resampled error sources
to the reconstructed score forecast:

* a historical ``i``-step score forecast error for each component,
* one FPCA residual function,
* the smoothing noise ``sigma*(x) * eps*_j``, with one scale curve per
  replicate and i.i.d. standardized residuals per grid point.

For weighted-likelihood fits the score errors are drawn with probabilities
proportional to the final weight of their target time, so errors produced by
contaminated curves are rarely resampled.  Maximum-likelihood fits draw them
uniformly.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import RngStream
from .exceptions import DimensionError, InsufficientHistoryError, InvalidDataError
from .fpca import FpcaModel, reconstruct
from .smoothing import SmoothedSeries, residual_pools
from .wle_ar import WLE, ArFit, forecast_scores, historical_forecast_errors

BLOCK_SIZE = 64


@dataclass(frozen=True, eq=False)
class ForecastResult:
    point: np.ndarray        # h x J
    replicates: np.ndarray   # h x B x J
    lower: np.ndarray        # h x J
    upper: np.ndarray        # h x J
    alpha: float
    method: str

    @property
    def h(self) -> int:
        return self.point.shape[0]

    @property
    def B(self) -> int:
        return self.replicates.shape[1]

    @property
    def horizons(self) -> np.ndarray:
        return np.arange(1, self.h + 1)


def point_forecast(fpca: FpcaModel, score_forecasts) -> np.ndarray:
    """Row ``i`` is the curve reconstructed from the horizon-``i`` scores."""
    sf = np.atleast_2d(np.asarray(score_forecasts, dtype=float))
    if sf.shape[1] != fpca.n_components:
        raise DimensionError(
            f"score forecasts have {sf.shape[1]} columns for {fpca.n_components} components"
        )
    return reconstruct(fpca, sf)


def pointwise_interval(replicates, alpha: float):
    """Type-7 empirical ``alpha/2`` and ``1 - alpha/2`` quantiles over axis 1."""
    if not 0 < alpha < 1:
        raise InvalidDataError("alpha must lie in (0, 1)")
    lo, hi = np.quantile(replicates, [alpha / 2, 1 - alpha / 2], axis=1, method="linear")
    return lo, hi


def score_error_pools(fpca: FpcaModel, fits, h: int):
    """Historical forecast errors with resampling probabilities, per (k, i)."""
    pools = []
    for k, fit in enumerate(fits):
        series = fpca.scores[:, k]
        row = []
        for i in range(1, h + 1):
            if series.size <= fit.order + i:
                raise InsufficientHistoryError(
                    f"component {k + 1}: {series.size} scores cannot supply "
                    f"{i}-step errors for an AR({fit.order})"
                )
            fe = historical_forecast_errors(fit, series, i)
            if fit.method == WLE:
                w = np.clip(fe.weights, 0.0, None)
                prob = w / w.sum() if w.sum() > 0 else np.full(w.size, 1.0 / w.size)
            else:
                prob = None
            row.append((fe.errors, prob))
        pools.append(row)
    return pools


def _draw_block(rng, n_rep, base, fpca, pools, eps_pool, scale_pool,
                score_noise, fpca_noise, smoothing_noise):
    h, J = base.shape
    K = fpca.n_components
    N = fpca.residual_functions.shape[0]
    out = np.broadcast_to(base, (n_rep, h, J)).copy()
    for k in range(K):
        for i in range(h):
            errs, prob = pools[k][i]
            xi = rng.choice(errs, size=n_rep, replace=True, p=prob)
            if score_noise:
                out[:, i, :] += xi[:, None] * fpca.components[k][None, :]
    idx_resid = rng.integers(0, N, size=(n_rep, h))
    idx_scale = rng.integers(0, scale_pool.shape[0], size=(n_rep, h))
    idx_eps = rng.integers(0, eps_pool.size, size=(n_rep, h, J))
    if fpca_noise:
        out += fpca.residual_functions[idx_resid]
    if smoothing_noise:
        out += scale_pool[idx_scale] * eps_pool[idx_eps]
    return out


def bootstrap_forecast(
    smoothed: SmoothedSeries,
    fpca: FpcaModel,
    fits,
    h: int,
    B: int,
    alpha: float,
    rng: RngStream,
    *,
    workers: int = 1,
    score_noise: bool = True,
    fpca_noise: bool = True,
    smoothing_noise: bool = True,
) -> ForecastResult:
    """Bootstrap replicates of the next ``h`` curves and their pointwise interval.

    Replicates are generated in blocks of ``BLOCK_SIZE``, block ``m`` using
    ``rng.substream(m)``; the result therefore does not depend on ``workers``.
    The three ``*_noise`` switches disable individual error sources.
    """
    if h < 1 or B < 1:
        raise InvalidDataError("h and B must be positive")
    if not 0 < alpha < 1:
        raise InvalidDataError("alpha must lie in (0, 1)")
    fits = list(fits)
    if len(fits) != fpca.n_components:
        raise DimensionError(f"need {fpca.n_components} score fits, got {len(fits)}")

    score_fc = np.column_stack(
        [forecast_scores(fit, fpca.scores[:, k], h) for k, fit in enumerate(fits)]
    )
    base = point_forecast(fpca, score_fc)
    pools = score_error_pools(fpca, fits, h)
    eps_pool, scale_pool = residual_pools(smoothed)

    starts = list(range(0, B, BLOCK_SIZE))

    def run(m):
        n_rep = min(BLOCK_SIZE, B - starts[m])
        gen = rng.substream(m).generator()
        return _draw_block(gen, n_rep, base, fpca, pools, eps_pool, scale_pool,
                           score_noise, fpca_noise, smoothing_noise)

    if workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            blocks = list(ex.map(run, range(len(starts))))
    else:
        blocks = [run(m) for m in range(len(starts))]
    reps = np.concatenate(blocks, axis=0).transpose(1, 0, 2)  # h x B x J
    lower, upper = pointwise_interval(reps, alpha)
    method = fits[0].method if fits else ""
    return ForecastResult(point=base, replicates=reps, lower=lower, upper=upper,
                          alpha=alpha, method=method)
