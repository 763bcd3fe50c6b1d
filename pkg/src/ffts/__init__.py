"""Robust forecasting of functional time series.

Curves are smoothed, decomposed into functional principal components, and
each score series is forecast by an AR(p) model fitted either by Gaussian
maximum likelihood or by a weighted-likelihood estimator that downweights
outlying observations.  Prediction intervals come from a bootstrap over
score forecast errors, decomposition residuals and smoothing noise.
"""

from .core import FunctionalSeries, Grid, RngStream, center, inner_product
from .fpca import FpcaModel, fit_fpca, reconstruct
from .forecast import ForecastResult, bootstrap_forecast, point_forecast
from .kernels import BACKEND
from .metrics import MetricRow, amse, coverage, interval_score
from .pipeline import FittedModel, fit_model, forecast_model
from .smoothing import SmoothedSeries, residual_pools, smooth_series
from .wle_ar import (
    MLE,
    WLE,
    ArFit,
    WleConfig,
    fit_ar_mle,
    fit_ar_wle,
    forecast_scores,
    historical_forecast_errors,
    pearson_residuals,
    raf_weight,
    select_order,
)

__version__ = "0.1.0"
