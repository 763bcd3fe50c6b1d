"""AR(p) models for principal component scores.

Two estimators share one parametrisation, ``b_t = c + sum_i phi_i b_{t-i} + z_t``
with ``z_t ~ N(0, sigma**2)``, conditional on the first ``p`` values:

* ``fit_ar_mle`` solves the Gaussian score equations, i.e. ordinary least
  squares on the lag design.
* ``fit_ar_wle`` solves the same equations with every observation weighted
  by a Hellinger residual-adjustment weight of its Pearson residual, so
  innovations that the Gaussian model cannot explain are downweighted.

The intercept ``c`` is optional (``include_mean``).  Without it the model is
the zero-mean AR(p) usually written for centred scores.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import solve_toeplitz
from scipy.stats import median_abs_deviation

from . import _kernels_py, kernels
from .exceptions import (
    ConvergenceError,
    DegenerateWeightsError,
    DimensionError,
    InvalidDataError,
    SingularFitError,
)

MLE = "MLE"
WLE = "WLE"


@dataclass(frozen=True, eq=False)
class ArFit:
    order: int
    coefficients: np.ndarray
    sigma: float
    method: str
    weights: np.ndarray
    residuals: np.ndarray
    intercept: float = 0.0
    include_mean: bool = False
    converged: bool = True
    n_iter: int = 0
    start: str = ""

    @property
    def mean(self) -> float:
        """Stationary mean ``c / (1 - sum phi)``; 0 for the zero-mean model."""
        if not self.include_mean:
            return 0.0
        denom = 1.0 - float(np.sum(self.coefficients))
        return self.intercept / denom if abs(denom) > 1e-12 else math.nan

    @property
    def row_weights(self) -> np.ndarray:
        """Weights with which each residual entered the final fit."""
        return row_weights(self.weights, self.order)

    @property
    def weighted_loglik(self) -> float:
        return weighted_loglik(self.residuals, self.sigma, self.row_weights)


@dataclass(frozen=True)
class WleConfig:
    """Settings of the weighted-likelihood fit.

    ``kernel_ratio`` is ``s`` in ``g**2 = s * sigma**2``, the kernel variance
    relative to the innovation variance.
    """

    kernel_ratio: float = 0.2
    max_iter: int = 500
    tol: float = 1e-8
    starts: tuple = ("mle_start", "robust_start")
    unit_weights: bool = False

    def __post_init__(self):
        if not self.kernel_ratio > 0:
            raise InvalidDataError("kernel_ratio must be positive")
        if not self.tol > 0:
            raise InvalidDataError("tol must be positive")
        if self.max_iter < 1:
            raise InvalidDataError("max_iter must be at least 1")
        bad = set(self.starts) - {"mle_start", "robust_start"}
        if bad or not self.starts:
            raise InvalidDataError(f"unknown root starts: {sorted(bad)}")


@dataclass(frozen=True, eq=False)
class ForecastErrors:
    """``h``-step in-sample forecast errors of one score series.

    ``times`` are the 0-based indices ``t`` of the forecast targets, and
    ``weights`` the fitted model's final weight at each of those times.
    """

    h: int
    errors: np.ndarray
    times: np.ndarray
    weights: np.ndarray = field(repr=False)


def row_weights(weights, p: int) -> np.ndarray:
    """Per-row weight: the row's own weight times the weights of its ``p`` lags.

    A curve flagged as outlying then also stops acting as a regressor for the
    next ``p`` targets, which keeps isolated spikes from biasing the
    coefficients through their leverage.
    """
    return _kernels_py.row_weights(weights, p)


def _as_series(series):
    x = np.asarray(series, dtype=float).ravel()
    if not np.all(np.isfinite(x)):
        raise InvalidDataError("series contains non-finite values")
    return x


def lag_design(series, p, include_mean=False, first=None):
    """Response vector and lag matrix for targets ``t = first .. N-1``.

    ``first`` defaults to ``p``, using every target with a full lag history.
    Columns are ``[1, b_{t-1}, ..., b_{t-p}]`` (the constant only with
    ``include_mean``).
    """
    x = _as_series(series)
    first = p if first is None else first
    n = x.size
    cols = [x[first - i:n - i] for i in range(1, p + 1)]
    if include_mean:
        cols.insert(0, np.ones(n - first))
    X = np.column_stack(cols) if cols else np.empty((n - first, 0))
    return x[first:], X


def _split(params, include_mean):
    if include_mean:
        return float(params[0]), np.asarray(params[1:])
    return 0.0, np.asarray(params)


def _check_order(n, p):
    if not (isinstance(p, (int, np.integer)) and p >= 0):
        raise DimensionError(f"AR order must be a non-negative integer, got {p!r}")
    if p >= n:
        raise DimensionError(f"AR order {p} needs more than {p} observations, got {n}")


def fit_ar_mle(series, p: int, include_mean: bool = False) -> ArFit:
    """Conditional Gaussian maximum-likelihood AR(p) fit.

    Raises
    ------
    DimensionError
        If ``p >= len(series)``.
    SingularFitError
        If the lag design is rank deficient or the residuals vanish.
    """
    x = _as_series(series)
    _check_order(x.size, p)
    y, X = lag_design(x, p, include_mean)
    if X.shape[1]:
        params, _, rank, _ = np.linalg.lstsq(X, y, rcond=None)
        if rank < X.shape[1]:
            raise SingularFitError(f"lag design of rank {rank} < {X.shape[1]} columns")
    else:
        params = np.empty(0)
    resid = y - X @ params
    sigma = math.sqrt(float(np.mean(resid**2)))
    if not sigma > 0:
        if p == 0 and not include_mean:
            raise SingularFitError("series is identically zero")
        # Noiseless recursions are legitimate; keep a tiny positive scale.
        sigma = 0.0
    c, phi = _split(params, include_mean)
    return ArFit(
        order=p,
        coefficients=phi,
        sigma=sigma,
        method=MLE,
        weights=np.ones(resid.size),
        residuals=resid,
        intercept=c,
        include_mean=include_mean,
    )


def pearson_residuals(residuals, sigma: float, s: float) -> np.ndarray:
    """Pearson residuals of a zero-mean Gaussian innovation model.

    ``f*`` is the Gaussian-kernel density estimate of ``residuals`` (kernel
    variance ``s * sigma**2``) evaluated at each residual; ``m*`` is the
    model density smoothed with the same kernel, ``N(0, (1 + s) sigma**2)``.
    Returns ``f*/m* - 1``.
    """
    r = np.asarray(residuals, dtype=float).ravel()
    if r.size == 0:
        raise DimensionError("need at least one residual")
    if not (sigma > 0 and s > 0):
        raise InvalidDataError("sigma and s must be positive")
    return np.asarray(kernels.pearson_residuals(r, float(sigma), float(s)))


def raf_weight(delta):
    """Hellinger residual-adjustment weight ``min(1, [A(d) + 1]^+ / (d + 1))``.

    With ``A(d) = 2 (sqrt(d + 1) - 1)``.  Scalar in, float out; arrays are
    handled elementwise.  ``delta = -1`` maps to 0.
    """
    d = np.asarray(delta, dtype=float)
    if np.any(d < -1.0 - 1e-12) or np.any(np.isnan(d)):
        raise InvalidDataError("Pearson residuals must be >= -1")
    w = kernels.hellinger_weights(np.atleast_1d(np.maximum(d, -1.0)))
    return float(w[0]) if d.ndim == 0 else np.asarray(w).reshape(d.shape)


def weighted_loglik(residuals, sigma, weights) -> float:
    """``sum w_t log N(z_t; 0, sigma**2)``."""
    if not sigma > 0:
        return math.inf
    r = np.asarray(residuals)
    logpdf = -0.5 * math.log(2 * math.pi * sigma * sigma) - 0.5 * (r / sigma) ** 2
    return float(np.sum(np.asarray(weights) * logpdf))


def robust_start(series, p: int, include_mean: bool = False):
    """Yule-Walker start computed after clipping at median +/- 3 MAD.

    Returns the stacked parameter vector and an innovation scale.
    """
    x = _as_series(series)
    med = float(np.median(x))
    mad = float(median_abs_deviation(x, scale="normal"))
    if not mad > 0:
        mad = float(np.std(x)) or 1.0
    clipped = np.clip(x, med - 3 * mad, med + 3 * mad)
    loc = med if include_mean else 0.0
    z = clipped - loc
    n = z.size
    acov = np.array([np.dot(z[: n - k], z[k:]) / n for k in range(p + 1)])
    if p:
        try:
            phi = solve_toeplitz(acov[:p], acov[1 : p + 1])
        except np.linalg.LinAlgError:
            phi = np.zeros(p)
        var = acov[0] - float(np.dot(phi, acov[1 : p + 1]))
    else:
        phi = np.empty(0)
        var = acov[0]
    sigma = math.sqrt(var) if var > 0 else mad
    # Outliers survive clipping at +/-3 MAD; the MAD itself is the safer scale.
    sigma = min(sigma, mad) if mad > 0 else sigma
    c = loc * (1.0 - float(np.sum(phi)))
    params = np.concatenate([[c], phi]) if include_mean else phi
    return params, sigma


def fit_ar_wle(series, p: int, cfg: WleConfig | None = None, include_mean: bool = False) -> ArFit:
    """Weighted-likelihood AR(p) fit.

    The estimating equations are solved by iterating weighted least squares
    (weights from the current Pearson residuals) and the weighted innovation
    variance ``sum w z**2 / sum w`` until the largest parameter change drops
    below ``cfg.tol``.  The iteration is started from the MLE and from a
    robust Yule-Walker fit; among converged roots the one with the larger
    weighted log-likelihood is returned.

    Raises
    ------
    DegenerateWeightsError
        If every start collapses to (near) zero weights.
    ConvergenceError
        If no start converges; ``best`` carries the best iterate.
    """
    cfg = cfg or WleConfig()
    x = _as_series(series)
    _check_order(x.size, p)
    y, X = lag_design(x, p, include_mean)
    mle = fit_ar_mle(x, p, include_mean)
    if not mle.sigma > 0:
        return replace(mle, method=WLE, start="mle_start")

    starts = []
    if "mle_start" in cfg.starts:
        p0 = np.concatenate([[mle.intercept], mle.coefficients]) if include_mean else mle.coefficients
        starts.append(("mle_start", p0, mle.sigma))
    if "robust_start" in cfg.starts and not cfg.unit_weights:
        p0, s0 = robust_start(x, p, include_mean)
        starts.append(("robust_start", p0, s0))

    candidates = []
    degenerate = 0
    for name, params0, sigma0 in starts:
        params, sigma, w, n_iter, ok = kernels.wle_iterate(
            y, X, np.asarray(params0, dtype=float), float(sigma0),
            float(cfg.kernel_ratio), int(cfg.max_iter), float(cfg.tol), bool(cfg.unit_weights), int(p),
        )
        params = np.asarray(params)
        w = np.asarray(w)
        if w.max() < 1e-6:
            degenerate += 1
            continue
        c, phi = _split(params, include_mean)
        resid = y - X @ params
        fit = ArFit(
            order=p,
            coefficients=phi,
            sigma=float(sigma),
            method=WLE,
            weights=w,
            residuals=resid,
            intercept=c,
            include_mean=include_mean,
            converged=bool(ok),
            n_iter=int(n_iter),
            start=name,
        )
        candidates.append(fit)

    if not candidates:
        raise DegenerateWeightsError(
            f"all {degenerate} weighted-likelihood starts collapsed to zero weights"
        )
    converged = [f for f in candidates if f.converged]
    pool = converged or candidates
    best = max(pool, key=lambda f: f.weighted_loglik)
    if not converged:
        raise ConvergenceError(
            f"weighted-likelihood iteration did not converge in {cfg.max_iter} steps",
            best=best,
        )
    return best


def aic(series, p: int, p_max: int, include_mean: bool = False) -> float:
    x = _as_series(series)
    y, X = lag_design(x, p, include_mean, first=p_max)
    if X.shape[1]:
        params, _, rank, _ = np.linalg.lstsq(X, y, rcond=None)
        if rank < X.shape[1]:
            raise SingularFitError("rank-deficient lag design in order selection")
        resid = y - X @ params
    else:
        resid = y
    var = float(np.mean(resid**2))
    n_eff = x.size - p_max
    if var <= 0:
        return -math.inf
    return n_eff * math.log(var) + 2 * p


def select_order(series, p_max: int, method: str = MLE, include_mean: bool = False) -> int:
    """AIC order choice on the common sample of the last ``N - p_max`` points.

    ``method`` is accepted for symmetry; both estimators share the MLE order.
    Ties go to the smaller order.  A series that is constant to rounding (a
    component that carries no signal) gets order 0.
    """
    x = _as_series(series)
    if p_max < 0:
        raise DimensionError("p_max must be non-negative")
    if p_max and not p_max < x.size / 4:
        raise DimensionError(f"p_max={p_max} must be below N/4 = {x.size / 4}")
    if np.ptp(x) <= 1e-12 * max(1.0, float(np.max(np.abs(x)))):
        return 0
    best_p, best = 0, math.inf
    for p in range(p_max + 1):
        val = aic(x, p, p_max, include_mean)
        if val < best - 1e-12:
            best_p, best = p, val
    return best_p


def forecast_scores(fit: ArFit, history, h: int) -> np.ndarray:
    """Iterate the fitted recursion ``h`` steps past the end of ``history``."""
    if h < 1:
        raise DimensionError("forecast horizon must be >= 1")
    hist = _as_series(history)
    p = fit.order
    if hist.size < p:
        raise DimensionError(f"history of length {hist.size} is shorter than the order {p}")
    buf = list(hist[hist.size - p :]) if p else []
    phi = fit.coefficients
    out = np.empty(h)
    for i in range(h):
        val = fit.intercept
        for j in range(p):
            val += phi[j] * buf[-1 - j]
        out[i] = val
        if p:
            buf.append(val)
    return out


def in_sample_predictions(fit: ArFit, series, h: int):
    """``h``-step predictions ``b_{t|t-h}`` for every target with full lag history.

    Returns ``(times, predictions)`` with 0-based target times
    ``t = h + max(p, 1) - 1, ..., N - 1``.
    """
    x = _as_series(series)
    p = fit.order
    first = h + max(p, 1) - 1
    times = np.arange(first, x.size)
    phi = fit.coefficients
    preds = np.empty(times.size)
    for n, t in enumerate(times):
        origin = t - h  # last observed index
        buf = list(x[origin - p + 1 : origin + 1]) if p else []
        val = 0.0
        for _ in range(h):
            val = fit.intercept
            for j in range(p):
                val += phi[j] * buf[-1 - j]
            if p:
                buf.append(val)
        preds[n] = val
    return times, preds


def historical_forecast_errors(fit: ArFit, series, h: int) -> ForecastErrors:
    """In-sample ``h``-step forecast errors ``b_t - b_{t|t-h}``.

    Raises
    ------
    DimensionError
        If ``len(series) <= p + h``.
    """
    x = _as_series(series)
    if h < 1:
        raise DimensionError("forecast horizon must be >= 1")
    if x.size <= fit.order + h:
        raise DimensionError(
            f"need more than p + h = {fit.order + h} observations, got {x.size}"
        )
    times, preds = in_sample_predictions(fit, x, h)
    # fit.weights[i] belongs to target time p + i
    w = np.asarray(fit.weights)[times - fit.order]
    return ForecastErrors(h=h, errors=x[times] - preds, times=times, weights=w)
