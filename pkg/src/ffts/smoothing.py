"""Per-curve penalized smoothing with heteroskedastic scale estimation.

Each observed curve is split as ``raw = smooth + scale * std_residual``.  The
smooth part minimises ``sum (y - f)**2 + lam * sum (D2 f)**2`` where ``D2`` is
the second-difference operator, and ``lam`` is picked per curve by generalized
cross-validation over a fixed logarithmic ladder.  Because the penalty matrix
``D2' D2`` is the same for every curve it is diagonalised once and every
(curve, lambda) fit becomes a diagonal shrinkage in that eigenbasis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import FunctionalSeries
from .exceptions import InsufficientGridError, InvalidDataError

LAMBDA_LADDER = np.logspace(-4, 4, 41)
GCV_GAMMA = 1.0
SCALE_FLOOR = 1e-8
SCALE_BANDWIDTH_STEPS = 2.0


@dataclass(frozen=True, eq=False)
class SmoothedSeries:
    raw: FunctionalSeries
    smooth: FunctionalSeries
    scale: FunctionalSeries
    std_residuals: np.ndarray
    penalty: np.ndarray

    @property
    def grid(self):
        return self.raw.grid


def second_difference_matrix(n: int) -> np.ndarray:
    return np.diff(np.eye(n), n=2, axis=0)


class _PenaltyBasis:
    """Eigendecomposition of ``D2' D2`` for a fixed number of points."""

    def __init__(self, n_points):
        d = second_difference_matrix(n_points)
        evals, evecs = np.linalg.eigh(d.T @ d)
        # The two null-space (linear) directions come out as tiny roundoff.
        evals[np.abs(evals) < 1e-10 * evals.max()] = 0.0
        self.eigenvalues = evals
        self.eigenvectors = evecs

    def shrinkage(self, lam):
        lam = np.atleast_1d(np.asarray(lam, dtype=float))
        return 1.0 / (1.0 + lam[:, None] * self.eigenvalues[None, :])

    def fit(self, values, lam):
        """Smooth stacked curves ``values`` (N x J) with per-curve ``lam`` (N,)."""
        coef = values @ self.eigenvectors
        shrink = self.shrinkage(np.broadcast_to(lam, values.shape[:1]))
        return (coef * shrink) @ self.eigenvectors.T


def gcv_scores(values: np.ndarray, ladder: np.ndarray = LAMBDA_LADDER, gamma=None) -> np.ndarray:
    """GCV criterion for every curve (rows) at every ladder value (columns).

    ``GCV = J * RSS / (J - gamma * tr S)**2``, evaluated exactly through the
    penalty eigenbasis.  Ladder values with a non-positive denominator score
    ``inf``.
    """
    gamma = GCV_GAMMA if gamma is None else gamma
    values = np.atleast_2d(values)
    J = values.shape[1]
    basis = _PenaltyBasis(J)
    coef = values @ basis.eigenvectors                   # N x J
    shrink = basis.shrinkage(ladder)                     # L x J
    resid_coef = coef[:, None, :] * (1.0 - shrink)[None, :, :]
    rss = np.sum(resid_coef**2, axis=-1)                 # N x L
    edf = shrink.sum(axis=1)                             # L
    denom = J - gamma * edf
    with np.errstate(divide="ignore"):
        out = J * rss / denom[None, :] ** 2
    out[:, denom <= 0] = np.inf
    return out


def select_penalty(values: np.ndarray, ladder: np.ndarray = LAMBDA_LADDER, gamma=None) -> np.ndarray:
    scores = gcv_scores(values, ladder, gamma)
    return ladder[np.argmin(scores, axis=1)]


def kernel_scale(sq_resid: np.ndarray, points: np.ndarray, bandwidth: float) -> np.ndarray:
    """Square root of Gaussian-kernel (Nadaraya-Watson) smoothed squared residuals."""
    diff = (points[:, None] - points[None, :]) / bandwidth
    kern = np.exp(-0.5 * diff**2)
    kern /= kern.sum(axis=1, keepdims=True)
    return np.sqrt(sq_resid @ kern.T)


def smooth_series(raw: FunctionalSeries, penalty=None) -> SmoothedSeries:
    """Smooth every curve of ``raw`` and estimate its noise scale curve.

    Parameters
    ----------
    raw : FunctionalSeries
        Observed curves, ``J >= 4`` grid points.
    penalty : float or array-like, optional
        Fixed smoothing parameter (scalar or one per curve).  ``None`` selects
        it per curve by GCV over ``LAMBDA_LADDER``.

    Returns
    -------
    SmoothedSeries
        Where the estimated scale falls below ``SCALE_FLOOR`` the scale is
        floored and the standardized residual is set to zero.
    """
    values = raw.values
    J = values.shape[1]
    if J < 4:
        raise InsufficientGridError(f"smoothing needs at least 4 grid points, got {J}")
    if not np.all(np.isfinite(values)):
        raise InvalidDataError("raw series contains non-finite values")

    if penalty is None:
        lam = select_penalty(values)
    else:
        lam = np.broadcast_to(np.asarray(penalty, dtype=float), values.shape[:1]).copy()
        if np.any(lam < 0) or not np.all(np.isfinite(lam)):
            raise InvalidDataError("smoothing penalty must be finite and non-negative")

    basis = _PenaltyBasis(J)
    smooth = basis.fit(values, lam)
    resid = values - smooth

    grid = raw.grid
    scale = kernel_scale(resid**2, grid.points, SCALE_BANDWIDTH_STEPS * grid.mean_step)
    degenerate = ~(scale >= SCALE_FLOOR)
    scale = np.where(degenerate, SCALE_FLOOR, scale)
    std = np.where(degenerate, 0.0, resid / scale)

    return SmoothedSeries(
        raw=raw,
        smooth=raw.with_values(smooth),
        scale=raw.with_values(scale),
        std_residuals=std,
        penalty=np.asarray(lam, dtype=float),
    )


def residual_pools(s: SmoothedSeries) -> tuple[np.ndarray, np.ndarray]:
    """Flattened standardized-residual pool and the stack of scale curves."""
    return s.std_residuals.ravel().copy(), s.scale.values.copy()


def roughness(values: np.ndarray) -> np.ndarray:
    """Second-difference roughness ``sum (D2 f)**2`` for each row."""
    return np.sum(np.diff(np.atleast_2d(values), n=2, axis=1) ** 2, axis=1)
