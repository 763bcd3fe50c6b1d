"""Functional principal component decomposition on a quadrature grid.

The covariance operator ``(C f)(x) = int C(x, s) f(s) ds`` is discretised with
trapezoidal weights ``w``.  Its eigenproblem ``C W phi = lam phi`` is solved
through the symmetric form ``W^1/2 C W^1/2 v = lam v`` with
``phi = W^-1/2 v``, which makes the components orthonormal under the grid
inner product.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import FunctionalSeries, Grid, center
from .exceptions import DimensionError, NumericalError

EIGEN_CLIP = 1e-10


@dataclass(frozen=True, eq=False)
class FpcaModel:
    grid: Grid
    mean: np.ndarray
    components: np.ndarray          # K x J
    eigenvalues: np.ndarray         # K
    scores: np.ndarray              # N x K
    residual_functions: np.ndarray  # N x J
    total_variance: float

    @property
    def n_components(self) -> int:
        return self.components.shape[0]

    @property
    def explained_variance_ratio(self) -> np.ndarray:
        if self.total_variance <= 0:
            return np.zeros_like(self.eigenvalues)
        return self.eigenvalues / self.total_variance


def weighted_covariance(centered: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Symmetrised ``W^1/2 C W^1/2`` with the ``N - 1`` sample covariance."""
    n = centered.shape[0]
    cov = centered.T @ centered / max(n - 1, 1)
    sw = np.sqrt(weights)
    op = sw[:, None] * cov * sw[None, :]
    return 0.5 * (op + op.T)


def _fix_signs(components):
    idx = np.argmax(np.abs(components), axis=1)
    signs = np.sign(components[np.arange(components.shape[0]), idx])
    signs[signs == 0] = 1.0
    return components * signs[:, None]


def fit_fpca(smooth: FunctionalSeries, K: int) -> FpcaModel:
    """Decompose ``smooth`` into mean, ``K`` components and score series.

    Raises
    ------
    DimensionError
        Unless ``1 <= K < min(N, J)``.
    NumericalError
        If the discretised covariance has a materially negative eigenvalue.
    """
    N, J = smooth.values.shape
    if not (isinstance(K, (int, np.integer)) and 1 <= K < min(N, J)):
        raise DimensionError(f"K must satisfy 1 <= K < min(N, J) = {min(N, J)}, got {K}")
    grid = smooth.grid
    w = grid.weights
    mean, centered = center(smooth)
    X = centered.values

    op = weighted_covariance(X, w)
    evals, evecs = np.linalg.eigh(op)
    evals = evals[::-1]
    evecs = evecs[:, ::-1]
    top = max(evals[0], 0.0)
    if evals[-1] < -1e-8 * max(top, 1.0):
        raise NumericalError("covariance operator is not positive semi-definite")
    evals = np.where(evals < EIGEN_CLIP * top, 0.0, evals) if top > 0 else np.zeros_like(evals)

    comps = (evecs[:, :K] / np.sqrt(w)[:, None]).T
    comps = _fix_signs(comps)
    scores = (X * w) @ comps.T
    resid = X - scores @ comps

    return FpcaModel(
        grid=grid,
        mean=mean,
        components=comps,
        eigenvalues=evals[:K].copy(),
        scores=scores,
        residual_functions=resid,
        total_variance=float(np.trace(op)),
    )


def reconstruct(model: FpcaModel, scores_row) -> np.ndarray:
    """``mean + sum_k scores_row[k] * phi_k``; accepts a stack of score rows."""
    s = np.asarray(scores_row, dtype=float)
    if s.shape[-1] != model.n_components:
        raise DimensionError(
            f"expected {model.n_components} scores per row, got {s.shape[-1]}"
        )
    return model.mean + s @ model.components
