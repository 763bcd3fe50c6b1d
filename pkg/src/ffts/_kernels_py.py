"""Pure-Python reference implementations of the hot numerical kernels.

``ffts._kernels`` (Cython) mirrors these signatures exactly; ``ffts.kernels``
picks whichever is available at import time.
"""

import math

import numpy as np

# Plain fixed-point steps before switching to half steps; fixed points are
# unchanged, damping only breaks the 2-cycles a steep weight map can produce.
DAMP_AFTER = 50

# Cap on the number of pairwise kernel terms held in memory at once.
_PAIR_BLOCK = 1 << 22


def pearson_residuals(resid, sigma, s):
    """``f*/m* - 1`` for a Gaussian kernel of variance ``s * sigma**2``."""
    resid = np.asarray(resid, dtype=float)
    g2 = s * sigma * sigma
    n = resid.size
    f_star = np.empty(n)
    step = max(1, _PAIR_BLOCK // max(n, 1))
    for lo in range(0, n, step):
        diff = resid[lo:lo + step, None] - resid[None, :]
        f_star[lo:lo + step] = np.exp(-0.5 * diff * diff / g2).mean(axis=1)
    # f* never underflows (each point contributes its own kernel peak);
    # m* can, so the ratio is formed in log space.
    f_star /= math.sqrt(g2)
    tot = sigma * sigma + g2
    log_ratio = np.log(f_star) + 0.5 * resid * resid / tot + 0.5 * math.log(tot)
    with np.errstate(over="ignore"):
        return np.exp(log_ratio) - 1.0


def hellinger_weights(delta):
    """Hellinger RAF weight, vectorised; ``delta`` is assumed ``>= -1``.

    Written as ``2/u - 1/u**2`` with ``u = sqrt(delta + 1)`` so that
    ``delta = inf`` gives 0 rather than nan.
    """
    delta = np.asarray(delta, dtype=float)
    u = np.sqrt(np.maximum(delta + 1.0, 0.0))
    out = np.zeros_like(u)
    pos = u > 0
    inv = 1.0 / u[pos]
    out[pos] = np.clip(2.0 * inv - inv * inv, 0.0, 1.0)
    return out


def row_weights(w, p):
    """Weight of each regression row: its own weight times those of its lags.

    Row ``i`` (target ``p + i``) has lags at rows ``i - 1 .. i - p``; lags
    before the first row count as weight 1.
    """
    w = np.asarray(w, dtype=float)
    out = w.copy()
    for j in range(1, p + 1):
        out[j:] *= w[:-j] if j < w.size else 1.0
    return out


def wle_iterate(y, X, coef0, sigma0, s, max_iter, tol, unit_weights, p):
    """Fixed-point iteration of the weighted-likelihood estimating equations.

    Returns ``(coef, sigma, weights, n_iter, converged)``.  ``weights`` are the
    per-residual weights evaluated at the returned parameters; rows enter the
    least-squares and scale updates with :func:`row_weights`.
    """
    y = np.asarray(y, dtype=float)
    X = np.asarray(X, dtype=float)
    coef = np.array(coef0, dtype=float)
    sigma = float(sigma0)
    n = y.shape[0]
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        resid = y - X @ coef
        if unit_weights:
            w = np.ones(n)
        else:
            w = hellinger_weights(pearson_residuals(resid, sigma, s))
        if w.max() < 1e-6:
            return coef, sigma, w, it, False
        rw = row_weights(w, p)
        wsum = rw.sum()
        if wsum < 1e-6:
            return coef, sigma, w, it, False
        if X.shape[1]:
            Xw = X * rw[:, None]
            try:
                new_coef = np.linalg.solve(Xw.T @ X, Xw.T @ y)
            except np.linalg.LinAlgError:
                return coef, sigma, w, it, False
        else:
            new_coef = coef
        new_resid = y - X @ new_coef
        new_sigma = math.sqrt(max(float(np.sum(rw * new_resid**2) / wsum), 0.0))
        if it > DAMP_AFTER:
            new_coef = 0.5 * (coef + new_coef)
            new_sigma = 0.5 * (sigma + new_sigma)
        change = abs(new_sigma - sigma)
        if coef.size:
            change = max(change, float(np.max(np.abs(new_coef - coef))))
        coef, sigma = new_coef, new_sigma
        if sigma <= 0.0:
            break
        if change < tol:
            converged = True
            break
    resid = y - X @ coef
    if unit_weights or sigma <= 0.0:
        w = np.ones(n)
    else:
        w = hellinger_weights(pearson_residuals(resid, sigma, s))
    return coef, sigma, w, it, converged
