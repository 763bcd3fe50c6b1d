"""Synthetic functional time series with magnitude/shape outliers, and
Monte Carlo experiment sweeps over them."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import FunctionalSeries, Grid, RngStream
from .exceptions import ConfigError, ExperimentFailure, FftsError
from .fpca import fit_fpca
from .metrics import MetricRow, evaluate
from .pipeline import DEFAULT_P_MAX, fit_model, forecast_model
from .smoothing import smooth_series
from .wle_ar import MLE, WLE, WleConfig

log = logging.getLogger(__name__)

OUTLIER_KINDS = ("none", "magnitude", "shape")


@dataclass(frozen=True)
class DgpConfig:
    N: int = 100
    J: int = 12
    noise_sd: float = 0.15
    contamination: float = 0.0
    outlier: str = "none"
    shift: float = 0.75
    seed: int = 0

    def __post_init__(self):
        if self.N < 1 or self.J < 2:
            raise ConfigError("need N >= 1 and J >= 2")
        if not self.noise_sd > 0:
            raise ConfigError("noise_sd must be positive")
        if not 0 <= self.contamination < 1:
            raise ConfigError("contamination must lie in [0, 1)")
        if self.outlier not in OUTLIER_KINDS:
            raise ConfigError(f"outlier must be one of {OUTLIER_KINDS}")
        if self.n_outliers >= self.N:
            raise ConfigError("contamination would replace every curve")

    @property
    def n_outliers(self) -> int:
        if self.outlier == "none":
            return 0
        # round half up, not banker's rounding
        return int(math.floor(self.N * self.contamination + 0.5))

    @property
    def label(self) -> str:
        if self.outlier == "none" or self.n_outliers == 0:
            return "clean"
        tag = "MO" if self.outlier == "magnitude" else "SO"
        extra = f"@{self.shift:g}" if self.outlier == "magnitude" else ""
        return f"{self.contamination:.0%} {tag}{extra}"


@dataclass(frozen=True, eq=False)
class SimulatedSeries:
    series: FunctionalSeries
    outliers: np.ndarray = field(repr=False)
    truth: np.ndarray = field(repr=False)


def base_curve(J: int) -> np.ndarray:
    j = np.arange(1, J + 1)
    return 15.0 + np.cos(np.pi * j / 4)


def shape_curve(J: int) -> np.ndarray:
    j = np.arange(1, J + 1)
    return 15.0 + np.sin(np.pi * j / 4)


def generate(cfg: DgpConfig, rng: RngStream, protect_last: int = 0) -> SimulatedSeries:
    """Draw one synthetic series.

    Outlying curves are chosen uniformly without replacement among the first
    ``N - protect_last`` curves.  ``truth`` holds the noise-free curve each
    observation was generated around (before any magnitude shift).
    """
    N, J = cfg.N, cfg.J
    gen = rng.generator()
    clean = base_curve(J)
    noise = gen.normal(0.0, cfg.noise_sd, size=(N, J))
    truth = np.broadcast_to(clean, (N, J)).copy()
    values = truth + noise

    n_out = cfg.n_outliers
    eligible = N - protect_last
    if n_out > eligible:
        raise ConfigError(f"cannot place {n_out} outliers among {eligible} curves")
    idx = np.sort(gen.choice(eligible, size=n_out, replace=False)) if n_out else np.empty(0, int)
    if n_out and cfg.outlier == "magnitude":
        bump = np.abs(gen.normal(cfg.shift, cfg.noise_sd, size=(n_out, J)))
        values[idx] += bump
    elif n_out and cfg.outlier == "shape":
        fresh = gen.normal(0.0, cfg.noise_sd, size=(n_out, J))
        truth[idx] = shape_curve(J)
        values[idx] = truth[idx] + fresh

    grid = Grid.integers(J)
    return SimulatedSeries(
        series=FunctionalSeries(values, grid, cfg.label),
        outliers=idx,
        truth=truth,
    )


@dataclass(frozen=True)
class ExperimentRow:
    config: str
    contamination: float
    outlier: str
    h: int
    method: str
    amse: float
    cp: float
    score: float
    mc_se_amse: float
    mc_se_cp: float
    mc_se_score: float
    n_ok: int
    n_failed: int


def _one_replicate(m, cfg, h, K, B, alpha, methods, rng, penalty, wle, p_max):
    sub = rng.substream(m)
    sim = generate(cfg, sub.substream(0), protect_last=h)
    raw = sim.series
    train = raw.head(cfg.N - h)
    actual = raw.values[cfg.N - h:]
    smoothed = smooth_series(train, penalty)
    fpca = fit_fpca(smoothed.smooth, K)
    rows = {}
    for j, method in enumerate(methods):
        model = fit_model(train, K, method, smoothed=smoothed, fpca=fpca, wle=wle, p_max=p_max)
        res = forecast_model(model, h, B, alpha, sub.substream(1 + j))
        rows[method] = evaluate(actual, res.point, res.lower, res.upper, alpha, h=h,
                                method=method, config=cfg.label)
    return rows


def run_experiment(cfg: DgpConfig, h: int, K: int = 3, B: int = 199, MC: int = 200,
                   methods=(WLE, MLE), rng: RngStream | None = None, *, alpha: float = 0.05,
                   penalty=None, wle: WleConfig | None = None, p_max: int = DEFAULT_P_MAX,
                   threads: int = 1, max_fail_frac: float = 0.05):
    """Monte Carlo averages of AMSE, coverage and interval score per method.

    Replicate ``m`` draws everything from ``rng.substream(m)``, so results do
    not depend on ``threads``.  Failing replicates (any library error) are
    logged and skipped; more than ``max_fail_frac`` of them aborts the run.
    """
    if MC < 1:
        raise ConfigError("MC must be >= 1")
    rng = rng if rng is not None else RngStream(cfg.seed)
    methods = tuple(methods)

    def task(m):
        try:
            return _one_replicate(m, cfg, h, K, B, alpha, methods, rng, penalty, wle, p_max)
        except FftsError as exc:
            log.warning("replicate %d of %s failed: %s", m, cfg.label, exc)
            return exc

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(task, range(MC)))
    else:
        results = [task(m) for m in range(MC)]

    ok = [r for r in results if isinstance(r, dict)]
    n_failed = MC - len(ok)
    if n_failed > max_fail_frac * MC:
        raise ExperimentFailure(
            f"{n_failed} of {MC} replicates failed for {cfg.label}, h={h}"
        )

    rows = []
    for method in methods:
        vals = np.array([[r[method].amse, r[method].coverage, r[method].score] for r in ok])
        mean = vals.mean(axis=0)
        se = vals.std(axis=0, ddof=1) / math.sqrt(len(ok)) if len(ok) > 1 else np.zeros(3)
        rows.append(ExperimentRow(
            config=cfg.label, contamination=cfg.contamination if cfg.n_outliers else 0.0,
            outlier=cfg.outlier if cfg.n_outliers else "none", h=h, method=method,
            amse=float(mean[0]), cp=float(mean[1]), score=float(mean[2]),
            mc_se_amse=float(se[0]), mc_se_cp=float(se[1]), mc_se_score=float(se[2]),
            n_ok=len(ok), n_failed=n_failed,
        ))
    return rows


def replicate_metrics(cfg, h, K=3, B=199, MC=200, methods=(WLE, MLE), rng=None, **kw):
    """Per-replicate ``MetricRow`` dicts (no averaging); handy for diagnostics."""
    rng = rng if rng is not None else RngStream(cfg.seed)
    return [_one_replicate(m, cfg, h, K, B, kw.get("alpha", 0.05), tuple(methods), rng,
                           kw.get("penalty"), kw.get("wle"), kw.get("p_max", DEFAULT_P_MAX))
            for m in range(MC)]
