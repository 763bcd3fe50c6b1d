"""``ffts`` command-line interface.

Usage::

    ffts <simulate|fit|forecast|evaluate|reproduce> [--config PATH] [--seed N]
         [--threads N] [--out DIR] [--method wle|mle|both] [--h N] [--k N|auto]
         [--b N] [--mc N] [--alpha F] [--input CSV] [--set KEY=VALUE ...]

Exit status is 0 on success, 1 for usage or configuration errors, 2 for
data errors and 3 for numerical failures.  Failures print one JSON object
to stderr; success prints one JSON object listing the artifacts to stdout.
Artifacts contain no timestamps, so a fixed seed gives byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import io as fio
from .config import RunConfig, load_config
from .core import FunctionalSeries, Grid, RngStream
from .exceptions import ConfigError, FftsError, ParseError
from .fpca import fit_fpca
from .holdout import holdout_k_selection, rolling_holdout, summarize
from .pipeline import fit_model, forecast_model
from .reference import OUTLIER_CODES, REFERENCE, SHIFTS, cells
from .simulation import DgpConfig, generate, run_experiment
from .smoothing import smooth_series
from .wle_ar import WleConfig

log = logging.getLogger("ffts")

COMMANDS = ("simulate", "fit", "forecast", "evaluate", "reproduce")

REPRODUCE_COLUMNS = (
    "table", "contamination", "h", "outlier", "method", "amse", "cp", "score",
    "mc_se_amse", "mc_se_cp", "mc_se_score", "n_ok", "n_failed",
    "ref_amse", "ref_cp", "ref_score",
)
METRIC_COLUMNS = ("curve_id", "method", "h", "amse", "cp", "score")
SUMMARY_COLUMNS = ("method", "n", "k", "amse", "cp", "score")


class UsageError(ConfigError):
    kind = "usage_error"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ffts", description="Robust functional time series forecasting.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="flat key=value config file")
    p.add_argument("--input", help="input CSV (wide or long layout)")
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int)
    p.add_argument("--out", help="output directory")
    p.add_argument("--method", choices=("wle", "mle", "both"))
    p.add_argument("--h", type=int)
    p.add_argument("--k", help="number of components or 'auto'")
    p.add_argument("--b", type=int, help="bootstrap replicates")
    p.add_argument("--mc", type=int, help="Monte Carlo replicates")
    p.add_argument("--alpha", type=float)
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override any config key (repeatable)")
    return p


def parse_overrides(args) -> dict:
    over = {}
    for item in args.set:
        if "=" not in item:
            raise UsageError(f"--set expects KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        over[k.strip()] = v.strip()
    for key in ("input", "seed", "threads", "out", "method", "h", "k", "b", "mc", "alpha"):
        val = getattr(args, key)
        if val is not None:
            over[key] = val
    return over


# -- shared steps --------------------------------------------------------------

def _wle(cfg: RunConfig) -> WleConfig:
    return WleConfig(kernel_ratio=cfg.kernel_ratio)


def _load_input(cfg: RunConfig) -> FunctionalSeries:
    if not cfg.input:
        raise ConfigError("this command needs an input CSV (--input or 'input = ...')")
    return fio.ingest_csv(cfg.input)


def _choose_k(cfg: RunConfig, series: FunctionalSeries):
    k = cfg.k_value()
    if k is not None:
        return k, "fixed"
    k = holdout_k_selection(series, cfg.candidates(), RngStream(cfg.seed), method=cfg.methods[0],
                            fraction=cfg.holdout_fraction, penalty=cfg.penalty_value(),
                            wle=_wle(cfg), p_max=cfg.p_max, threads=cfg.threads)
    return k, "holdout"


def _fit_all(cfg, series, K):
    smoothed = smooth_series(series, cfg.penalty_value())
    fpca = fit_fpca(smoothed.smooth, K)
    models = {m: fit_model(series, K, m, smoothed=smoothed, fpca=fpca, wle=_wle(cfg),
                           p_max=cfg.p_max) for m in cfg.methods}
    return smoothed, fpca, models


def _out_dir(cfg) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


# -- commands ------------------------------------------------------------------

def cmd_simulate(cfg: RunConfig) -> list:
    dgp = DgpConfig(N=cfg.N, J=cfg.J, noise_sd=cfg.noise_sd, contamination=cfg.contamination,
                    outlier=cfg.outlier, shift=cfg.shift, seed=cfg.seed)
    sim = generate(dgp, RngStream(cfg.seed))
    out = _out_dir(cfg)
    truth = sim.series.with_values(sim.truth)
    meta = {
        "N": dgp.N, "J": dgp.J, "noise_sd": dgp.noise_sd, "contamination": dgp.contamination,
        "outlier": dgp.outlier, "shift": dgp.shift, "seed": cfg.seed, "label": dgp.label,
        "outlier_ids": [sim.series.ids[i] for i in sim.outliers],
    }
    return [
        fio.write_wide_csv(sim.series, out / "series.csv"),
        fio.write_wide_csv(truth, out / "truth.csv"),
        fio.write_json(meta, out / "simulation.json"),
    ]


def model_summary(series, K, how, smoothed, fpca, models) -> dict:
    summary = {
        "n_curves": series.n_curves,
        "n_points": series.n_points,
        "grid": series.grid.points,
        "k": K,
        "k_selection": how,
        "smoothing_penalty": smoothed.penalty,
        "fpca": {
            "eigenvalues": fpca.eigenvalues,
            "explained_variance_ratio": fpca.explained_variance_ratio,
            "total_variance": fpca.total_variance,
            "mean": fpca.mean,
            "components": fpca.components,
        },
        "models": {},
    }
    for method, model in models.items():
        summary["models"][method] = [
            {
                "component": k + 1,
                "order": f.order,
                "coefficients": f.coefficients,
                "intercept": f.intercept,
                "sigma": f.sigma,
                "converged": bool(f.converged),
                "iterations": f.n_iter,
                "start": f.start,
                "weights": f.weights,
            }
            for k, f in enumerate(model.fits)
        ]
    return summary


def cmd_fit(cfg: RunConfig) -> list:
    series = _load_input(cfg)
    K, how = _choose_k(cfg, series)
    smoothed, fpca, models = _fit_all(cfg, series, K)
    out = _out_dir(cfg)
    return [fio.write_json(model_summary(series, K, how, smoothed, fpca, models), out / "model.json")]


def forecast_table(res, grid: Grid) -> FunctionalSeries:
    """Stack point/lower/upper rows per horizon into one wide table."""
    rows, ids = [], []
    for i in range(res.h):
        for band, arr in (("point", res.point), ("lower", res.lower), ("upper", res.upper)):
            rows.append(arr[i])
            ids.append(f"{i + 1}:{band}")
    return FunctionalSeries(np.array(rows), grid, res.method, tuple(ids))


def cmd_forecast(cfg: RunConfig) -> list:
    series = _load_input(cfg)
    K, _how = _choose_k(cfg, series)
    _smoothed, _fpca, models = _fit_all(cfg, series, K)
    out = _out_dir(cfg)
    root = RngStream(cfg.seed)
    results, paths = {}, []
    for j, (method, model) in enumerate(models.items()):
        res = forecast_model(model, cfg.h, cfg.b, cfg.alpha, root.substream(j), workers=cfg.threads)
        results[method] = res
        paths.append(fio.write_wide_csv(forecast_table(res, series.grid),
                                        out / f"forecast_{method.lower()}.csv", id_header="h:band"))
    paths.append(fio.write_forecast_svg(out / "forecast.svg", series, results,
                                        title=f"one-step forecast, K={K}"))
    return paths


def cmd_evaluate(cfg: RunConfig) -> list:
    series = _load_input(cfg)
    K, _how = _choose_k(cfg, series)
    rows = rolling_holdout(series, K, cfg.methods, cfg.b, cfg.alpha, RngStream(cfg.seed),
                           fraction=cfg.holdout_fraction, penalty=cfg.penalty_value(),
                           wle=_wle(cfg), p_max=cfg.p_max, threads=cfg.threads)
    out = _out_dir(cfg)
    table = [{"curve_id": r.config, "method": r.method, "h": r.h, "amse": r.amse,
              "cp": r.coverage, "score": r.score} for r in rows]
    n_per = len(rows) // len(cfg.methods)
    summ = [{"method": s.method, "n": n_per, "k": K, "amse": s.amse, "cp": s.coverage,
             "score": s.score} for s in summarize(rows)]
    return [
        fio.write_table_csv(table, out / "metrics.csv", METRIC_COLUMNS),
        fio.write_table_csv(summ, out / "metrics_summary.csv", SUMMARY_COLUMNS),
    ]


def reproduce_rows(cfg: RunConfig) -> list:
    K = cfg.k_value()
    if K is None:
        raise ConfigError("reproduce needs a fixed k")
    root = RngStream(cfg.seed)
    rows, cell_id = [], 0
    for table in cfg.table_set():
        for g, h, code in cells(table):
            dgp = DgpConfig(N=cfg.N, J=cfg.J, noise_sd=cfg.noise_sd, contamination=g,
                            outlier=OUTLIER_CODES[code], shift=SHIFTS[table], seed=cfg.seed)
            res = run_experiment(dgp, h, K=K, B=cfg.b, MC=cfg.mc, methods=cfg.methods,
                                 rng=root.substream(cell_id), alpha=cfg.alpha,
                                 penalty=cfg.penalty_value(), wle=_wle(cfg), p_max=cfg.p_max,
                                 threads=cfg.threads)
            cell_id += 1
            for r in res:
                ref = REFERENCE.get((table, g, h, code, r.method), (float("nan"),) * 3)
                rows.append({
                    "table": table, "contamination": g, "h": h, "outlier": code,
                    "method": r.method, "amse": r.amse, "cp": r.cp, "score": r.score,
                    "mc_se_amse": r.mc_se_amse, "mc_se_cp": r.mc_se_cp,
                    "mc_se_score": r.mc_se_score, "n_ok": r.n_ok, "n_failed": r.n_failed,
                    "ref_amse": ref[0], "ref_cp": ref[1], "ref_score": ref[2],
                })
            log.info("table %s cell g=%s h=%d %s done", table, g, h, code)
    return rows


def cmd_reproduce(cfg: RunConfig) -> list:
    rows = reproduce_rows(cfg)
    out = _out_dir(cfg)
    return [fio.write_table_csv(rows, out / "reproduce.csv", REPRODUCE_COLUMNS)]


HANDLERS = {
    "simulate": cmd_simulate,
    "fit": cmd_fit,
    "forecast": cmd_forecast,
    "evaluate": cmd_evaluate,
    "reproduce": cmd_reproduce,
}


def _error_payload(exc) -> dict:
    if isinstance(exc, FftsError):
        code, kind = exc.exit_code, exc.kind
    elif isinstance(exc, OSError):
        code, kind = 2, "io_error"
    else:
        code, kind = 3, "internal_error"
    payload = {"status": "error", "error": kind, "exit_code": code, "message": str(exc)}
    if isinstance(exc, ParseError):
        payload["line"] = exc.line
        payload["column"] = exc.column
    return payload


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="ffts: %(levelname)s: %(message)s")
    try:
        args = build_parser().parse_args(argv)
        cfg = load_config(args.config, parse_overrides(args))
        paths = HANDLERS[args.command](cfg)
    except Exception as exc:  # every failure becomes a JSON payload and an exit code
        payload = _error_payload(exc)
        print(json.dumps(payload, sort_keys=True), file=sys.stderr)
        return payload["exit_code"]
    print(json.dumps({"status": "ok", "command": args.command,
                      "artifacts": [str(p) for p in paths]}, sort_keys=True))
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
