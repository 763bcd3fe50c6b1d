"""Acceptance criteria 1-8, each at its stated tolerance.

Every test records one PASS/FAIL line that is printed in the terminal
summary.  Criteria 1-4 share one desk-scale ``ffts reproduce`` run
(N=100, J=12, K=3, MC=200, B=199, seed 12345, Table 1 and Table 2 cells).
"""

import csv
import time

import numpy as np
import pytest
import scipy.linalg

from ffts.cli import main
from ffts.core import FunctionalSeries, Grid, RngStream, inner_product
from ffts.fpca import fit_fpca
from ffts.metrics import amse, coverage, interval_score
from ffts.wle_ar import WleConfig, fit_ar_mle, fit_ar_wle, pearson_residuals, raf_weight

from conftest import ar_series, record_acceptance

SEED = 12345
RUNTIME_LIMIT = 600.0


@pytest.fixture(scope="module")
def reproduce(tmp_path_factory):
    out = tmp_path_factory.mktemp("reproduce")
    t0 = time.perf_counter()
    code = main(["reproduce", "--out", str(out), "--seed", str(SEED), "--mc", "200", "--b", "199",
                 "--k", "3"])
    elapsed = time.perf_counter() - t0
    assert code == 0
    with open(out / "reproduce.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    table = {}
    for r in rows:
        key = (r["table"], float(r["contamination"]), int(r["h"]), r["outlier"], r["method"])
        table[key] = {k: float(r[k]) for k in ("amse", "cp", "score", "mc_se_amse")}
    return table, elapsed


def _check(criterion, parts):
    ok = all(p[0] for p in parts)
    record_acceptance(criterion, ok, "; ".join(p[1] for p in parts))
    assert ok, parts


def test_criterion_1_clean_parity(reproduce):
    table, elapsed = reproduce
    w = table[("1", 0.0, 1, "none", "WLE")]
    m = table[("1", 0.0, 1, "none", "MLE")]
    _check(1, [
        (0.020 <= w["amse"] <= 0.027, f"AMSE(WLE)={w['amse']:.4f} in [0.020,0.027]"),
        (abs(w["amse"] - m["amse"]) < 0.002, f"|diff|={abs(w['amse'] - m['amse']):.5f} < 0.002"),
        (elapsed < RUNTIME_LIMIT, f"reproduce runtime {elapsed:.0f}s < {RUNTIME_LIMIT:.0f}s"),
    ])


def test_criterion_2_coverage_and_score(reproduce):
    w = reproduce[0][("1", 0.0, 1, "none", "WLE")]
    _check(2, [
        (abs(w["cp"] - 0.94) <= 0.03, f"Cp(WLE)={w['cp']:.4f} within 0.94+/-0.03"),
        (0.6 <= w["score"] <= 0.9, f"Score(WLE)={w['score']:.4f} in [0.6,0.9]"),
    ])


def test_criterion_3_shape_robustness(reproduce):
    t = reproduce[0]
    w, m = t[("1", 0.1, 10, "SO", "WLE")], t[("1", 0.1, 10, "SO", "MLE")]
    rs, ra = m["score"] / w["score"], m["amse"] / w["amse"]
    _check(3, [(rs > 1.4, f"Score ratio {rs:.2f} > 1.4"), (ra > 1.3, f"AMSE ratio {ra:.2f} > 1.3")])


def test_criterion_4_large_magnitude(reproduce):
    t = reproduce[0]
    w, m = t[("2", 0.1, 1, "MO", "WLE")], t[("2", 0.1, 1, "MO", "MLE")]
    ra, rs = m["amse"] / w["amse"], m["score"] / w["score"]
    _check(4, [(ra > 3, f"AMSE ratio {ra:.2f} > 3"), (rs > 2.5, f"Score ratio {rs:.2f} > 2.5")])


class TestCriterion5:
    def test_weight_function(self):
        # below delta ~ 1e-7 the exact 1 - w ~ delta**2 / 4 is under float64 resolution
        pos = np.geomspace(1e-4, 1e8, 20001)
        w = raf_weight(pos)
        full = raf_weight(np.concatenate([np.linspace(-1, 0, 1001), pos]))
        parts = [
            (raf_weight(0.0) == 1.0, "w(0)=1"),
            (bool(np.all(w < 1) and np.all(np.diff(w) < 0)), "w<1 and strictly decreasing on [1e-4,1e8]"),
            (bool(np.all((full >= 0) & (full <= 1))), "range [0,1]"),
        ]
        _check("5a", parts)

    @pytest.mark.slow
    def test_residual_sum_agreement(self):
        hits = 0
        for r in range(200):
            x = ar_series(RngStream(99, r).generator(), 2000, 0.5)
            m, w = fit_ar_mle(x, 1), fit_ar_wle(x, 1)
            base = np.sum(m.residuals**2)
            hits += abs(np.sum(w.weights * w.residuals**2) - base) / base < 0.05
        _check("5b", [(hits >= 190, f"residual sums within 5% in {hits}/200 runs (need 190)")])

    def test_unit_weights_equal_mle(self):
        worst = 0.0
        for r in range(20):
            x = ar_series(RngStream(98, r).generator(), 300, [0.5, -0.2])
            x[::23] += 7
            m = fit_ar_mle(x, 2)
            w = fit_ar_wle(x, 2, WleConfig(unit_weights=True))
            worst = max(worst, np.max(np.abs(w.coefficients - m.coefficients)), abs(w.sigma - m.sigma))
        _check("5c", [(worst <= 1e-10, f"max |WLE(unit) - MLE| = {worst:.1e} <= 1e-10")])

    @pytest.mark.xfail(strict=True, reason=(
        "closed form gives f*/m* - 1 = sqrt(6) - 1 = 1.44949, which is 1.09e-3 from the "
        "stated 1.4484 (computed from densities rounded to 4 digits); see decisions ledger"))
    def test_pearson_fixture(self):
        d = float(pearson_residuals(np.array([0.0]), 1.0, 0.2)[0])
        ok = abs(d - 1.4484) <= 1e-3
        record_acceptance("5d", ok, f"delta(0)={d:.5f}, |delta-1.4484|={abs(d - 1.4484):.2e} <= 1e-3 "
                                    f"(exact sqrt(6)-1={np.sqrt(6) - 1:.5f})")
        assert ok


def test_criterion_6_decomposition():
    orth = recon = 0.0
    mono_eig = mono_err = oracle = True
    for r in range(50):
        g = RngStream(600, r).generator()
        N, J = int(g.integers(4, 25)), int(g.integers(3, 12))
        grid = Grid(np.cumsum(g.uniform(0.1, 2.0, J)))
        x = g.normal(size=(N, J)) @ g.normal(size=(J, J))
        s = FunctionalSeries(x, grid)
        Kmax = min(N, J) - 1
        errs = []
        for K in range(1, Kmax + 1):
            m = fit_fpca(s, K)
            G = inner_product(m.components[:, None, :], m.components[None, :, :], grid)
            orth = max(orth, float(np.max(np.abs(G - np.eye(K)))))
            rec = m.mean + m.scores @ m.components + m.residual_functions
            recon = max(recon, float(np.max(np.abs(rec - x) / (np.abs(x) + 1))))
            mono_eig &= bool(np.all(np.diff(m.eigenvalues) <= 1e-12 * m.eigenvalues[0]))
            errs.append(np.sum(m.residual_functions**2 @ grid.weights))
        mono_err &= bool(np.all(np.diff(errs) <= 1e-10 * errs[0]))
        c = x - x.mean(axis=0)
        C = c.T @ c / (N - 1)
        lam = np.sort(scipy.linalg.eigvals(C @ np.diag(grid.weights)).real)[::-1][:Kmax]
        oracle &= bool(np.allclose(m.eigenvalues, lam, rtol=1e-8, atol=1e-10 * lam[0]))
    _check(6, [
        (orth <= 1e-8, f"orthonormality err {orth:.1e} <= 1e-8"),
        (recon <= 1e-10, f"reconstruction err {recon:.1e} <= 1e-10"),
        (mono_eig, "eigenvalues non-increasing"),
        (mono_err, "reconstruction error non-increasing in K"),
        (oracle, "eigenvalues match brute-force C W oracle"),
    ])


def test_criterion_7_metrics():
    worst = 0.0
    for r in range(100):
        g = RngStream(700, r).generator()
        h, J = int(g.integers(1, 11)), int(g.integers(2, 25))
        a, p = g.normal(size=(h, J)), g.normal(size=(h, J))
        lo = p - g.uniform(0, 1, (h, J))
        hi = p + g.uniform(0, 1, (h, J))
        naive_amse = sum((a[i, j] - p[i, j]) ** 2 for i in range(h) for j in range(J)) / (h * J)
        naive_cov = sum(lo[i, j] <= a[i, j] <= hi[i, j] for i in range(h) for j in range(J)) / (h * J)
        worst = max(worst, abs(amse(a, p) - naive_amse), abs(coverage(a, lo, hi) - naive_cov))
    s21 = interval_score([[1.5]], [[0.0]], [[1.0]], 0.05)
    s2 = interval_score([[-0.25]], [[0.0]], [[1.0]], 0.5)
    _check(7, [
        (s21 == 21.0, f"score fixture {s21} == 21"),
        (s2 == 2.0, f"score fixture {s2} == 2"),
        (worst <= 1e-12, f"AMSE/coverage vs loops {worst:.1e} <= 1e-12"),
    ])


def _snapshot(d):
    return {p.relative_to(d).as_posix(): p.read_bytes() for p in sorted(d.rglob("*")) if p.is_file()}


def test_criterion_8_determinism(tmp_path):
    data = tmp_path / "data"
    assert main(["simulate", "--seed", "3", "--out", str(data), "--set", "N=60",
                 "--set", "contamination=0.05", "--set", "outlier=magnitude"]) == 0
    inp = str(data / "series.csv")
    commands = {
        "simulate": ["simulate", "--set", "N=60", "--set", "outlier=shape", "--set", "contamination=0.1"],
        "fit": ["fit", "--input", inp, "--k", "auto"],
        "forecast": ["forecast", "--input", inp, "--h", "3", "--b", "150"],
        "evaluate": ["evaluate", "--input", inp, "--b", "49"],
        "reproduce": ["reproduce", "--mc", "6", "--b", "29", "--set", "N=50", "--set", "tables=2"],
    }
    parts = []
    for name, argv in commands.items():
        snaps = []
        for run, threads in enumerate((1, 1, 3)):
            out = tmp_path / f"{name}-{run}"
            assert main(argv + ["--seed", "17", "--threads", str(threads), "--out", str(out)]) == 0
            snaps.append(_snapshot(out))
        same = snaps[0] == snaps[1] == snaps[2] and len(snaps[0]) > 0
        parts.append((same, f"{name}: {len(snaps[0])} files identical x3 (threads 1,1,3)"))
    _check(8, parts)
