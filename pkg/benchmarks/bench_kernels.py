"""Compiled vs pure-Python kernel timings.

Run from the repository root::

    python benchmarks/bench_kernels.py [--repeat 5]

Times ``pearson_residuals`` and ``wle_iterate`` from both backends on the
same inputs, checks that they agree, and times one Monte Carlo replicate of
the clean simulation design end to end with each backend (the pure-Python
one in a subprocess with ``FFTS_PURE_PYTHON=1``).
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from ffts import _kernels_py
from ffts.kernels import compiled_available
from ffts.wle_ar import fit_ar_mle, lag_design

REPLICATE_SNIPPET = """
import time
from ffts.core import RngStream
from ffts.simulation import DgpConfig, run_experiment
t = time.perf_counter()
run_experiment(DgpConfig(), 1, K=3, B=199, MC=5, rng=RngStream(1))
print((time.perf_counter() - t) / 5)
"""


def _best(fn, repeat, number):
    return min(timeit.repeat(fn, repeat=repeat, number=number)) / number


def _ar_inputs(n, seed=0):
    rng = np.random.default_rng(seed)
    x = np.zeros(n)
    for t in range(1, n):
        x[t] = 0.5 * x[t - 1] + rng.normal()
    x[rng.choice(n, size=n // 20, replace=False)] += 6.0
    fit = fit_ar_mle(x, 1, include_mean=True)
    y, X = lag_design(x, 1, include_mean=True)
    coef0 = np.concatenate([[fit.intercept], fit.coefficients])
    return y, X, coef0, fit.sigma


def _replicate_time(pure):
    env = dict(os.environ)
    if pure:
        env["FFTS_PURE_PYTHON"] = "1"
    out = subprocess.run([sys.executable, "-c", REPLICATE_SNIPPET], env=env,
                         capture_output=True, text=True, check=True)
    return float(out.stdout.strip())


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--sizes", default="100,500,2000")
    args = ap.parse_args(argv)
    if not compiled_available():
        print("compiled extension not built; nothing to compare")
        return 1
    from ffts import _kernels

    print(f"{'kernel':<18}{'n':>6}{'python ms':>12}{'cython ms':>12}{'speedup':>9}{'max |diff|':>12}")
    for n in (int(s) for s in args.sizes.split(",")):
        y, X, coef0, sigma = _ar_inputs(n)
        resid = y - X @ coef0
        number = max(1, 2000 // n)

        a = _kernels_py.pearson_residuals(resid, sigma, 0.2)
        b = _kernels.pearson_residuals(resid, sigma, 0.2)
        tp = _best(lambda: _kernels_py.pearson_residuals(resid, sigma, 0.2), args.repeat, number)
        tc = _best(lambda: _kernels.pearson_residuals(resid, sigma, 0.2), args.repeat, number)
        diff = float(np.max(np.abs(a - b) / np.maximum(1.0, np.abs(a))))
        print(f"{'pearson_residuals':<18}{n:>6}{tp * 1e3:>12.3f}{tc * 1e3:>12.3f}{tp / tc:>9.1f}{diff:>12.1e}")

        call = (y, X, coef0, sigma, 0.2, 500, 1e-8, False, 1)
        ra = _kernels_py.wle_iterate(*call)
        rb = _kernels.wle_iterate(*call)
        tp = _best(lambda: _kernels_py.wle_iterate(*call), args.repeat, number)
        tc = _best(lambda: _kernels.wle_iterate(*call), args.repeat, number)
        diff = float(np.max(np.abs(ra[0] - rb[0])))
        print(f"{'wle_iterate':<18}{n:>6}{tp * 1e3:>12.3f}{tc * 1e3:>12.3f}{tp / tc:>9.1f}{diff:>12.1e}")

    tp = _replicate_time(pure=True)
    tc = _replicate_time(pure=False)
    print(f"{'MC replicate':<18}{'':>6}{tp * 1e3:>12.1f}{tc * 1e3:>12.1f}{tp / tc:>9.1f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
