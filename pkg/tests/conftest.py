import importlib

import numpy as np
import pytest

from ffts import _kernels_py
from ffts.core import RngStream


def ar_series(gen, n, phi, sigma=1.0, burn=200):
    """Zero-mean Gaussian AR(len(phi)) path after ``burn`` warm-up steps."""
    phi = np.atleast_1d(phi)
    p = phi.size
    e = gen.normal(0.0, sigma, size=n + burn)
    x = np.zeros(n + burn)
    for t in range(p, n + burn):
        x[t] = phi @ x[t - p:t][::-1] + e[t]
    return x[burn:]


def _backends():
    out = [pytest.param(_kernels_py, id="python")]
    try:
        mod = importlib.import_module("ffts._kernels")
    except ImportError:
        out.append(pytest.param(None, id="cython", marks=pytest.mark.skip("extension not built")))
    else:
        out.append(pytest.param(mod, id="cython"))
    return out


@pytest.fixture(params=_backends())
def backend(request):
    return request.param


@pytest.fixture
def gen():
    return RngStream(20240601).generator()


ACCEPTANCE_LINES = []


def record_acceptance(criterion, ok, detail):
    """Queue one pass/fail line for the terminal summary."""
    ACCEPTANCE_LINES.append((str(criterion), "PASS" if ok else "FAIL", detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for crit, status, detail in sorted(ACCEPTANCE_LINES, key=lambda r: r[0]):
        terminalreporter.write_line(f"criterion {crit}: {status}  {detail}")
