import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ffts.exceptions import DimensionError, InvalidDataError
from ffts.metrics import amse, coverage, evaluate, interval_score


def _loop_amse(a, p):
    tot = 0.0
    for i in range(a.shape[0]):
        for j in range(a.shape[1]):
            tot += (a[i, j] - p[i, j]) ** 2
    return tot / a.size


def _loop_cov(a, lo, hi):
    n = 0
    for i in range(a.shape[0]):
        for j in range(a.shape[1]):
            n += lo[i, j] <= a[i, j] <= hi[i, j]
    return n / a.size


def _loop_score(a, lo, hi, alpha):
    tot = 0.0
    for i in range(a.shape[0]):
        for j in range(a.shape[1]):
            s = hi[i, j] - lo[i, j]
            if a[i, j] < lo[i, j]:
                s += 2 / alpha * (lo[i, j] - a[i, j])
            if a[i, j] > hi[i, j]:
                s += 2 / alpha * (a[i, j] - hi[i, j])
            tot += s
    return tot / a.size


def _fixture(seed, h=3, J=5):
    g = np.random.default_rng(seed)
    a = g.normal(size=(h, J))
    mid = a + g.normal(0, 0.8, size=(h, J))
    half = g.uniform(0, 1.5, size=(h, J))
    return a, mid, mid - half, mid + half


class TestAmse:
    def test_exact(self):
        a = np.arange(6.0).reshape(2, 3)
        assert amse(a, a) == 0
        assert amse(a, a + 0.1) == pytest.approx(0.01)

    def test_shape_mismatch(self):
        with pytest.raises(DimensionError):
            amse(np.zeros((2, 3)), np.zeros((3, 2)))

    def test_loop_oracle(self):
        for seed in range(50):
            a, p, _, _ = _fixture(seed, 2, 3)
            assert abs(amse(a, p) - _loop_amse(a, p)) <= 1e-12


class TestCoverage:
    def test_wide_and_degenerate(self, gen):
        a = gen.normal(size=(2, 4))
        assert coverage(a, a - 1e9, a + 1e9) == 1
        assert coverage(a, a, a) == 1

    def test_half_outside(self):
        a = np.zeros((2, 4))
        lo = np.array([[-1, -1, 1, 1], [-1, 1, -1, 1]], float)
        assert coverage(a, lo, lo + 1.5) == 0.5

    def test_invalid_interval(self):
        with pytest.raises(InvalidDataError):
            coverage(np.zeros(3), np.ones(3), np.zeros(3))

    def test_loop_oracle(self):
        for seed in range(50):
            a, _, lo, hi = _fixture(seed)
            assert abs(coverage(a, lo, hi) - _loop_cov(a, lo, hi)) <= 1e-12


class TestIntervalScore:
    def test_fixture_above(self):
        assert interval_score([[1.5]], [[0.0]], [[1.0]], 0.05) == 21.0

    def test_fixture_below(self):
        assert interval_score([[-0.25]], [[0.0]], [[1.0]], 0.5) == 2.0

    def test_inside_is_width(self, gen):
        a = gen.normal(size=(3, 4))
        lo, hi = a - gen.uniform(0, 1, a.shape), a + gen.uniform(0, 1, a.shape)
        assert interval_score(a, lo, hi, 0.05) == pytest.approx(np.mean(hi - lo), rel=1e-14)

    def test_loop_oracle(self):
        for seed in range(50):
            a, _, lo, hi = _fixture(seed)
            for alpha in (0.05, 0.2):
                assert abs(interval_score(a, lo, hi, alpha) - _loop_score(a, lo, hi, alpha)) <= 1e-12

    def test_bad_alpha(self):
        with pytest.raises(InvalidDataError):
            interval_score([[0.0]], [[0.0]], [[1.0]], 0.0)

    @settings(max_examples=80, deadline=None)
    @given(st.integers(0, 2**31 - 1), st.floats(0.01, 0.99))
    def test_at_least_width_equality_iff_covered(self, seed, alpha):
        a, _, lo, hi = _fixture(seed)
        s = interval_score(a, lo, hi, alpha)
        w = float(np.mean(hi - lo))
        assert s >= w - 1e-12
        if coverage(a, lo, hi) == 1:
            assert s == pytest.approx(w, rel=1e-12)
        else:
            assert s > w

    def test_narrower_covering_interval_scores_lower(self, gen):
        a = gen.normal(size=(2, 5))
        lo, hi = a - 0.3, a + 0.4
        assert interval_score(a, lo, hi, 0.05) < interval_score(a, lo - 0.2, hi + 0.1, 0.05)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**31 - 1))
    def test_permutation_invariance(self, seed):
        a, p, lo, hi = _fixture(seed)
        perm = np.random.default_rng(seed).permutation(a.shape[1])
        pa, pp, plo, phi = (x[:, perm] for x in (a, p, lo, hi))
        assert amse(pa, pp) == pytest.approx(amse(a, p), rel=1e-12)
        assert coverage(pa, plo, phi) == coverage(a, lo, hi)
        assert interval_score(pa, plo, phi, 0.05) == pytest.approx(interval_score(a, lo, hi, 0.05),
                                                                   rel=1e-12)


def test_evaluate_row():
    a, p, lo, hi = _fixture(1)
    row = evaluate(a, p, lo, hi, 0.05, h=3, method="WLE", config="clean")
    assert row.amse == amse(a, p)
    assert row.coverage == coverage(a, lo, hi)
    assert row.score == interval_score(a, lo, hi, 0.05)
    assert (row.h, row.method, row.config) == (3, "WLE", "clean")
    assert 0 <= row.coverage <= 1 and row.score >= 0
