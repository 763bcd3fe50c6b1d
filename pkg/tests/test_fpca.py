import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from ffts.core import FunctionalSeries, Grid, RngStream, inner_product
from ffts.exceptions import DimensionError
from ffts.fpca import fit_fpca, reconstruct, weighted_covariance
from ffts.simulation import DgpConfig, base_curve, generate
from ffts.smoothing import smooth_series


def _random_series(gen, N, J, uneven=False):
    pts = np.cumsum(gen.uniform(0.2, 2.0, J)) if uneven else np.arange(1.0, J + 1)
    return FunctionalSeries(gen.normal(size=(N, J)) @ gen.normal(size=(J, J)), Grid(pts))


def _brute_force(values, grid):
    """Eigenpairs of C W (generalized problem), normalized to phi' W phi = 1."""
    c = values - values.mean(axis=0)
    C = c.T @ c / (values.shape[0] - 1)
    W = np.diag(grid.weights)
    lam, vec = scipy.linalg.eig(C @ W)
    order = np.argsort(-lam.real)
    lam, vec = lam.real[order], vec.real[:, order]
    vec = vec / np.sqrt(np.einsum("jk,j,jk->k", vec, grid.weights, vec))
    return lam, vec


seeds = st.integers(0, 2**31 - 1)


class TestFitFpca:
    @settings(max_examples=30, deadline=None)
    @given(seeds, st.integers(3, 12), st.integers(3, 10), st.booleans())
    def test_orthonormal_sorted_reconstructs(self, seed, N, J, uneven):
        gen = np.random.default_rng(seed)
        s = _random_series(gen, N, J, uneven)
        K = min(N, J) - 1
        m = fit_fpca(s, K)
        G = inner_product(m.components[:, None, :], m.components[None, :, :], s.grid)
        assert np.allclose(G, np.eye(K), atol=1e-8)
        assert np.all(np.diff(m.eigenvalues) <= 1e-12 * m.eigenvalues[0])
        assert np.all(m.eigenvalues >= 0)
        recon = m.mean + m.scores @ m.components + m.residual_functions
        assert np.all(np.abs(recon - s.values) <= 1e-10 * (np.abs(s.values) + 1))
        sd = m.scores.std(axis=0)
        assert np.all(np.abs(m.scores.mean(axis=0)) <= 1e-8 * (sd + 1))

    @pytest.mark.parametrize("uneven", [False, True])
    def test_brute_force_oracle(self, gen, uneven):
        s = _random_series(gen, 8, 5, uneven)
        m = fit_fpca(s, 4)
        lam, vec = _brute_force(s.values, s.grid)
        assert np.allclose(m.eigenvalues, lam[:4], rtol=1e-8)
        for k in range(4):
            v = vec[:, k] * np.sign(vec[np.argmax(np.abs(vec[:, k])), k])
            assert np.allclose(m.components[k], v, atol=1e-8)

    def test_sign_convention(self, gen):
        m = fit_fpca(_random_series(gen, 10, 6), 3)
        for phi in m.components:
            assert phi[np.argmax(np.abs(phi))] > 0

    def test_rank_one(self, gen):
        g = Grid.integers(12)
        curve = np.sin(g.points / 2)
        vals = 3.0 + np.outer(gen.normal(size=30), curve)
        m = fit_fpca(FunctionalSeries(vals, g), 3)
        assert m.eigenvalues[0] / m.total_variance > 0.9999
        assert np.all(m.eigenvalues[1:] < 1e-10 * m.eigenvalues[0])

    def test_variance_bound(self, gen):
        s = _random_series(gen, 15, 7)
        c = s.values - s.values.mean(axis=0)
        total = np.sum(c**2 @ s.grid.weights) / 14
        for K in range(1, 7):
            assert fit_fpca(s, K).eigenvalues.sum() <= total * (1 + 1e-12)

    def test_variance_equality_when_n_le_j(self, gen):
        s = _random_series(gen, 6, 10)
        c = s.values - s.values.mean(axis=0)
        total = np.sum(c**2 @ s.grid.weights) / 5
        m = fit_fpca(s, 5)
        assert m.eigenvalues.sum() == pytest.approx(total, rel=1e-10)
        assert m.total_variance == pytest.approx(total, rel=1e-10)

    def test_dgp_mean_curve(self):
        sim = generate(DgpConfig(), RngStream(5))
        m = fit_fpca(smooth_series(sim.series).smooth, 3)
        assert np.max(np.abs(m.mean - base_curve(12))) < 0.05

    def test_residual_error_monotone_in_k(self, gen):
        s = _random_series(gen, 20, 9, uneven=True)
        err = [np.sum(fit_fpca(s, K).residual_functions ** 2 @ s.grid.weights) for K in range(1, 9)]
        assert np.all(np.diff(err) <= 1e-10 * err[0])

    def test_scores_uncorrelated(self, gen):
        s = _random_series(gen, 40, 8)
        m = fit_fpca(s, 5)
        corr = np.corrcoef(m.scores.T)
        assert np.all(np.abs(corr - np.eye(5)) < 1e-6)

    @pytest.mark.parametrize("K", [0, 6, 9])
    def test_k_out_of_range(self, gen, K):
        with pytest.raises(DimensionError):
            fit_fpca(_random_series(gen, 10, 6), K)

    def test_weighted_covariance_symmetric(self, gen):
        x = gen.normal(size=(9, 4))
        C = weighted_covariance(x - x.mean(axis=0), np.array([0.5, 1, 1, 0.5]))
        assert np.array_equal(C, C.T)


class TestReconstruct:
    @pytest.fixture
    def model(self, gen):
        return fit_fpca(_random_series(gen, 12, 6), 3)

    def test_zero_scores(self, model):
        assert np.allclose(reconstruct(model, np.zeros(3)), model.mean)

    def test_own_scores(self, model):
        t = 4
        expect = model.mean + model.scores[t] @ model.components
        assert np.allclose(reconstruct(model, model.scores[t]), expect, atol=1e-12)
        full = model.mean + model.scores[t] @ model.components + model.residual_functions[t]
        assert np.allclose(reconstruct(model, model.scores[t]), full - model.residual_functions[t])

    def test_unit_vectors(self, model):
        for k in range(3):
            e = np.zeros(3)
            e[k] = 1
            assert np.allclose(reconstruct(model, e), model.mean + model.components[k])

    def test_length_mismatch(self, model):
        with pytest.raises(DimensionError):
            reconstruct(model, np.zeros(2))
