import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from calibo.exceptions import DomainError, InvalidDatasetError, InvalidInputError
from calibo.surrogate import (
    LENGTHSCALE_GRID,
    NOISE_FLOOR,
    NOISE_VARIANCE_GRID,
    SIGNAL_VARIANCE_GRID,
    Dataset,
    GaussianForecast,
    GaussianProcess,
    Kernel,
    fit,
    forecast_cdf,
    forecast_quantile,
    predict,
)

from conftest import dense_posterior


class TestKernel:
    def test_values(self):
        k = Kernel(0.5, 2.0)
        A = np.array([[0.0], [1.0]])
        K = k(A, A)
        np.testing.assert_allclose(np.diag(K), 2.0)
        assert K[0, 1] == pytest.approx(2.0 * np.exp(-0.5 * 1.0 / 0.25))

    def test_noise_floor_enforced(self):
        with pytest.raises(ValueError):
            Kernel(1.0, 1.0, 1e-9)

    @pytest.mark.parametrize("bad", [0.0, -1.0, np.nan])
    def test_positive_parameters(self, bad):
        with pytest.raises(ValueError):
            Kernel(bad, 1.0)

    def test_grids(self):
        assert len(LENGTHSCALE_GRID) == 24
        assert LENGTHSCALE_GRID[0] == pytest.approx(1e-2)
        assert LENGTHSCALE_GRID[-1] == pytest.approx(10.0)
        np.testing.assert_array_equal(SIGNAL_VARIANCE_GRID, [0.25, 1.0, 4.0])
        assert len(NOISE_VARIANCE_GRID) == 8
        assert NOISE_VARIANCE_GRID[0] == pytest.approx(1e-6)
        assert NOISE_VARIANCE_GRID[-1] == pytest.approx(1e-1)


class TestDataset:
    def test_immutable(self):
        d = Dataset([[0.1], [0.2]], [1.0, 2.0])
        with pytest.raises(ValueError):
            d.X[0, 0] = 5.0
        d2 = d.append([0.3], 3.0)
        assert len(d) == 2 and len(d2) == 3

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidDatasetError):
            Dataset.from_pairs([([0.1], 1.0), ([0.1, 0.2], 2.0)])

    def test_length_mismatch(self):
        with pytest.raises(InvalidDatasetError):
            Dataset([[0.1], [0.2]], [1.0])

    def test_take(self):
        d = Dataset(np.arange(6.0).reshape(3, 2) / 10, [1.0, 2.0, 3.0])
        np.testing.assert_array_equal(d.take([2, 0]).y, [3.0, 1.0])


class TestForecast:
    def test_cdf_median(self):
        assert forecast_cdf(GaussianForecast(0.0, 1.0), 0.0) == 0.5

    def test_cdf_975(self):
        assert forecast_cdf(GaussianForecast(0.0, 1.0), 1.959964) == pytest.approx(0.975, abs=1e-6)

    def test_location_scale(self, rng):
        z = rng.normal(size=100)
        np.testing.assert_allclose(
            forecast_cdf(GaussianForecast(3.0, 2.0), 3.0 + 2.0 * z),
            forecast_cdf(GaussianForecast(0.0, 1.0), z),
            rtol=0,
            atol=1e-15,
        )

    def test_infinite_arguments(self):
        f = GaussianForecast(0.0, 1.0)
        assert forecast_cdf(f, np.inf) == 1.0
        assert forecast_cdf(f, -np.inf) == 0.0

    def test_quantile_median(self):
        assert forecast_quantile(GaussianForecast(5.0, 1.0), 0.5) == 5.0

    def test_quantile_975(self):
        assert forecast_quantile(GaussianForecast(0.0, 2.0), 0.975) == pytest.approx(3.919928, abs=1e-5)

    def test_inverse_identity(self, rng):
        f = GaussianForecast(1.5, 0.7)
        y = 1.5 + 0.7 * rng.uniform(-4, 4, size=200)
        np.testing.assert_allclose(forecast_quantile(f, forecast_cdf(f, y)), y, atol=1e-6)

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.5])
    def test_quantile_domain(self, p):
        with pytest.raises(DomainError):
            forecast_quantile(GaussianForecast(0.0, 1.0), p)

    def test_monotone(self):
        f = GaussianForecast(0.0, 1.0)
        assert np.all(np.diff(f.cdf(np.linspace(-10, 10, 1001))) >= 0)
        assert np.all(np.diff(f.quantile(np.linspace(1e-6, 1 - 1e-6, 1001))) > 0)


class TestFit:
    def test_single_point_interpolates(self):
        model = fit(Dataset([[0.5]], [2.0]))
        assert model.kernel.noise_variance == NOISE_FLOOR
        assert predict(model, [0.5]).mu == pytest.approx(2.0, abs=1e-6)

    def test_fixed_kernel_matches_dense_oracle_1d(self, rng):
        k = Kernel(0.2, 1.0, 1e-4)
        X = rng.uniform(size=(10, 1))
        y = np.sin(6 * X[:, 0]) + 0.1 * rng.normal(size=10)
        model = GaussianProcess(kernel=k).fit(Dataset(X, y))
        Xq = rng.uniform(size=(50, 1))
        mu, sd = dense_posterior(k, X, y, Xq)
        f = model.predict(Xq)
        np.testing.assert_allclose(f.mu, mu, atol=1e-8)
        np.testing.assert_allclose(f.sigma**2, sd**2, atol=1e-8)

    def test_duplicate_inputs_raise_noise(self):
        # equal x with different y cannot be fit at the noise floor
        d = Dataset([[0.3], [0.3]], [0.0, 1.0])
        gp = GaussianProcess()
        model = gp.fit(d)
        assert model.kernel.noise_variance > NOISE_FLOOR
        floor = GaussianProcess(kernel=Kernel(model.kernel.lengthscale, model.kernel.signal_variance))
        assert floor.fit(d).log_marginal_likelihood() < model.log_marginal_likelihood()

    def test_grid_argmax_is_selected(self, rng):
        X = rng.uniform(size=(8, 2))
        d = Dataset(X, np.cos(3 * X.sum(1)))
        gp = GaussianProcess()
        lml = gp.grid_log_likelihood(d)
        model = gp.fit(d)
        assert model.log_marginal_likelihood() == pytest.approx(lml.max(), abs=1e-8)

    def test_grid_likelihood_matches_direct(self, rng):
        X = rng.uniform(size=(6, 1))
        d = Dataset(X, rng.normal(size=6))
        gp = GaussianProcess()
        lml = gp.grid_log_likelihood(d)
        for i, j, k in [(0, 0, 0), (5, 1, 3), (23, 2, 7)]:
            kern = Kernel(LENGTHSCALE_GRID[i], SIGNAL_VARIANCE_GRID[j], NOISE_VARIANCE_GRID[k])
            direct = GaussianProcess(kernel=kern).fit(d).log_marginal_likelihood()
            assert lml[i, j, k] == pytest.approx(direct, abs=1e-7)

    def test_outside_unit_cube(self):
        with pytest.raises(InvalidDatasetError):
            fit(Dataset([[1.5]], [0.0]))

    def test_empty(self):
        with pytest.raises(InvalidDatasetError):
            fit(Dataset(np.empty((0, 1)), []))

    def test_degenerate_outputs(self):
        model = fit(Dataset([[0.1], [0.9]], [3.0, 3.0]))
        assert model.y_std == 1.0
        assert model.y_mean == 3.0
        f = model.predict([40.0 / 40])
        assert np.isfinite(f.mu) and f.sigma > 0


class TestPredict:
    def test_far_from_data_reverts_to_prior(self, rng):
        X = rng.uniform(0, 0.1, size=(6, 1))
        y = rng.normal(size=6)
        model = GaussianProcess(kernel=Kernel(0.01, 1.0)).fit(Dataset(X, y))
        f = model.predict([0.1 + 20 * 0.01 + 0.5])
        assert abs(f.mu - y.mean()) <= 1e-3 * y.std()
        assert f.sigma == pytest.approx(model.prior_std, abs=1e-3)

    def test_training_point_is_certain(self, rng):
        X = rng.uniform(size=(5, 1))
        model = GaussianProcess(kernel=Kernel(0.3, 1.0)).fit(Dataset(X, np.sin(5 * X[:, 0])))
        assert model.predict(X[2]).sigma <= 1e-3

    def test_dense_oracle_2d(self, rng):
        X = rng.uniform(size=(8, 2))
        y = rng.normal(size=8)
        model = fit(Dataset(X, y))
        Xq = rng.uniform(size=(20, 2))
        mu, sd = dense_posterior(model.kernel, X, y, Xq)
        f = model.predict(Xq)
        np.testing.assert_allclose(f.mu, mu, atol=1e-8)
        np.testing.assert_allclose(f.sigma**2, sd**2, atol=1e-8)

    def test_noisy_adds_noise_variance(self, rng):
        X = rng.uniform(size=(7, 1))
        model = GaussianProcess(kernel=Kernel(0.3, 1.0, 0.05)).fit(Dataset(X, rng.normal(size=7)))
        Xq = rng.uniform(size=(9, 1))
        latent, obs = model.predict(Xq), model.predict(Xq, noisy=True)
        np.testing.assert_array_equal(latent.mu, obs.mu)
        np.testing.assert_allclose(obs.sigma**2 - latent.sigma**2, 0.05 * model.y_std**2, rtol=1e-9)
        mu, sd = dense_posterior(model.kernel, X, model.data.y, Xq, noisy=True)
        np.testing.assert_allclose(obs.sigma, sd, atol=1e-8)

    def test_scalar_and_vector_shapes(self):
        model = fit(Dataset([[0.1, 0.2], [0.5, 0.5]], [1.0, 2.0]))
        assert np.ndim(model.predict([0.3, 0.3]).mu) == 0
        assert model.predict(np.zeros((4, 2))).mu.shape == (4,)

    @pytest.mark.parametrize("x", [[np.nan, 0.1], [np.inf, 0.1], [0.1]])
    def test_invalid_input(self, x):
        model = fit(Dataset([[0.1, 0.2], [0.5, 0.5]], [1.0, 2.0]))
        with pytest.raises(InvalidInputError):
            model.predict(x)


class TestProperties:
    @settings(max_examples=40, deadline=None)
    @given(
        seed=st.integers(0, 2**31),
        n=st.integers(1, 12),
        dim=st.sampled_from([1, 2, 5]),
    )
    def test_dense_oracle(self, seed, n, dim):
        rng = np.random.default_rng(seed)
        X = rng.uniform(size=(n, dim))
        y = rng.normal(size=n) * rng.uniform(0.1, 10)
        model = fit(Dataset(X, y))
        Xq = rng.uniform(size=(5, dim))
        mu, sd = dense_posterior(model.kernel, X, y, Xq)
        f = model.predict(Xq)
        scale = max(1.0, float(np.std(y)))
        np.testing.assert_allclose(f.mu, mu, atol=1e-8 * scale)
        np.testing.assert_allclose(f.sigma**2, sd**2, atol=1e-8 * scale**2)

    @settings(max_examples=30, deadline=None)
    @given(
        seed=st.integers(0, 2**31),
        c=st.floats(0.01, 100.0),
        b=st.floats(-100.0, 100.0),
    )
    def test_affine_equivariance(self, seed, c, b):
        rng = np.random.default_rng(seed)
        X = rng.uniform(size=(6, 2))
        y = rng.normal(size=6)
        f0 = fit(Dataset(X, y)).predict(rng.uniform(size=(4, 2)))
        rng = np.random.default_rng(seed)
        X = rng.uniform(size=(6, 2))
        y = rng.normal(size=6)
        f1 = fit(Dataset(X, c * y + b)).predict(rng.uniform(size=(4, 2)))
        np.testing.assert_allclose(f1.mu, c * f0.mu + b, atol=1e-8 * max(c, abs(b), 1))
        np.testing.assert_allclose(f1.sigma, c * f0.sigma, atol=1e-8 * max(c, 1))

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 2**31), n=st.integers(1, 10))
    def test_variance_shrinks_at_added_point(self, seed, n):
        # standardized units: the outcome scale itself changes with new data
        rng = np.random.default_rng(seed)
        k = Kernel(rng.choice(LENGTHSCALE_GRID), 1.0, 1e-4)
        gp = GaussianProcess(kernel=k)
        d = Dataset(rng.uniform(size=(n, 2)), rng.normal(size=n))
        x_new = rng.uniform(size=2)
        m0 = gp.fit(d)
        m1 = gp.fit(d.append(x_new, rng.normal()))
        s0 = m0.predict(x_new).sigma / m0.y_std
        s1 = m1.predict(x_new).sigma / m1.y_std
        assert s1 <= s0 + 1e-12
