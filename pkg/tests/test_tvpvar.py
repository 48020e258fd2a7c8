import numpy as np
import pytest

from spillover.errors import IndexOutOfRange, InsufficientData, NumericalBreakdown, SingularDesign
from spillover.ingest import ReturnPanel
from spillover.tvpvar import TvpConfig, fit_tvp, model_at, pack_state, unpack_state
from spillover.var import VarModel, fit_ols, simulate

from .models import random_stable_var

NO_FORGETTING = TvpConfig(kappa1=1.0, kappa2=1.0, prior_window=36, prior_scale=1.0)


def fixed_var(seed=0, n=500):
    b = np.array([[0.4, 0.1, 0.0], [0.2, 0.3, 0.1], [0.0, -0.2, 0.5]])
    sigma = np.array([[1.0, 0.3, 0.1], [0.3, 1.0, 0.2], [0.1, 0.2, 1.0]])
    return simulate(VarModel([0.1, 0.0, -0.1], b[None], sigma), n, seed=seed)


class TestConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [{"kappa1": 0.0}, {"kappa1": 1.1}, {"kappa2": -0.5}, {"lag_order": 0}, {"prior_scale": 0.0}],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            TvpConfig(**kwargs)

    def test_prior_window_too_short(self):
        # M r + M + 1 = 7 for M = 3, r = 1
        with pytest.raises(InsufficientData):
            fit_tvp(fixed_var(n=100), TvpConfig(prior_window=6))

    def test_too_few_observations(self):
        with pytest.raises(InsufficientData):
            fit_tvp(fixed_var(n=36), TvpConfig())


class TestState:
    def test_round_trip(self, rng):
        for m, r in [(1, 1), (2, 3), (4, 2)]:
            model = random_stable_var(rng, m, r)
            beta = pack_state(model)
            assert beta.size == m * m * r + m
            intercept, lags = unpack_state(beta, m, r)
            assert np.array_equal(intercept, model.intercept)
            assert np.array_equal(lags, model.coefficients)

    def test_path_shape(self):
        panel = fixed_var(n=200)
        path = fit_tvp(panel, TvpConfig(lag_order=2))
        assert len(path) == 200 - 36
        assert path.dates == panel.dates[36:]
        assert path.beta.shape == (164, 3 * (1 + 3 * 2))
        assert path.S.shape == (164, 3, 3)
        model = model_at(path, path.dates[-1])
        assert model.lag_order == 2 and model.names == panel.names

    def test_out_of_range(self):
        path = fit_tvp(fixed_var(n=80))
        with pytest.raises(IndexOutOfRange):
            model_at(path, len(path))
        with pytest.raises(IndexOutOfRange):
            model_at(path, "1999-01")
        model_at(path, -1)


class TestEquivalence:
    def test_matches_full_sample_ols(self):
        panel = fixed_var()
        path = fit_tvp(panel, NO_FORGETTING)
        ols = fit_ols(panel, 1)
        last = model_at(path, -1)
        assert np.abs(last.coefficients - ols.coefficients).max() < 1e-6
        assert np.abs(last.intercept - ols.intercept).max() < 1e-6

    def test_var2(self):
        rng = np.random.default_rng(5)
        panel = simulate(random_stable_var(rng, 2, 2), 400, seed=8)
        cfg = TvpConfig(kappa1=1.0, kappa2=1.0, prior_window=30, lag_order=2, prior_scale=1.0)
        last = model_at(fit_tvp(panel, cfg), -1)
        assert np.abs(last.coefficients - fit_ols(panel, 2).coefficients).max() < 1e-6

    def test_loewner_monotone(self):
        path = fit_tvp(fixed_var(n=300), NO_FORGETTING)
        for a, b in zip(path.P[:-1], path.P[1:]):
            scale = np.abs(a).max()
            assert np.linalg.eigvalsh(a - b).min() >= -1e-10 * scale


class TestTracking:
    def test_coefficient_break(self):
        rng = np.random.default_rng(21)
        n, burn = 400, 200
        b1, b2 = np.array([[0.2, 0.0], [0.0, 0.2]]), np.array([[0.7, 0.3], [0.0, 0.7]])
        y = np.zeros((burn + n, 2))
        shocks = rng.standard_normal((burn + n, 2))
        for t in range(1, burn + n):
            b = b1 if t < burn + n // 2 else b2
            y[t] = b @ y[t - 1] + shocks[t]
        panel = ReturnPanel.from_array(y[burn:])
        path = fit_tvp(panel, TvpConfig(kappa1=0.99, kappa2=0.96))
        coefs = np.array([model_at(path, k).coefficients[0] for k in range(len(path))])
        dist2 = np.abs(coefs - b2).max(axis=(1, 2))
        dist1 = np.abs(coefs - b1).max(axis=(1, 2))
        assert dist2[-1] < dist1[-1]
        brk = n // 2 - 36
        quarter = len(path) // 4
        # averaged over windows, the path approaches the new regime
        early = dist2[brk : brk + quarter // 2].mean()
        late = dist2[-quarter // 2 :].mean()
        assert late < early

    def test_s_factorizes(self):
        path = fit_tvp(fixed_var(n=300))
        for s in path.S:
            assert np.array_equal(s, s.T)
            np.linalg.cholesky(s + 1e-10 * np.trace(s) * np.eye(3))

    def test_permutation(self):
        panel = fixed_var(n=200)
        p = [2, 0, 1]
        permuted = ReturnPanel(panel.dates, [panel.names[i] for i in p], panel.returns[:, p])
        a, b = fit_tvp(panel), fit_tvp(permuted)
        for k in (0, 50, len(a) - 1):
            ma, mb = model_at(a, k), model_at(b, k)
            np.testing.assert_allclose(mb.intercept, ma.intercept[p], atol=1e-9)
            np.testing.assert_allclose(mb.coefficients, ma.coefficients[:, p][:, :, p], atol=1e-9)
            np.testing.assert_allclose(mb.sigma, ma.sigma[np.ix_(p, p)], atol=1e-9)


def test_constant_series():
    data = np.random.default_rng(1).standard_normal((120, 2))
    data[:, 1] = 0.3
    with pytest.raises((SingularDesign, NumericalBreakdown)):
        fit_tvp(ReturnPanel.from_array(data))
