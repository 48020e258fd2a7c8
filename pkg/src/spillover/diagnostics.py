"""Descriptive statistics, normality and unit-root / stationarity tests,
and the Pearson correlation matrix of a return panel.

All unit-root regressions include a constant and no trend.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateSeries, SingularRegression, TooFewObservations
from .ingest import ReturnPanel

__all__ = [
    "DescriptiveStats",
    "TestResult",
    "descriptive_stats",
    "jarque_bera",
    "adf_test",
    "pp_test",
    "kpss_test",
    "za_test",
    "correlation_matrix",
    "newey_west",
    "dickey_fuller_critical_values",
]

LEVELS = (0.01, 0.05, 0.10)

# MacKinnon (2010) response surface, constant / no trend, one variable:
# cv(T) = b_inf + b1 / T + b2 / T^2 + b3 / T^3
_DF_SURFACE = {
    0.01: (-3.43035, -6.5393, -16.786, -79.433),
    0.05: (-2.86154, -2.8903, -4.234, -40.040),
    0.10: (-2.56677, -1.5384, -2.809, 0.0),
}
# Kwiatkowski et al. (1992), level stationarity.
_KPSS_CV = {0.01: 0.739, 0.05: 0.463, 0.10: 0.347}
# Zivot-Andrews with an intercept break and no trend, trim 0.15; simulated
# with scripts/za_critical_values.py (50000 random walks, T = 1000).
_ZA_CV = {0.01: -4.86, 0.05: -4.35, 0.10: -4.08}
# chi-square(2) upper quantiles: -2 ln(alpha).
_CHI2_2_CV = {a: -2.0 * math.log(a) for a in LEVELS}


@dataclass(frozen=True)
class TestResult:
    """Outcome of a hypothesis test.

    ``rejected_at`` is the smallest of the 1/5/10% levels at which the null
    is rejected, or ``None``.  ``tail`` records the rejection direction.
    """

    __test__ = False  # keep pytest from collecting this class

    test_name: str
    statistic: float
    critical_values: dict[float, float]
    tail: str
    nuisance: dict = field(default_factory=dict)

    @property
    def rejected_at(self) -> float | None:
        return rejection_level(self.statistic, self.critical_values, self.tail)

    def rejects(self, level: float) -> bool:
        cv = self.critical_values[level]
        return self.statistic < cv if self.tail == "left" else self.statistic > cv


def rejection_level(statistic: float, critical_values: dict[float, float], tail: str) -> float | None:
    for level in sorted(critical_values):
        cv = critical_values[level]
        if (statistic < cv) if tail == "left" else (statistic > cv):
            return level
    return None


@dataclass(frozen=True)
class DescriptiveStats:
    name: str
    n_obs: int
    mean: float
    median: float
    std_dev: float
    skewness: float
    kurtosis: float


def _series(x) -> np.ndarray:
    x = np.asarray(x, dtype=float).ravel()
    if not np.all(np.isfinite(x)):
        raise ValueError("series contains non-finite values")
    return x


def _moments(x: np.ndarray) -> tuple[float, float]:
    """Standardized third and (raw, non-excess) fourth moments."""
    dev = x - x.mean()
    m2 = np.mean(dev**2)
    if m2 <= 1e-300 or np.ptp(x) == 0:
        raise DegenerateSeries("series has zero variance")
    return float(np.mean(dev**3) / m2**1.5), float(np.mean(dev**4) / m2**2)


def descriptive_stats(panel: ReturnPanel) -> list[DescriptiveStats]:
    if panel.n_obs < 4:
        raise TooFewObservations("descriptive statistics need at least 4 observations")
    out = []
    for j, name in enumerate(panel.names):
        x = np.asarray(panel.returns[:, j])
        try:
            skew, kurt = _moments(x)
        except DegenerateSeries:
            raise DegenerateSeries(f"series {name!r} is constant") from None
        out.append(
            DescriptiveStats(
                name,
                x.size,
                float(x.mean()),
                float(np.median(x)),
                float(x.std(ddof=1)),
                skew,
                kurt,
            )
        )
    return out


def jarque_bera_from_moments(n_obs: int, skewness: float, kurtosis: float) -> TestResult:
    stat = n_obs / 6.0 * (skewness**2 + (kurtosis - 3.0) ** 2 / 4.0)
    return TestResult("Jarque-Bera", float(stat), dict(_CHI2_2_CV), "right", {"n_obs": n_obs})


def jarque_bera(series) -> TestResult:
    x = _series(series)
    if x.size < 4:
        raise TooFewObservations("Jarque-Bera needs at least 4 observations")
    skew, kurt = _moments(x)
    return jarque_bera_from_moments(x.size, skew, kurt)


# --- unit-root machinery ------------------------------------------------------


def dickey_fuller_critical_values(n_obs: int) -> dict[float, float]:
    """Finite-sample constant-only Dickey-Fuller tau critical values."""
    inv = 1.0 / n_obs
    return {
        level: b0 + b1 * inv + b2 * inv**2 + b3 * inv**3
        for level, (b0, b1, b2, b3) in _DF_SURFACE.items()
    }


def default_adf_max_lag(n_obs: int) -> int:
    return int(math.floor(12.0 * (n_obs / 100.0) ** 0.25))


def _ols_t(y: np.ndarray, x: np.ndarray, col: int):
    """OLS fit returning (coef, t-ratio on ``col``, residuals, se of ``col``)."""
    n, k = x.shape
    if n <= k:
        raise TooFewObservations(f"{n} observations for {k} regressors")
    q, r = np.linalg.qr(x)
    diag = np.abs(np.diag(r))
    if diag.min() <= 1e-10 * max(diag.max(), 1e-300):
        raise SingularRegression("unit-root regression is singular")
    coef = np.linalg.solve(r, q.T @ y)
    resid = y - x @ coef
    s2 = resid @ resid / (n - k)
    if s2 <= 0:
        raise SingularRegression("zero residual variance in unit-root regression")
    rinv = np.linalg.inv(r)
    var_col = s2 * (rinv[col] @ rinv[col])
    se = math.sqrt(var_col)
    return coef, coef[col] / se, resid, se


def _adf_design(x: np.ndarray, lags: int, start: int):
    """Regression of dy_t on [1, y_{t-1}, dy_{t-1}..dy_{t-lags}] for t >= start.

    ``start`` indexes ``dy`` (so the first target is ``dy[start]``) and must be
    at least ``lags``.
    """
    dy = np.diff(x)
    n = dy.size - start
    cols = [np.ones(n), x[start : start + n]]
    for j in range(1, lags + 1):
        cols.append(dy[start - j : start - j + n])
    return dy[start:], np.column_stack(cols)


def _aic(resid: np.ndarray, k: int) -> float:
    n = resid.size
    return n * math.log(resid @ resid / n) + 2 * k


def select_adf_lag(x: np.ndarray, max_lag: int) -> int:
    """AIC choice over 0..max_lag on the common sample; ties favour fewer lags."""
    best, best_aic = 0, math.inf
    for lag in range(max_lag + 1):
        y, design = _adf_design(x, lag, max_lag)
        _, _, resid, _ = _ols_t(y, design, 1)
        aic = _aic(resid, design.shape[1])
        if lag == 0 or aic < best_aic - 1e-12 * abs(best_aic):
            best, best_aic = lag, aic
    return best


def adf_test(series, max_lag: int | None = None, lags: int | None = None) -> TestResult:
    """Augmented Dickey-Fuller t-test with constant.

    The lag order is chosen by AIC over ``0..max_lag`` (default
    ``floor(12 (T/100)^(1/4))``) unless ``lags`` fixes it.  The selected
    regression is then re-estimated on all usable observations.
    """
    x = _series(series)
    n = x.size
    if n < 20:
        raise TooFewObservations("ADF needs at least 20 observations")
    if np.ptp(x) == 0:
        raise DegenerateSeries("constant series")
    if lags is None:
        if max_lag is None:
            max_lag = default_adf_max_lag(n)
        max_lag = max(0, min(max_lag, (n - 3) // 2 - 1))
        lags = select_adf_lag(x, max_lag)
    y, design = _adf_design(x, lags, lags)
    _, tstat, _, _ = _ols_t(y, design, 1)
    nobs = y.size
    return TestResult(
        "ADF",
        float(tstat),
        dickey_fuller_critical_values(nobs),
        "left",
        {"lags": lags, "max_lag": max_lag, "n_obs": nobs, "deterministic": "constant"},
    )


def newey_west(u: np.ndarray, bandwidth: int) -> float:
    """Bartlett-kernel long-run variance of an already mean-zero series."""
    u = np.asarray(u, dtype=float)
    n = u.size
    lrv = u @ u / n
    for j in range(1, min(bandwidth, n - 1) + 1):
        w = 1.0 - j / (bandwidth + 1.0)
        lrv += 2.0 * w * (u[j:] @ u[:-j]) / n
    return float(lrv)


def pp_test(series, bandwidth: int | None = None) -> TestResult:
    """Phillips-Perron Z-tau with constant.

    Bandwidth defaults to ``floor(4 (T/100)^(2/9))``.  With ``bandwidth=0`` the
    long-run and short-run variances coincide and Z-tau equals the
    zero-lag Dickey-Fuller t-ratio.
    """
    x = _series(series)
    n_total = x.size
    if n_total < 20:
        raise TooFewObservations("Phillips-Perron needs at least 20 observations")
    if np.ptp(x) == 0:
        raise DegenerateSeries("constant series")
    if bandwidth is None:
        bandwidth = int(math.floor(4.0 * (n_total / 100.0) ** (2.0 / 9.0)))
    y, design = _adf_design(x, 0, 0)
    _, tstat, resid, se = _ols_t(y, design, 1)
    n, k = design.shape
    s2 = resid @ resid / (n - k)
    gamma0 = resid @ resid / n
    lam2 = newey_west(resid, bandwidth)
    if lam2 <= 0:
        raise SingularRegression("non-positive long-run variance")
    stat = math.sqrt(gamma0 / lam2) * tstat - 0.5 * (lam2 - gamma0) / math.sqrt(lam2) * (n * se / math.sqrt(s2))
    return TestResult(
        "PP",
        float(stat),
        dickey_fuller_critical_values(n),
        "left",
        {"bandwidth": bandwidth, "n_obs": n, "deterministic": "constant"},
    )


def kpss_test(series, bandwidth: int | None = None) -> TestResult:
    """KPSS level-stationarity test (right-tailed).

    Bandwidth defaults to ``floor(4 (T/100)^(1/4))``.
    """
    x = _series(series)
    n = x.size
    if n < 20:
        raise TooFewObservations("KPSS needs at least 20 observations")
    if np.ptp(x) == 0:
        raise DegenerateSeries("constant series")
    if bandwidth is None:
        bandwidth = int(math.floor(4.0 * (n / 100.0) ** 0.25))
    u = x - x.mean()
    lrv = newey_west(u, bandwidth)
    if lrv <= 0:
        raise SingularRegression("non-positive long-run variance")
    stat = np.sum(np.cumsum(u) ** 2) / (n**2 * lrv)
    return TestResult(
        "KPSS",
        float(stat),
        dict(_KPSS_CV),
        "right",
        {"bandwidth": bandwidth, "n_obs": n, "deterministic": "constant"},
    )


def za_test(series, trim: float = 0.15, max_lag: int | None = None, lags: int | None = None) -> TestResult:
    """Zivot-Andrews test allowing one break in the intercept.

    For every candidate break date ``b`` in ``[trim T, (1 - trim) T]`` the
    ADF regression is augmented with a level-shift dummy ``1{t > b}``; the
    statistic is the minimum t-ratio on the lagged level.  The augmentation
    lag order defaults to the AIC choice of the plain ADF regression.
    ``nuisance["break_index"]`` is the position in ``series`` of the last
    observation before the break.
    """
    x = _series(series)
    n = x.size
    if n < 50:
        raise TooFewObservations("Zivot-Andrews needs at least 50 observations")
    if not 0 < trim < 0.5:
        raise ValueError("trim must lie in (0, 0.5)")
    if np.ptp(x) == 0:
        raise DegenerateSeries("constant series")
    if lags is None:
        lags = adf_test(x, max_lag=max_lag).nuisance["lags"]
    y, base = _adf_design(x, lags, lags)
    # target dy[lags + i] is the change into x[lags + i + 1]
    target_idx = np.arange(lags + 1, n)
    lo, hi = int(math.ceil(trim * n)), int(math.floor((1 - trim) * n))
    best, best_b = math.inf, None
    for b in range(max(lo, lags + 1), min(hi, n - 2) + 1):
        dummy = (target_idx > b).astype(float)
        design = np.column_stack([base[:, :1], dummy, base[:, 1:]])
        _, tstat, _, _ = _ols_t(y, design, 2)
        if tstat < best:
            best, best_b = tstat, b
    if best_b is None:
        raise TooFewObservations("no admissible break dates")
    return TestResult(
        "ZA",
        float(best),
        dict(_ZA_CV),
        "left",
        {"lags": lags, "trim": trim, "break_index": best_b, "deterministic": "constant, intercept break"},
    )


def correlation_matrix(panel) -> np.ndarray:
    data = panel.returns if isinstance(panel, ReturnPanel) else np.asarray(panel, dtype=float)
    data = np.asarray(data, dtype=float)
    if data.shape[0] < 3:
        raise TooFewObservations("correlation needs at least 3 observations")
    if np.any(np.ptp(data, axis=0) == 0):
        raise DegenerateSeries("a series is constant")
    corr = np.corrcoef(data, rowvar=False)
    corr = np.atleast_2d(corr)
    corr = 0.5 * (corr + corr.T)
    np.fill_diagonal(corr, 1.0)
    return corr
