"""Constant-parameter VAR(r): OLS estimation, AIC lag choice, stability, VMA
coefficients and a Gaussian simulator used as a test oracle."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    InsufficientData,
    NonPositiveDefiniteCovariance,
    SingularDesign,
    UnstableModel,
)
from .ingest import ReturnPanel

__all__ = [
    "VarModel",
    "VmaCoefficients",
    "fit_ols",
    "select_lag_aic",
    "is_stable",
    "companion_matrix",
    "vma_coefficients",
    "simulate",
    "lag_design",
]

STABILITY_MARGIN = 1e-10


@dataclass(frozen=True)
class VarModel:
    """y_t = c + B_1 y_{t-1} + ... + B_r y_{t-r} + e_t,  e_t ~ N(0, sigma).

    ``coefficients`` has shape ``(r, M, M)``; ``coefficients[i - 1]`` is the
    matrix on lag ``i``.
    """

    intercept: np.ndarray
    coefficients: np.ndarray
    sigma: np.ndarray
    names: tuple[str, ...] = ()

    def __post_init__(self):
        coefs = np.array(self.coefficients, dtype=float)
        if coefs.ndim == 2:
            coefs = coefs[None]
        if coefs.ndim != 3 or coefs.shape[1] != coefs.shape[2] or coefs.shape[0] < 1:
            raise ValueError(f"coefficients must have shape (r, M, M), got {coefs.shape}")
        m = coefs.shape[1]
        intercept = np.zeros(m) if self.intercept is None else np.array(self.intercept, dtype=float)
        sigma = np.array(self.sigma, dtype=float)
        if intercept.shape != (m,) or sigma.shape != (m, m):
            raise ValueError("intercept/sigma dimensions do not match coefficients")
        if not np.allclose(sigma, sigma.T, rtol=0, atol=1e-12 * max(1.0, np.abs(sigma).max())):
            raise NonPositiveDefiniteCovariance("residual covariance is not symmetric")
        sigma = 0.5 * (sigma + sigma.T)
        if not np.all(np.isfinite(sigma)) or np.linalg.eigvalsh(sigma).min() <= 0:
            raise NonPositiveDefiniteCovariance("residual covariance is not positive definite")
        names = tuple(self.names) if self.names else tuple(f"y{i + 1}" for i in range(m))
        if len(names) != m:
            raise ValueError("names length does not match model dimension")
        for arr in (coefs, intercept, sigma):
            arr.setflags(write=False)
        object.__setattr__(self, "coefficients", coefs)
        object.__setattr__(self, "intercept", intercept)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "names", names)

    @property
    def lag_order(self) -> int:
        return self.coefficients.shape[0]

    @property
    def n_series(self) -> int:
        return self.coefficients.shape[1]


@dataclass(frozen=True)
class VmaCoefficients:
    horizon: int
    matrices: np.ndarray  # (H, M, M), matrices[0] = I


def lag_design(data: np.ndarray, r: int, start: int | None = None):
    """Regressand and regressor matrices for a VAR(r) with intercept.

    Rows correspond to targets ``data[start:]`` (``start`` defaults to ``r``);
    regressor columns are ``[1, y_{t-1}, ..., y_{t-r}]``.
    """
    data = np.asarray(data, dtype=float)
    start = r if start is None else start
    t_total = data.shape[0]
    y = data[start:]
    x = np.ones((t_total - start, 1 + data.shape[1] * r))
    m = data.shape[1]
    for i in range(1, r + 1):
        x[:, 1 + (i - 1) * m : 1 + i * m] = data[start - i : t_total - i]
    return y, x


def _ols(y: np.ndarray, x: np.ndarray):
    if np.linalg.matrix_rank(x) < x.shape[1]:
        raise SingularDesign("VAR design matrix is rank deficient")
    coef, *_ = np.linalg.lstsq(x, y, rcond=None)
    return coef, y - x @ coef


def _unpack(coef: np.ndarray, m: int, r: int):
    """Split a (1 + M r) x M least-squares solution into intercept and lag blocks."""
    b = coef.T  # row i = equation i
    intercept = b[:, 0]
    lags = np.stack([b[:, 1 + i * m : 1 + (i + 1) * m] for i in range(r)])
    return intercept, lags


def _as_array(panel) -> tuple[np.ndarray, tuple[str, ...]]:
    if isinstance(panel, ReturnPanel):
        return np.asarray(panel.returns), panel.names
    data = np.asarray(panel, dtype=float)
    if data.ndim == 1:
        data = data[:, None]
    return data, tuple(f"y{i + 1}" for i in range(data.shape[1]))


def fit_ols(panel, r: int) -> VarModel:
    """Equation-by-equation least squares with intercept.

    The residual covariance uses the degrees-of-freedom corrected divisor
    ``T - r - M r - 1``.
    """
    data, names = _as_array(panel)
    if r < 1:
        raise ValueError("lag order must be positive")
    t, m = data.shape
    dof = t - r - m * r - 1
    if dof < 1:
        raise InsufficientData(
            f"VAR({r}) on {m} series needs more than {m * r + 1} usable rows, got {t - r}"
        )
    y, x = lag_design(data, r)
    coef, resid = _ols(y, x)
    intercept, lags = _unpack(coef, m, r)
    sigma = resid.T @ resid / dof
    return VarModel(intercept, lags, sigma, names)


def select_lag_aic(panel, max_lag: int = 4) -> int:
    """Lag order minimising ``ln det(Sigma_ml) + 2 (r M^2 + M) / T_eff``.

    Every candidate is fitted on the same sample (the first ``max_lag`` rows
    are dropped), so the criteria are comparable.  Ties go to the smaller lag.
    """
    data, _ = _as_array(panel)
    t, m = data.shape
    if max_lag < 1:
        raise ValueError("max_lag must be positive")
    t_eff = t - max_lag
    if t_eff - m * max_lag - 1 < 1:
        raise InsufficientData(f"max_lag={max_lag} is infeasible for T={t}, M={m}")
    best, best_aic = 1, np.inf
    for r in range(1, max_lag + 1):
        y, x = lag_design(data, r, start=max_lag)
        _, resid = _ols(y, x)
        sign, logdet = np.linalg.slogdet(resid.T @ resid / t_eff)
        if sign <= 0:
            raise SingularDesign(f"residual covariance of VAR({r}) is singular")
        aic = logdet + 2.0 * (r * m * m + m) / t_eff
        if r == 1 or aic < best_aic - 1e-12 * abs(best_aic):
            best, best_aic = r, aic
    return best


def companion_matrix(model: VarModel) -> np.ndarray:
    r, m = model.lag_order, model.n_series
    comp = np.zeros((m * r, m * r))
    comp[:m, :] = np.hstack(list(model.coefficients))
    if r > 1:
        comp[m:, :-m] = np.eye(m * (r - 1))
    return comp


def is_stable(model: VarModel) -> tuple[bool, float]:
    """Return ``(stable, spectral_radius)`` of the companion matrix."""
    radius = float(np.abs(np.linalg.eigvals(companion_matrix(model))).max())
    return radius < 1.0 - STABILITY_MARGIN, radius


def vma_coefficients(model: VarModel, horizon: int) -> VmaCoefficients:
    """MA matrices A_0..A_{H-1} from ``A_h = sum_{i<=min(h,r)} B_i A_{h-i}``."""
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    r, m = model.lag_order, model.n_series
    out = np.zeros((horizon, m, m))
    out[0] = np.eye(m)
    for h in range(1, horizon):
        acc = np.zeros((m, m))
        for i in range(1, min(h, r) + 1):
            acc += model.coefficients[i - 1] @ out[h - i]
        out[h] = acc
    return VmaCoefficients(horizon, out)


def simulate(
    model: VarModel,
    n_obs: int,
    seed: int,
    burn_in: int = 500,
    names: Sequence[str] | None = None,
    start: str = "2000-01",
) -> ReturnPanel:
    """Draw a Gaussian sample path of length ``n_obs`` after ``burn_in`` steps."""
    stable, radius = is_stable(model)
    if not stable:
        raise UnstableModel(f"cannot simulate a model with spectral radius {radius:.6g}")
    try:
        chol = np.linalg.cholesky(model.sigma)
    except np.linalg.LinAlgError:
        raise NonPositiveDefiniteCovariance("residual covariance has no Cholesky factor") from None
    rng = np.random.default_rng(seed)
    r, m = model.lag_order, model.n_series
    total = n_obs + burn_in
    shocks = rng.standard_normal((total, m)) @ chol.T
    y = np.zeros((total + r, m))
    for t in range(r, total + r):
        val = model.intercept + shocks[t - r]
        for i in range(1, r + 1):
            val = val + model.coefficients[i - 1] @ y[t - i]
        y[t] = val
    return ReturnPanel.from_array(y[r + burn_in :], names or model.names, start=start)
