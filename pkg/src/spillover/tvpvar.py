"""Time-varying parameter VAR estimated with a forgetting-factor Kalman filter.

State: ``beta_t`` stacks the M equations' coefficient rows
``[c_i, B_1[i, :], ..., B_r[i, :]]``, so the observation equation is
``y_t = (I_M kron x_t') beta_t + e_t`` with ``x_t = [1, y_{t-1}, ..., y_{t-r}]``.
Coefficient drift is never given an explicit covariance; dividing the state
covariance by ``kappa1`` each step plays that role.  The measurement
covariance is an exponentially weighted average of one-step prediction
errors with weight ``kappa2`` on the past.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    IndexOutOfRange,
    InsufficientData,
    NumericalBreakdown,
    SingularDesign,
)
from .ingest import ReturnPanel
from .var import VarModel, _ols, lag_design

__all__ = ["TvpConfig", "TvpVarPath", "fit_tvp", "model_at", "pack_state", "unpack_state"]

JITTER = 1e-10


@dataclass(frozen=True)
class TvpConfig:
    """Filter settings.

    ``prior_scale`` inflates the OLS coefficient covariance of the training
    window to form the state prior.  With ``kappa1 = kappa2 = 1`` and
    ``prior_scale = 1`` the filter is recursive least squares and its final
    state equals the full-sample OLS estimate.
    """

    kappa1: float = 0.99
    kappa2: float = 0.96
    prior_window: int = 36
    lag_order: int = 1
    prior_scale: float = 4.0

    def __post_init__(self):
        if not 0 < self.kappa1 <= 1:
            raise ValueError("kappa1 must lie in (0, 1]")
        if not 0 < self.kappa2 <= 1:
            raise ValueError("kappa2 must lie in (0, 1]")
        if self.lag_order < 1:
            raise ValueError("lag_order must be positive")
        if not self.prior_scale > 0:
            raise ValueError("prior_scale must be positive")

    def check(self, n_series: int) -> None:
        need = n_series * self.lag_order + n_series + 1
        if self.prior_window < need:
            raise InsufficientData(
                f"prior_window={self.prior_window} < M r + M + 1 = {need}"
            )


@dataclass(frozen=True)
class TvpVarPath:
    """Filtered states for targets ``dates[k]``, k = 0..len-1.

    ``beta[k]`` and ``P[k]`` are the posterior after observing ``dates[k]``;
    ``S[k]`` is the measurement covariance in force at that date.
    """

    names: tuple[str, ...]
    dates: tuple[str, ...]
    config: TvpConfig
    beta: np.ndarray  # (n, M * (1 + M r))
    S: np.ndarray  # (n, M, M)
    P: np.ndarray  # (n, k, k)

    def __len__(self) -> int:
        return len(self.dates)


def pack_state(model: VarModel) -> np.ndarray:
    """Stack intercept and lag matrices equation by equation."""
    rows = np.hstack([model.intercept[:, None], *model.coefficients])
    return rows.reshape(-1)


def unpack_state(beta: np.ndarray, n_series: int, lag_order: int) -> tuple[np.ndarray, np.ndarray]:
    m, r = n_series, lag_order
    rows = np.asarray(beta).reshape(m, 1 + m * r)
    intercept = rows[:, 0].copy()
    lags = np.stack([rows[:, 1 + i * m : 1 + (i + 1) * m] for i in range(r)])
    return intercept, lags


def _symmetrize(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.T)


def _jittered(a: np.ndarray) -> np.ndarray:
    return a + JITTER * max(np.trace(a), 0.0) * np.eye(a.shape[0])


def _prior(data: np.ndarray, config: TvpConfig):
    r = config.lag_order
    m = data.shape[1]
    y, x = lag_design(data[: config.prior_window], r)
    coef, resid = _ols(y, x)
    dof = y.shape[0] - x.shape[1]
    s0 = resid.T @ resid / dof
    if np.linalg.eigvalsh(_symmetrize(s0)).min() <= 0:
        raise SingularDesign("prior residual covariance is singular")
    beta0 = coef.T.reshape(-1)
    p0 = config.prior_scale * np.kron(s0, np.linalg.inv(x.T @ x))
    return beta0, _symmetrize(p0), _symmetrize(s0)


def fit_tvp(panel: ReturnPanel, config: TvpConfig | None = None) -> TvpVarPath:
    """Run the filter over every observation after the prior window.

    The first ``prior_window`` rows only feed the OLS prior; the returned
    path covers the remaining ``T - prior_window`` dates.
    """
    config = config or TvpConfig()
    data = np.asarray(panel.returns, dtype=float)
    t_total, m = data.shape
    config.check(m)
    if t_total < config.prior_window + 1:
        raise InsufficientData(
            f"need more than prior_window={config.prior_window} observations, got {t_total}"
        )
    r = config.lag_order
    beta, P, S = _prior(data, config)
    _, xs = lag_design(data, r, start=config.prior_window)
    k = beta.size
    n = t_total - config.prior_window
    betas = np.empty((n, k))
    Ss = np.empty((n, m, m))
    Ps = np.empty((n, k, k))
    eye_m = np.eye(m)
    k1, k2 = config.kappa1, config.kappa2

    for idx in range(n):
        t = config.prior_window + idx
        Z = np.kron(eye_m, xs[idx][None, :])  # (M, k)
        P = P / k1
        err = data[t] - Z @ beta
        S = _symmetrize(k2 * S + (1.0 - k2) * np.outer(err, err))
        F = _jittered(_symmetrize(Z @ P @ Z.T + S))
        try:
            cf = np.linalg.cholesky(F)
        except np.linalg.LinAlgError:
            raise NumericalBreakdown(t, "prediction covariance not positive definite") from None
        PZt = P @ Z.T
        gain = np.linalg.solve(cf.T, np.linalg.solve(cf, PZt.T)).T  # P Z' F^{-1}
        beta = beta + gain @ err
        P = _symmetrize(P - gain @ PZt.T)
        if not (np.all(np.isfinite(beta)) and np.all(np.isfinite(P)) and np.all(np.isfinite(S))):
            raise NumericalBreakdown(t)
        betas[idx], Ss[idx], Ps[idx] = beta, S, P

    for arr in (betas, Ss, Ps):
        arr.setflags(write=False)
    dates = panel.dates[config.prior_window :]
    return TvpVarPath(panel.names, tuple(dates), config, betas, Ss, Ps)


def model_at(path: TvpVarPath, t) -> VarModel:
    """Constant-parameter snapshot at position ``t`` (int index or date label)."""
    if isinstance(t, str):
        if t not in path.dates:
            raise IndexOutOfRange(f"date {t} not on the filtered path")
        t = path.dates.index(t)
    n = len(path)
    if not -n <= t < n:
        raise IndexOutOfRange(f"index {t} outside path of length {n}")
    m = len(path.names)
    intercept, lags = unpack_state(path.beta[t], m, path.config.lag_order)
    return VarModel(intercept, lags, path.S[t], path.names)
