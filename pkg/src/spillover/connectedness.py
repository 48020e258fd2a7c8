"""Generalized forecast-error variance decomposition and the directional
spillover measures built on it (total, to, from, net, net pairwise)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import UnstableModel, ZeroVariance
from .var import VarModel, is_stable, vma_coefficients

__all__ = ["FevdTable", "SpilloverSummary", "gfevd", "gfevd_parts", "spillover_summary"]

DEFAULT_HORIZON = 12


@dataclass(frozen=True)
class FevdTable:
    """``raw[i, j]``: unnormalized share of i's H-step error variance due to j.

    ``normalized`` is ``raw`` divided by its row sums.
    """

    horizon: int
    names: tuple[str, ...]
    raw: np.ndarray
    normalized: np.ndarray

    @classmethod
    def from_raw(cls, raw, names: Sequence[str] | None = None, horizon: int = 0) -> "FevdTable":
        raw = np.array(raw, dtype=float)
        if raw.ndim != 2 or raw.shape[0] != raw.shape[1]:
            raise ValueError("FEVD table must be square")
        if np.any(raw < 0):
            raise ValueError("FEVD entries must be non-negative")
        rows = raw.sum(axis=1, keepdims=True)
        if np.any(rows <= 0):
            raise ValueError("every FEVD row needs positive mass")
        names = tuple(names) if names else tuple(f"y{i + 1}" for i in range(raw.shape[0]))
        return cls(horizon, names, raw, raw / rows)

    @property
    def n_series(self) -> int:
        return self.raw.shape[0]


@dataclass(frozen=True)
class SpilloverSummary:
    """All figures are percentages.

    ``npdc[i, j] > 0`` means series j is a net transmitter to series i.
    """

    names: tuple[str, ...]
    tsi: float
    to: np.ndarray
    from_: np.ndarray
    net: np.ndarray
    npdc: np.ndarray
    table: np.ndarray
    band: str | None = None

    def as_dict(self) -> dict:
        return {
            "band": self.band,
            "names": list(self.names),
            "tsi": self.tsi,
            "to": self.to.tolist(),
            "from": self.from_.tolist(),
            "net": self.net.tolist(),
            "npdc": self.npdc.tolist(),
            "table": self.table.tolist(),
        }


def _check_model(model: VarModel, horizon: int) -> None:
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    stable, radius = is_stable(model)
    if not stable:
        raise UnstableModel(f"spectral radius {radius:.6g} >= 1")
    diag = np.diag(model.sigma)
    for j, s in enumerate(diag):
        if not s > 0:
            raise ZeroVariance(j)


def gfevd_parts(model: VarModel, horizon: int) -> tuple[np.ndarray, np.ndarray]:
    """Numerators ``sum_h (e_i' A_h S e_j)^2 / s_jj`` and denominators
    ``sum_h e_i' A_h S A_h' e_i`` of the generalized decomposition."""
    _check_model(model, horizon)
    sigma = model.sigma
    vma = vma_coefficients(model, horizon).matrices
    response = vma @ sigma  # (H, M, M): A_h S
    numer = (response**2).sum(axis=0) / np.diag(sigma)[None, :]
    denom = np.einsum("hij,jk,hik->i", vma, sigma, vma)
    return numer, denom


def gfevd(model: VarModel, horizon: int = DEFAULT_HORIZON) -> FevdTable:
    numer, denom = gfevd_parts(model, horizon)
    raw = numer / denom[:, None]
    return FevdTable(horizon, model.names, raw, raw / raw.sum(axis=1, keepdims=True))


def summarize_table(table: np.ndarray, names: Sequence[str], band: str | None = None) -> SpilloverSummary:
    """Spillover measures for any (possibly band-restricted) share table.

    ``table`` holds fractions; for a full-spectrum table its rows sum to 1.
    Off-diagonal masses are summed directly, so band tables that were
    normalized by full-spectrum row totals add up across a partition.
    """
    table = np.asarray(table, dtype=float)
    off = table - np.diag(np.diag(table))
    from_ = 100.0 * off.sum(axis=1)
    to = 100.0 * off.sum(axis=0)
    net = to - from_
    npdc = 100.0 * (table - table.T)
    np.fill_diagonal(npdc, 0.0)
    tsi = float(from_.mean()) if len(from_) else 0.0
    return SpilloverSummary(tuple(names), tsi, to, from_, net, npdc, table, band)


def spillover_summary(fevd: FevdTable) -> SpilloverSummary:
    return summarize_table(fevd.normalized, fevd.names)
