"""Frequency-band decomposition of the generalized FEVD.

The VMA transfer function ``Psi(w) = sum_h A_h exp(-i w h)`` is evaluated on
an N-point zero-padded DFT grid.  By Parseval, averaging
``|(Psi(w_k) S)_ij|^2 / s_jj`` over the grid gives back the time-domain
numerator exactly, so band tables normalized by the full-spectrum row totals
sum to the time-domain table.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .connectedness import FevdTable, SpilloverSummary, gfevd_parts, summarize_table, DEFAULT_HORIZON
from .errors import DftTooSmall, InvalidPartition, UnknownBand
from .var import VarModel, vma_coefficients

__all__ = [
    "FrequencyBand",
    "SpectralFevd",
    "default_bands",
    "bands_from_months",
    "validate_partition",
    "dft_size",
    "spectral_gfevd",
    "band_summary",
]

MIN_DFT_SIZE = 1024
_EDGE_TOL = 1e-12


@dataclass(frozen=True)
class FrequencyBand:
    """Angular-frequency interval ``(lower, upper]`` within ``[0, pi]``.

    ``month_range`` uses the month naming of the default bands, where the
    boundary at ``pi / n`` is called "n months".
    """

    label: str
    lower: float
    upper: float

    def __post_init__(self):
        if not (0.0 <= self.lower < self.upper <= math.pi + _EDGE_TOL):
            raise InvalidPartition(
                f"band {self.label!r}: need 0 <= lower < upper <= pi, got ({self.lower}, {self.upper}]"
            )

    @property
    def month_range(self) -> tuple[float, float]:
        lo = math.pi / self.upper
        hi = math.inf if self.lower == 0 else math.pi / self.lower
        return lo, hi

    def month_label(self) -> str:
        lo, hi = self.month_range
        fmt = lambda v: "inf" if math.isinf(v) else f"{v:g}"
        return f"{fmt(lo)}-{fmt(hi)} months"

    def contains(self, omega: np.ndarray) -> np.ndarray:
        """Membership of frequencies already folded into [0, pi]."""
        inside = (omega > self.lower + _EDGE_TOL) & (omega <= self.upper + _EDGE_TOL)
        if self.lower == 0.0:
            inside |= omega <= _EDGE_TOL
        return inside


def default_bands() -> list[FrequencyBand]:
    """Short (1-4 months), medium (4-12) and long (12+) run bands."""
    return [
        FrequencyBand("short", math.pi / 4, math.pi),
        FrequencyBand("medium", math.pi / 12, math.pi / 4),
        FrequencyBand("long", 0.0, math.pi / 12),
    ]


def bands_from_months(spec: Sequence[tuple[str, float, float | None]]) -> list[FrequencyBand]:
    """Build bands from ``(label, min_months, max_months)`` triples.

    A boundary of ``n`` months sits at ``pi / n``; ``None`` or ``inf`` for the
    upper month bound means the band reaches frequency zero.
    """
    out = []
    for label, lo_months, hi_months in spec:
        if lo_months is None or lo_months < 1:
            raise InvalidPartition(f"band {label!r}: minimum period must be >= 1 month")
        upper = math.pi / lo_months
        lower = 0.0 if hi_months is None or math.isinf(hi_months) else math.pi / hi_months
        out.append(FrequencyBand(label, lower, upper))
    return out


def validate_partition(bands: Sequence[FrequencyBand]) -> list[FrequencyBand]:
    """Check that ``bands`` tile ``(0, pi]`` without gaps or overlaps.

    Returns the bands in their given order; raises ``InvalidPartition``.
    """
    bands = list(bands)
    if not bands:
        raise InvalidPartition("empty band list")
    labels = [b.label for b in bands]
    if len(set(labels)) != len(labels):
        raise InvalidPartition(f"duplicate band labels: {labels}")
    ordered = sorted(bands, key=lambda b: b.lower)
    if abs(ordered[0].lower) > _EDGE_TOL:
        raise InvalidPartition("bands must start at frequency 0")
    if abs(ordered[-1].upper - math.pi) > _EDGE_TOL:
        raise InvalidPartition("bands must end at frequency pi")
    for a, b in zip(ordered, ordered[1:]):
        if abs(a.upper - b.lower) > _EDGE_TOL:
            raise InvalidPartition(f"bands {a.label!r} and {b.label!r} are not adjacent")
    return bands


def dft_size(horizon: int) -> int:
    return max(MIN_DFT_SIZE, 2 * horizon)


@dataclass(frozen=True)
class SpectralFevd:
    names: tuple[str, ...]
    horizon: int
    grid: np.ndarray  # w_k = 2 pi k / N
    contributions: np.ndarray  # (N, M, M): |(Psi(w_k) S)_ij|^2 / s_jj
    row_totals: np.ndarray  # time-domain sum_j d_ij
    denominators: np.ndarray  # time-domain sum_h e_i' A_h S A_h' e_i
    bands: tuple[FrequencyBand, ...]
    band_tables: dict[str, np.ndarray] = field(default_factory=dict)
    fevd: FevdTable | None = None

    @property
    def n_dft(self) -> int:
        return self.grid.shape[0]

    def folded_grid(self) -> np.ndarray:
        """Grid frequencies mapped onto [0, pi] via their conjugate."""
        return np.minimum(self.grid, 2 * math.pi - self.grid)

    def total_table(self) -> np.ndarray:
        return sum(self.band_tables.values())


def spectral_gfevd(
    model: VarModel,
    horizon: int = DEFAULT_HORIZON,
    bands: Sequence[FrequencyBand] | None = None,
    n_dft: int | None = None,
) -> SpectralFevd:
    bands = validate_partition(default_bands() if bands is None else bands)
    n_dft = dft_size(horizon) if n_dft is None else int(n_dft)
    if n_dft < 2 * horizon:
        raise DftTooSmall(f"DFT size {n_dft} < 2H = {2 * horizon}")

    numer, denom = gfevd_parts(model, horizon)
    sigma = model.sigma
    vma = vma_coefficients(model, horizon).matrices
    psi = np.fft.fft(vma, n=n_dft, axis=0)  # Psi(w_k) = sum_h A_h e^{-i w_k h}
    contrib = np.abs(psi @ sigma) ** 2 / np.diag(sigma)[None, None, :]

    raw = numer / denom[:, None]
    row_totals = raw.sum(axis=1)
    scale = 1.0 / (n_dft * denom[:, None] * row_totals[:, None])

    grid = 2 * math.pi * np.arange(n_dft) / n_dft
    folded = np.minimum(grid, 2 * math.pi - grid)
    assigned = np.zeros(n_dft, dtype=bool)
    tables = {}
    for band in bands:
        mask = band.contains(folded) & ~assigned
        assigned |= mask
        tables[band.label] = contrib[mask].sum(axis=0) * scale
    fevd = FevdTable(horizon, model.names, raw, raw / row_totals[:, None])
    return SpectralFevd(
        model.names, horizon, grid, contrib, row_totals, denom, tuple(bands), tables, fevd
    )


def band_summary(spectral: SpectralFevd, band: str) -> SpilloverSummary:
    """Spillover measures restricted to one band.

    Denominators stay at full-spectrum row totals, so band TSIs (and every
    other measure) add up to the time-domain values across the partition.
    """
    try:
        table = spectral.band_tables[band]
    except KeyError:
        raise UnknownBand(f"no band labelled {band!r}; have {list(spectral.band_tables)}") from None
    return summarize_table(table, spectral.names, band=band)
