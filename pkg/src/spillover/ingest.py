"""Loading monthly level panels and turning them into log returns."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import (
    DataError,
    DuplicateDate,
    DuplicateSeriesName,
    EmptyIntersection,
    MalformedHeader,
    MissingFile,
    NonPositivePrice,
    TooFewObservations,
    UnparseableCell,
)

__all__ = ["PricePanel", "ReturnPanel", "load_csv", "to_log_returns", "align", "parse_month"]


def parse_month(text: str) -> str:
    """Validate a ``YYYY-MM`` month label and return it in canonical form."""
    text = text.strip()
    dt = datetime.strptime(text, "%Y-%m")
    return f"{dt.year:04d}-{dt.month:02d}"


def _month_key(label: str) -> tuple[int, int]:
    year, _, month = label.rpartition("-")
    return int(year), int(month)


def _frozen(values, ndim: int) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != ndim:
        raise DataError(f"expected a {ndim}-d array, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


def _check_labels(dates: Sequence[str], names: Sequence[str]) -> None:
    if len(set(dates)) != len(dates):
        raise DuplicateDate("duplicate dates in panel")
    keys = [_month_key(d) for d in dates]
    if any(b <= a for a, b in zip(keys, keys[1:])):
        raise DataError("dates must be strictly increasing")
    if len(set(names)) != len(names):
        raise DuplicateSeriesName("duplicate series names in panel")


@dataclass(frozen=True)
class PricePanel:
    """T x M matrix of strictly positive index levels keyed by month."""

    dates: tuple[str, ...]
    names: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "dates", tuple(self.dates))
        object.__setattr__(self, "names", tuple(self.names))
        values = _frozen(self.values, 2)
        object.__setattr__(self, "values", values)
        _check_labels(self.dates, self.names)
        if values.shape != (len(self.dates), len(self.names)):
            raise DataError(
                f"values shape {values.shape} does not match "
                f"({len(self.dates)}, {len(self.names)})"
            )
        bad = np.argwhere(~(values > 0))
        if bad.size:
            r, c = bad[0]
            raise NonPositivePrice(int(r), self.names[c], float(values[r, c]))

    @property
    def n_obs(self) -> int:
        return len(self.dates)

    @property
    def n_series(self) -> int:
        return len(self.names)

    def select(self, names: Sequence[str]) -> "PricePanel":
        idx = [self.names.index(n) for n in names]
        return PricePanel(self.dates, tuple(names), self.values[:, idx])

    def __eq__(self, other):
        if not isinstance(other, PricePanel):
            return NotImplemented
        return (
            self.dates == other.dates
            and self.names == other.names
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None


@dataclass(frozen=True)
class ReturnPanel:
    """(T-1) x M matrix of monthly log returns.

    ``returns[t, m]`` is the log change from ``dates[t]``'s predecessor to
    ``dates[t]``; the first date of the source price panel is dropped.
    """

    dates: tuple[str, ...]
    names: tuple[str, ...]
    returns: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "dates", tuple(self.dates))
        object.__setattr__(self, "names", tuple(self.names))
        returns = _frozen(self.returns, 2)
        object.__setattr__(self, "returns", returns)
        _check_labels(self.dates, self.names)
        if returns.shape != (len(self.dates), len(self.names)):
            raise DataError(
                f"returns shape {returns.shape} does not match "
                f"({len(self.dates)}, {len(self.names)})"
            )
        if not np.all(np.isfinite(returns)):
            raise DataError("returns contain non-finite entries")

    @property
    def n_obs(self) -> int:
        return len(self.dates)

    @property
    def n_series(self) -> int:
        return len(self.names)

    @classmethod
    def from_array(cls, data, names: Sequence[str] | None = None, start: str = "2000-01"):
        """Wrap a plain array with synthetic month labels starting at ``start``."""
        data = np.asarray(data, dtype=float)
        if data.ndim == 1:
            data = data[:, None]
        t, m = data.shape
        if names is None:
            names = [f"y{i + 1}" for i in range(m)]
        return cls(month_range(start, t), tuple(names), data)

    def select(self, names: Sequence[str]) -> "ReturnPanel":
        idx = [self.names.index(n) for n in names]
        return ReturnPanel(self.dates, tuple(names), self.returns[:, idx])

    def __eq__(self, other):
        if not isinstance(other, ReturnPanel):
            return NotImplemented
        return (
            self.dates == other.dates
            and self.names == other.names
            and np.array_equal(self.returns, other.returns)
        )

    __hash__ = None


def month_range(start: str, n: int) -> tuple[str, ...]:
    """``n`` consecutive month labels beginning at ``start``."""
    year, month = _month_key(parse_month(start))
    out = []
    for k in range(n):
        y, m = divmod(month - 1 + k, 12)
        out.append(f"{year + y:04d}-{m + 1:02d}")
    return tuple(out)


def load_csv(path, date_column: str = "date") -> PricePanel:
    """Read a level panel from CSV.

    The file must have a header row, one ``YYYY-MM`` date column and numeric
    level columns.  Rows are returned sorted by date; column order follows
    the file.  Empty or non-numeric cells are rejected rather than imputed.
    """
    path = Path(path)
    if not path.is_file():
        raise MissingFile(f"no such file: {path}")

    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedHeader(f"{path} is empty") from None
        header = [h.strip() for h in header]
        if date_column not in header:
            raise MalformedHeader(f"date column {date_column!r} not in header {header}")
        if len(set(header)) != len(header) or any(h == "" for h in header):
            raise MalformedHeader(f"blank or duplicate column names in header {header}")
        date_idx = header.index(date_column)
        names = [h for i, h in enumerate(header) if i != date_idx]
        if not names:
            raise MalformedHeader("header has no value columns")

        dates: list[str] = []
        rows: list[list[float]] = []
        for lineno, record in enumerate(reader, start=1):
            if not record or all(not c.strip() for c in record):
                continue
            if len(record) != len(header):
                raise UnparseableCell(lineno, header[min(len(record), len(header) - 1)], ",".join(record))
            try:
                dates.append(parse_month(record[date_idx]))
            except ValueError:
                raise UnparseableCell(lineno, date_column, record[date_idx]) from None
            row = []
            for i, cell in enumerate(record):
                if i == date_idx:
                    continue
                try:
                    value = float(cell)
                except ValueError:
                    raise UnparseableCell(lineno, header[i], cell) from None
                if not math.isfinite(value):
                    raise UnparseableCell(lineno, header[i], cell)
                if value <= 0:
                    raise NonPositivePrice(lineno, header[i], value)
                row.append(value)
            rows.append(row)

    if len(set(dates)) != len(dates):
        seen = set()
        dup = next(d for d in dates if d in seen or seen.add(d))
        raise DuplicateDate(f"date {dup} appears more than once")
    order = sorted(range(len(dates)), key=lambda k: _month_key(dates[k]))
    values = np.array([rows[k] for k in order], dtype=float).reshape(len(order), len(names))
    return PricePanel(tuple(dates[k] for k in order), tuple(names), values)


def to_log_returns(panel: PricePanel) -> ReturnPanel:
    if panel.n_obs < 2:
        raise TooFewObservations("need at least two price observations")
    returns = np.diff(np.log(panel.values), axis=0)
    return ReturnPanel(panel.dates[1:], panel.names, returns)


def align(panels: Sequence[PricePanel]) -> PricePanel:
    """Inner-join panels on date and concatenate their columns."""
    panels = list(panels)
    if not panels:
        raise EmptyIntersection("no panels to align")
    names = [n for p in panels for n in p.names]
    if len(set(names)) != len(names):
        dup = sorted({n for n in names if names.count(n) > 1})
        raise DuplicateSeriesName(f"series names collide across panels: {dup}")
    common = set(panels[0].dates)
    for p in panels[1:]:
        common &= set(p.dates)
    if not common:
        raise EmptyIntersection("panels share no dates")
    dates = sorted(common, key=_month_key)
    blocks = []
    for p in panels:
        pos = {d: i for i, d in enumerate(p.dates)}
        blocks.append(p.values[[pos[d] for d in dates], :])
    return PricePanel(tuple(dates), tuple(names), np.hstack(blocks))
