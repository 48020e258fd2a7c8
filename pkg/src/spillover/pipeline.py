"""End-to-end runs: static tables, dynamic series and diagnostics.

Each ``run_*`` function reads the configured panel, writes its outputs into
``config.out_dir`` and returns a :class:`RunReport` listing every file with
its SHA-256 digest.  Errors raised inside a stage carry a ``stage``
attribute naming it.
"""

from __future__ import annotations

import contextlib
import csv
import hashlib
import io
import json
import logging
import math
import re
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__
from .connectedness import DEFAULT_HORIZON, gfevd, spillover_summary
from .diagnostics import (
    adf_test,
    correlation_matrix,
    descriptive_stats,
    jarque_bera,
    kpss_test,
    pp_test,
    za_test,
)
from .errors import ConfigError, InvalidPartition, SpilloverError, UnstableModel
from .frequency import (
    FrequencyBand,
    band_summary,
    bands_from_months,
    default_bands,
    dft_size,
    spectral_gfevd,
    validate_partition,
)
from .ingest import ReturnPanel, load_csv, to_log_returns
from .network import all_centralities, build_network, network_to_dict
from .tvpvar import TvpConfig, fit_tvp, model_at
from .var import fit_ols, is_stable, select_lag_aic

__all__ = [
    "AnalysisConfig",
    "RunReport",
    "load_config",
    "load_returns",
    "run_static",
    "run_dynamic",
    "run_diagnostics",
    "static_analysis",
    "dynamic_analysis",
]

log = logging.getLogger(__name__)

DEFAULT_MAX_LAG = 4


@dataclass(frozen=True)
class AnalysisConfig:
    input: str | None = None
    date_column: str = "date"
    series: tuple[str, ...] | None = None
    lag: int | str = "aic"
    max_lag: int = DEFAULT_MAX_LAG
    horizon: int = DEFAULT_HORIZON
    bands: tuple[FrequencyBand, ...] = field(default_factory=lambda: tuple(default_bands()))
    tvp: TvpConfig = field(default_factory=TvpConfig)
    dft_size: int | None = None
    out_dir: str = "out"
    seed: int | None = None
    diagnostics: bool = False
    network: bool = True

    def __post_init__(self):
        if self.horizon < 1:
            raise ConfigError("horizon must be at least 1")
        if isinstance(self.lag, str):
            if self.lag != "aic":
                raise ConfigError(f"lag must be a positive integer or 'aic', got {self.lag!r}")
        elif int(self.lag) < 1:
            raise ConfigError("lag must be positive")
        if self.max_lag < 1:
            raise ConfigError("max_lag must be positive")
        if self.series is not None:
            if len(self.series) == 0:
                raise ConfigError("series selection is empty")
            object.__setattr__(self, "series", tuple(self.series))
        try:
            validate_partition(self.bands)
        except InvalidPartition as exc:
            raise ConfigError(f"invalid band partition: {exc}") from None
        object.__setattr__(self, "bands", tuple(self.bands))
        if self.n_dft < 2 * self.horizon:
            raise ConfigError(f"dft_size {self.n_dft} must be >= 2 * horizon")

    @property
    def n_dft(self) -> int:
        return dft_size(self.horizon) if self.dft_size is None else int(self.dft_size)

    def resolved(self) -> dict:
        return {
            "input": self.input,
            "date_column": self.date_column,
            "series": list(self.series) if self.series else None,
            "lag": self.lag,
            "max_lag": self.max_lag,
            "horizon": self.horizon,
            "dft_size": self.n_dft,
            "bands": [
                {"label": b.label, "lower": b.lower, "upper": b.upper, "months": b.month_label()}
                for b in self.bands
            ],
            "tvp": asdict(self.tvp),
            "seed": self.seed,
        }


@dataclass
class RunReport:
    command: str
    settings: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)
    outputs: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    out_dir: str = ""
    results: Any = field(default=None, repr=False, compare=False)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "version": __version__,
            "settings": self.settings,
            "timings_seconds": self.timings,
            "outputs": self.outputs,
            "notes": self.notes,
        }


# --- configuration ------------------------------------------------------------

_PI_EXPR = re.compile(r"^\s*(?:(?P<num>[0-9.]+)\s*\*?\s*)?pi(?:\s*/\s*(?P<den>[0-9.]+))?\s*$")


def _radians(value) -> float:
    """Accept plain numbers or strings such as ``"pi"``, ``"pi/4"``, ``"3pi/4"``."""
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        m = _PI_EXPR.match(value)
        if m:
            num = float(m.group("num") or 1.0)
            den = float(m.group("den") or 1.0)
            return num * math.pi / den
        try:
            return float(value)
        except ValueError:
            pass
    raise ConfigError(f"cannot read frequency {value!r}")


def parse_bands(spec) -> tuple[FrequencyBand, ...]:
    """Bands from JSON: ``{"label", "lower", "upper"}`` in radians or
    ``{"label", "months": [min, max]}`` with ``null`` for an open end."""
    if spec is None or spec == "default":
        return tuple(default_bands())
    out = []
    try:
        for item in spec:
            if "months" in item:
                lo, hi = item["months"]
                out.extend(bands_from_months([(item["label"], lo, hi)]))
            else:
                out.append(FrequencyBand(item["label"], _radians(item["lower"]), _radians(item["upper"])))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed band specification: {exc}") from None
    except InvalidPartition as exc:
        raise ConfigError(str(exc)) from None
    return tuple(out)


_CONFIG_KEYS = {
    "input", "date_column", "series", "lag", "max_lag", "horizon", "bands",
    "tvp", "dft_size", "out_dir", "seed", "diagnostics", "network",
}


def config_from_dict(raw: dict, base_dir: Path | None = None) -> AnalysisConfig:
    unknown = set(raw) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    kwargs = {k: v for k, v in raw.items() if k not in {"bands", "tvp"}}
    if "bands" in raw:
        kwargs["bands"] = parse_bands(raw["bands"])
    if "tvp" in raw:
        try:
            kwargs["tvp"] = TvpConfig(**raw["tvp"])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad tvp settings: {exc}") from None
    if base_dir is not None and kwargs.get("input"):
        path = Path(kwargs["input"])
        if not path.is_absolute():
            kwargs["input"] = str(base_dir / path)
    try:
        return AnalysisConfig(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def load_config(path=None, **overrides) -> AnalysisConfig:
    """Read a JSON config; keyword overrides (e.g. CLI flags) win when not None.

    A relative ``input`` path is resolved against the config file's directory.
    """
    raw: dict = {}
    base_dir = None
    if path is not None:
        path = Path(path)
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError("config file must contain a JSON object")
        base_dir = path.parent
    raw.update({k: v for k, v in overrides.items() if v is not None})
    return config_from_dict(raw, base_dir)


# --- helpers ------------------------------------------------------------------


@contextlib.contextmanager
def _stage(name: str, timings: dict):
    start = time.perf_counter()
    try:
        yield
    except SpilloverError as exc:
        if getattr(exc, "stage", None) is None:
            exc.stage = name
            exc.args = (f"[{name}] {exc}",)
        raise
    finally:
        timings[name] = round(time.perf_counter() - start, 6)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        if not math.isfinite(value):
            return "nan" if math.isnan(value) else ("inf" if value > 0 else "-inf")
        return f"{value:.6f}"
    return str(value)


class _Writer:
    """Writes output files and keeps the digest manifest."""

    def __init__(self, out_dir):
        self.root = Path(out_dir)
        self.root.mkdir(parents=True, exist_ok=True)
        self.manifest: list[dict] = []

    def _put(self, rel: str, data: bytes) -> Path:
        path = self.root / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(data)
        self.manifest.append(
            {"path": rel, "sha256": hashlib.sha256(data).hexdigest(), "bytes": len(data)}
        )
        return path

    def csv(self, rel: str, rows: Sequence[Sequence]) -> Path:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
        return self._put(rel, buf.getvalue().encode("utf-8"))

    def json(self, rel: str, payload) -> Path:
        text = json.dumps(payload, indent=2, allow_nan=True) + "\n"
        return self._put(rel, text.encode("utf-8"))


def load_returns(config: AnalysisConfig) -> ReturnPanel:
    if not config.input:
        raise ConfigError("no input file configured")
    prices = load_csv(config.input, config.date_column)
    if config.series is not None:
        missing = [s for s in config.series if s not in prices.names]
        if missing:
            raise ConfigError(f"unknown series {missing}; available {list(prices.names)}")
        prices = prices.select(config.series)
    return to_log_returns(prices)


def resolve_lag(panel: ReturnPanel, config: AnalysisConfig) -> int:
    if config.lag == "aic":
        return select_lag_aic(panel, config.max_lag)
    return int(config.lag)


def spillover_block(summary, title: str) -> list[list]:
    """One table block: header, M share rows with From, To row with TCI, Net row."""
    names = list(summary.names)
    rows: list[list] = [[title, *names, "From"]]
    for i, name in enumerate(names):
        rows.append([name, *(100.0 * summary.table[i]).tolist(), float(summary.from_[i])])
    rows.append(["To", *summary.to.tolist(), f"TCI={summary.tsi:.6f}"])
    rows.append(["Net", *summary.net.tolist(), None])
    return rows


# --- static -------------------------------------------------------------------


@dataclass
class StaticResult:
    lag: int
    model: Any
    fevd: Any
    summary: Any
    spectral: Any
    band_summaries: dict
    networks: dict


def static_analysis(panel: ReturnPanel, config: AnalysisConfig, timings: dict | None = None) -> StaticResult:
    """Full-sample VAR, time-domain table, band tables and networks (no I/O)."""
    timings = {} if timings is None else timings
    with _stage("lag_selection", timings):
        lag = resolve_lag(panel, config)
    with _stage("var_fit", timings):
        model = fit_ols(panel, lag)
        stable, radius = is_stable(model)
        if not stable:
            raise UnstableModel(f"estimated VAR({lag}) has spectral radius {radius:.6g}")
    with _stage("fevd", timings):
        fevd = gfevd(model, config.horizon)
        summary = spillover_summary(fevd)
    with _stage("frequency", timings):
        spectral = spectral_gfevd(model, config.horizon, config.bands, config.n_dft)
        bands = {b.label: band_summary(spectral, b.label) for b in config.bands}
    networks = {}
    if config.network:
        with _stage("network", timings):
            for label, s in [("total", summary), *bands.items()]:
                net = build_network(s)
                networks[label] = (net, all_centralities(net))
    return StaticResult(lag, model, fevd, summary, spectral, bands, networks)


def run_static(config: AnalysisConfig) -> RunReport:
    timings: dict = {}
    report = RunReport("static", out_dir=config.out_dir)
    with _stage("ingest", timings):
        panel = load_returns(config)
    out = _Writer(config.out_dir)
    if config.diagnostics:
        _write_diagnostics(panel, out, timings)
    res = static_analysis(panel, config, timings)
    with _stage("write", timings):
        names = list(panel.names)
        out.csv("fevd.csv", [["", *names], *[[n, *res.fevd.normalized[i].tolist()] for i, n in enumerate(names)]])
        table = spillover_block(res.summary, "total")
        for label, s in res.band_summaries.items():
            table += [[]] + spillover_block(s, label)
            out.csv(f"bands/{label}_table.csv", spillover_block(s, label))
        out.csv("spillover_table.csv", table)
        if config.network:
            total_net, total_cent = res.networks["total"]
            payload = network_to_dict(total_net, total_cent)
            payload["bands"] = {
                label: network_to_dict(n, c) for label, (n, c) in res.networks.items() if label != "total"
            }
            out.json("network.json", payload)
    report.settings = {
        **config.resolved(),
        "selected_lag": res.lag,
        "n_obs": panel.n_obs,
        "sample": [panel.dates[0], panel.dates[-1]],
        "names": names,
        "spectral_radius": is_stable(res.model)[1],
        "tsi": res.summary.tsi,
        "band_tsi": {k: v.tsi for k, v in res.band_summaries.items()},
    }
    report.results = res
    _finish(report, out, timings)
    return report


# --- dynamic ------------------------------------------------------------------


@dataclass
class DynamicResult:
    lag: int
    path: Any
    dates: tuple
    tsi: np.ndarray  # (n,)
    band_tsi: dict  # label -> (n,)
    net: np.ndarray  # (n, M)
    band_net: dict  # label -> (n, M)
    gaps: dict  # index -> reason


def dynamic_analysis(panel: ReturnPanel, config: AnalysisConfig, timings: dict | None = None) -> DynamicResult:
    timings = {} if timings is None else timings
    tvp = config.tvp
    if panel.n_obs < tvp.prior_window + 12:
        raise ConfigError(
            f"dynamic analysis needs at least prior_window + 12 = {tvp.prior_window + 12} "
            f"observations, have {panel.n_obs}"
        )
    with _stage("lag_selection", timings):
        lag = resolve_lag(panel, config)
    with _stage("tvp_filter", timings):
        path = fit_tvp(panel, replace(tvp, lag_order=lag))
    n, m = len(path), panel.n_series
    labels = [b.label for b in config.bands]
    tsi = np.full(n, np.nan)
    net = np.full((n, m), np.nan)
    band_tsi = {b: np.full(n, np.nan) for b in labels}
    band_net = {b: np.full((n, m), np.nan) for b in labels}
    gaps: dict[int, str] = {}
    with _stage("dynamic_fevd", timings):
        for k in range(n):
            try:
                model = model_at(path, k)
                spectral = spectral_gfevd(model, config.horizon, config.bands, config.n_dft)
            except SpilloverError as exc:
                gaps[k] = f"{type(exc).__name__}: {exc}"
                log.warning("dynamic FEVD gap at %s: %s", path.dates[k], exc)
                continue
            s = spillover_summary(spectral.fevd)
            tsi[k], net[k] = s.tsi, s.net
            for b in labels:
                bs = band_summary(spectral, b)
                band_tsi[b][k], band_net[b][k] = bs.tsi, bs.net
    return DynamicResult(lag, path, path.dates, tsi, band_tsi, net, band_net, gaps)


def run_dynamic(config: AnalysisConfig) -> RunReport:
    timings: dict = {}
    report = RunReport("dynamic", out_dir=config.out_dir)
    with _stage("ingest", timings):
        panel = load_returns(config)
    res = dynamic_analysis(panel, config, timings)
    labels = [b.label for b in config.bands]
    names = list(panel.names)
    out = _Writer(config.out_dir)
    with _stage("write", timings):
        rows = [["date", "total", *labels, "gap_reason"]]
        for k, date in enumerate(res.dates):
            rows.append([date, res.tsi[k], *(res.band_tsi[b][k] for b in labels), res.gaps.get(k)])
        out.csv("dynamic_tsi.csv", rows)
        header = ["date"] + [f"{scope}:{n}" for scope in ["total", *labels] for n in names] + ["gap_reason"]
        rows = [header]
        for k, date in enumerate(res.dates):
            vals = list(res.net[k])
            for b in labels:
                vals.extend(res.band_net[b][k])
            rows.append([date, *vals, res.gaps.get(k)])
        out.csv("dynamic_net.csv", rows)
    report.settings = {
        **config.resolved(),
        "selected_lag": res.lag,
        "n_obs": panel.n_obs,
        "names": names,
        "series_start": res.dates[0],
        "series_end": res.dates[-1],
        "prior_window_dates": [panel.dates[0], panel.dates[config.tvp.prior_window - 1]],
        "gaps": {res.dates[k]: why for k, why in sorted(res.gaps.items())},
    }
    report.notes.append(
        "dynamic series start after the TVP prior window; the first "
        f"{config.tvp.prior_window} return observations only form the prior"
    )
    report.results = res
    _finish(report, out, timings)
    return report


# --- diagnostics --------------------------------------------------------------

DIAGNOSTIC_COLUMNS = [
    "series", "n_obs", "mean", "median", "std_dev", "skewness", "kurtosis",
    "jb_stat", "jb_rejected_at",
    "adf_stat", "adf_lags", "adf_rejected_at",
    "pp_stat", "pp_bandwidth", "pp_rejected_at",
    "kpss_stat", "kpss_bandwidth", "kpss_rejected_at",
    "za_stat", "za_lags", "za_break_date", "za_rejected_at",
]


def diagnostics_rows(panel: ReturnPanel) -> list[list]:
    rows = [list(DIAGNOSTIC_COLUMNS)]
    for j, st in enumerate(descriptive_stats(panel)):
        x = panel.returns[:, j]
        jb, adf, pp, kpss, za = jarque_bera(x), adf_test(x), pp_test(x), kpss_test(x), za_test(x)
        rows.append([
            st.name, st.n_obs, st.mean, st.median, st.std_dev, st.skewness, st.kurtosis,
            jb.statistic, jb.rejected_at,
            adf.statistic, adf.nuisance["lags"], adf.rejected_at,
            pp.statistic, pp.nuisance["bandwidth"], pp.rejected_at,
            kpss.statistic, kpss.nuisance["bandwidth"], kpss.rejected_at,
            za.statistic, za.nuisance["lags"], panel.dates[za.nuisance["break_index"]], za.rejected_at,
        ])
    return rows


def _write_diagnostics(panel: ReturnPanel, out: _Writer, timings: dict) -> None:
    with _stage("diagnostics", timings):
        rows = diagnostics_rows(panel)
        corr = correlation_matrix(panel)
    names = list(panel.names)
    out.csv("diagnostics.csv", rows)
    out.csv("correlation.csv", [["", *names], *[[n, *corr[i].tolist()] for i, n in enumerate(names)]])


def run_diagnostics(config: AnalysisConfig) -> RunReport:
    timings: dict = {}
    report = RunReport("diagnostics", out_dir=config.out_dir)
    with _stage("ingest", timings):
        panel = load_returns(config)
    out = _Writer(config.out_dir)
    _write_diagnostics(panel, out, timings)
    report.settings = {**config.resolved(), "n_obs": panel.n_obs, "names": list(panel.names)}
    _finish(report, out, timings)
    return report


def _finish(report: RunReport, out: _Writer, timings: dict) -> None:
    report.timings = timings
    report.outputs = list(out.manifest) + [{"path": "run_report.json", "sha256": None, "bytes": None}]
    out.json("run_report.json", report.to_dict())
    out.manifest.pop()  # the report's own entry is listed above without a digest
