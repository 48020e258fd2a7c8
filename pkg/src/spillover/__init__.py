"""Return-spillover analysis: generalized FEVD connectedness in the time and
frequency domains, net pairwise spillover networks and TVP-VAR dynamics."""

__version__ = "0.1.0"

from .connectedness import FevdTable, SpilloverSummary, gfevd, spillover_summary
from .diagnostics import (
    adf_test,
    correlation_matrix,
    descriptive_stats,
    jarque_bera,
    kpss_test,
    pp_test,
    za_test,
)
from .frequency import FrequencyBand, band_summary, default_bands, spectral_gfevd
from .ingest import PricePanel, ReturnPanel, align, load_csv, to_log_returns
from .network import (
    betweenness_centrality,
    build_network,
    closeness_centrality,
    degree_centrality,
    eigenvector_centrality,
)
from .tvpvar import TvpConfig, TvpVarPath, fit_tvp, model_at
from .var import VarModel, fit_ols, is_stable, select_lag_aic, simulate, vma_coefficients

__all__ = [
    "FevdTable", "SpilloverSummary", "gfevd", "spillover_summary",
    "adf_test", "correlation_matrix", "descriptive_stats", "jarque_bera",
    "kpss_test", "pp_test", "za_test",
    "FrequencyBand", "band_summary", "default_bands", "spectral_gfevd",
    "PricePanel", "ReturnPanel", "align", "load_csv", "to_log_returns",
    "betweenness_centrality", "build_network", "closeness_centrality",
    "degree_centrality", "eigenvector_centrality",
    "TvpConfig", "TvpVarPath", "fit_tvp", "model_at",
    "VarModel", "fit_ols", "is_stable", "select_lag_aic", "simulate", "vma_coefficients",
]
