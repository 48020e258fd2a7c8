"""Acceptance gate: one PASS/FAIL line per criterion.

Run ``pytest tests/test_acceptance.py`` (lines appear in the terminal
summary) or ``python -m tests.test_acceptance`` to print them directly.
"""

import time

import numpy as np

from spillover.connectedness import gfevd, spillover_summary
from spillover.diagnostics import adf_test, jarque_bera_from_moments, kpss_test
from spillover.frequency import band_summary, default_bands, spectral_gfevd
from spillover.pipeline import AnalysisConfig, dynamic_analysis
from spillover.tvpvar import TvpConfig, fit_tvp, model_at
from spillover.var import VarModel, fit_ols, simulate

from .models import covariance_break_panel, model_suite, small_suite
from .oracles import gfevd_oracle, spectral_oracle

RESULTS: dict[int, str] = {}


def record(number, title, ok, detail, elapsed=None, limit=None):
    if limit is not None and elapsed > limit:
        ok = False
        detail += f"; runtime {elapsed:.1f}s exceeds {limit}s"
    timing = "" if elapsed is None else f" [{elapsed:.2f}s]"
    RESULTS[number] = f"{'PASS' if ok else 'FAIL'}  {number}. {title}: {detail}{timing}"
    print(RESULTS[number])
    assert ok, RESULTS[number]


def test_1_row_sums():
    start = time.perf_counter()
    worst = 0.0
    for model, h in model_suite():
        worst = max(worst, np.abs(gfevd(model, h).normalized.sum(axis=1) - 1).max())
    elapsed = time.perf_counter() - start
    record(1, "row-sum identity", worst <= 1e-12, f"max |row sum - 1| = {worst:.2e} (tol 1e-12)", elapsed, 10)


def test_2_band_reconstruction():
    start = time.perf_counter()
    table_err = tsi_err = 0.0
    for model, h in model_suite():
        spec = spectral_gfevd(model, h, default_bands())
        time_table = gfevd(model, h).normalized
        table_err = max(table_err, np.abs(spec.total_table() - time_table).max())
        total = spillover_summary(gfevd(model, h)).tsi
        bands = sum(band_summary(spec, b.label).tsi for b in spec.bands)
        tsi_err = max(tsi_err, abs(bands - total))
    elapsed = time.perf_counter() - start
    ok = table_err <= 1e-10 and tsi_err <= 1e-10
    detail = f"max table error {table_err:.2e}, max TSI error {tsi_err:.2e} (tol 1e-10)"
    record(2, "band reconstruction", ok, detail, elapsed, 30)


def test_3_zero_sum_antisymmetry():
    start = time.perf_counter()
    worst_net = 0.0
    antisym = True
    for model, h in model_suite():
        spec = spectral_gfevd(model, h)
        summaries = [spillover_summary(spec.fevd)] + [band_summary(spec, b.label) for b in spec.bands]
        for s in summaries:
            worst_net = max(worst_net, abs(s.net.sum()))
            antisym &= bool(np.array_equal(s.npdc, -s.npdc.T))
    elapsed = time.perf_counter() - start
    ok = worst_net <= 1e-10 and antisym
    detail = f"max |sum NET| = {worst_net:.2e} (tol 1e-10), NPDC exactly antisymmetric: {antisym}"
    record(3, "zero-sum and antisymmetry", ok, detail, elapsed)


def test_4_oracle_equivalence():
    start = time.perf_counter()
    bands = default_bands()
    triples = [(b.label, b.lower, b.upper) for b in bands]
    fevd_err = spec_err = 0.0
    suite = small_suite()
    for model, h in suite:
        coefs, sigma = model.coefficients.tolist(), model.sigma.tolist()
        raw, norm = gfevd_oracle(coefs, sigma, h)
        ours = gfevd(model, h)
        fevd_err = max(fevd_err, np.abs(ours.raw - raw).max(), np.abs(ours.normalized - norm).max())
        spec = spectral_gfevd(model, h, bands)
        ref = spectral_oracle(coefs, sigma, h, triples, spec.n_dft)
        for label, table in ref.items():
            spec_err = max(spec_err, np.abs(spec.band_tables[label] - np.array(table)).max())
    elapsed = time.perf_counter() - start
    ok = fevd_err <= 1e-10 and spec_err <= 1e-10
    detail = f"{len(suite)} instances, gfevd err {fevd_err:.2e}, spectral err {spec_err:.2e} (tol 1e-10)"
    record(4, "oracle equivalence", ok, detail, elapsed)


def test_5_analytic_case():
    model = VarModel(None, np.zeros((1, 2, 2)), [[1.0, 0.5], [0.5, 1.0]])
    fevd = gfevd(model, 1)
    err = np.abs(fevd.normalized - [[0.8, 0.2], [0.2, 0.8]]).max()
    tsi = spillover_summary(fevd).tsi
    ok = err <= 1e-12 and abs(tsi - 20.0) <= 1e-12
    record(5, "analytic rho=0.5 case", ok, f"row error {err:.2e}, TSI = {tsi!r} (tol 1e-12)")


def test_6_kalman_ols():
    b = np.array([[0.5, 0.2], [-0.1, 0.3]])
    panel = simulate(VarModel([0.05, -0.02], b[None], [[1.0, 0.3], [0.3, 1.0]]), 500, seed=2024)
    config = TvpConfig(kappa1=1.0, kappa2=1.0, prior_scale=1.0)
    terminal = model_at(fit_tvp(panel, config), -1)
    ols = fit_ols(panel, 1)
    err = max(np.abs(terminal.coefficients - ols.coefficients).max(), np.abs(terminal.intercept - ols.intercept).max())
    record(6, "Kalman/OLS equivalence", err <= 1e-6, f"max coefficient gap {err:.2e} (tol 1e-6, T=500)")


def test_7_regime_detection():
    start = time.perf_counter()
    panel = covariance_break_panel(n=400, rho=0.8, seed=0)
    res = dynamic_analysis(panel, AnalysisConfig(lag=1))
    # split at the break date rather than the path midpoint
    brk = panel.dates[len(panel.dates) // 2]
    second = np.array([d >= brk for d in res.dates])
    first_med = float(np.nanmedian(res.tsi[~second]))
    second_med = float(np.nanmedian(res.tsi[second]))
    elapsed = time.perf_counter() - start
    gap = second_med - first_med
    detail = f"median TSI {first_med:.2f} -> {second_med:.2f}, rise {gap:.2f} points (need >= 10)"
    record(7, "regime detection", gap >= 10.0, detail, elapsed, 60)


def test_8_size_and_power():
    start = time.perf_counter()
    rng = np.random.default_rng(8)
    reps, n = 500, 500
    adf_wn = adf_rw = kpss_wn = kpss_rw = 0
    for _ in range(reps):
        wn = rng.standard_normal(n)
        rw = np.cumsum(rng.standard_normal(n))
        adf_wn += adf_test(wn).rejects(0.05)
        adf_rw += not adf_test(rw).rejects(0.05)
        kpss_wn += not kpss_test(wn).rejects(0.05)
        kpss_rw += kpss_test(rw).rejects(0.05)
    elapsed = time.perf_counter() - start
    rates = [adf_wn / reps, adf_rw / reps, kpss_rw / reps, kpss_wn / reps]
    ok = rates[0] >= 0.95 and rates[1] >= 0.90 and rates[2] >= 0.95 and rates[3] >= 0.90
    detail = (
        f"ADF rejects WN {rates[0]:.3f} (>=0.95), keeps RW {rates[1]:.3f} (>=0.90); "
        f"KPSS rejects RW {rates[2]:.3f} (>=0.95), keeps WN {rates[3]:.3f} (>=0.90)"
    )
    record(8, "diagnostics size/power", ok, detail, elapsed, 120)


def test_9_jarque_bera():
    stat = jarque_bera_from_moments(143, 0.1512, 3.3763).statistic
    record(9, "Jarque-Bera from published moments", abs(stat - 1.389) <= 0.01, f"JB = {stat:.4f} (target 1.389 +/- 0.01)")


if __name__ == "__main__":
    import sys

    failed = 0
    for name, fn in sorted((k, v) for k, v in globals().items() if k.startswith("test_")):
        try:
            fn()
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
