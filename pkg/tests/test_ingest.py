import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spillover.errors import (
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
from spillover.ingest import PricePanel, ReturnPanel, align, load_csv, month_range, to_log_returns


def write(tmp_path, text, name="prices.csv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def panel(start, n, names, seed=0):
    rng = np.random.default_rng(seed)
    levels = 100 * np.exp(np.cumsum(rng.normal(0, 0.05, size=(n, len(names))), axis=0))
    return PricePanel(month_range(start, n), tuple(names), levels)


class TestLoadCsv:
    def test_small_panel(self, tmp_path):
        path = write(tmp_path, "date,a,b\n2012-01,100,100\n2012-02,110,90\n2012-03,121,81\n")
        p = load_csv(path, "date")
        assert (p.n_obs, p.n_series) == (3, 2)
        assert p.names == ("a", "b")
        np.testing.assert_array_equal(p.values, [[100, 100], [110, 90], [121, 81]])

    def test_rows_sorted_columns_kept(self, tmp_path):
        path = write(tmp_path, "b,month,a\n2,2020-03,1\n4,2020-01,3\n6,2020-02,5\n")
        p = load_csv(path, "month")
        assert p.dates == ("2020-01", "2020-02", "2020-03")
        assert p.names == ("b", "a")
        np.testing.assert_array_equal(p.values[:, 0], [4, 6, 2])

    def test_full_paper_sample_size(self, tmp_path):
        dates = month_range("2012-01", 144)
        assert dates[-1] == "2023-12"
        names = [f"s{i}" for i in range(8)]
        lines = ["date," + ",".join(names)]
        for k, d in enumerate(dates):
            lines.append(d + "," + ",".join(str(100 + k + i) for i in range(8)))
        p = load_csv(write(tmp_path, "\n".join(lines) + "\n"))
        assert (p.n_obs, p.n_series) == (144, 8)

    def test_zero_level(self, tmp_path):
        with pytest.raises(NonPositivePrice) as exc:
            load_csv(write(tmp_path, "date,a\n2012-01,100\n2012-02,0.0\n"))
        assert exc.value.row == 2 and exc.value.col == "a"

    def test_missing_file(self, tmp_path):
        with pytest.raises(MissingFile):
            load_csv(tmp_path / "nope.csv")

    @pytest.mark.parametrize(
        "text",
        ["", "a,b\n2012-01,1\n", "date,,b\n2012-01,1,2\n", "date,a,a\n2012-01,1,2\n"],
    )
    def test_bad_header(self, tmp_path, text):
        with pytest.raises(MalformedHeader):
            load_csv(write(tmp_path, text))

    @pytest.mark.parametrize(
        "row",
        ["2012-02,abc", "2012-02,", "2012/02,5", "2012-13,5", "2012-02,1,000", "2012-02,nan"],
    )
    def test_unparseable(self, tmp_path, row):
        with pytest.raises(UnparseableCell):
            load_csv(write(tmp_path, f"date,a\n2012-01,100\n{row}\n"))

    def test_duplicate_date(self, tmp_path):
        with pytest.raises(DuplicateDate):
            load_csv(write(tmp_path, "date,a\n2012-01,100\n2012-01,101\n"))


class TestLogReturns:
    def test_constant_growth(self):
        p = PricePanel(month_range("2012-01", 3), ("a",), [[100], [110], [121]])
        r = to_log_returns(p)
        np.testing.assert_allclose(r.returns[:, 0], [math.log(1.1)] * 2, rtol=1e-14)
        assert r.dates == ("2012-02", "2012-03")
        assert abs(r.returns[0, 0] - 0.09531) < 1e-5

    def test_flat(self):
        p = PricePanel(month_range("2012-01", 2), ("a",), [[100], [100]])
        assert to_log_returns(p).returns[0, 0] == 0.0

    def test_too_short(self):
        with pytest.raises(TooFewObservations):
            to_log_returns(PricePanel(("2012-01",), ("a",), [[100.0]]))

    def test_lognormal_walk_moments(self):
        # 200 independent 144-month walks with known drift and volatility
        rng = np.random.default_rng(11)
        drift, vol, n_walks = 0.004, 0.05, 200
        means, stds = [], []
        for _ in range(n_walks):
            steps = rng.normal(drift, vol, 143)
            levels = 100 * np.exp(np.concatenate([[0.0], np.cumsum(steps)]))
            p = PricePanel(month_range("2012-01", 144), ("x",), levels[:, None])
            r = to_log_returns(p)
            assert r.returns.shape == (143, 1)
            means.append(r.returns.mean())
            stds.append(r.returns.std(ddof=1))
        # Monte-Carlo standard error of the grand mean is vol / sqrt(143 * 200)
        assert abs(np.mean(means) - drift) < 4 * vol / math.sqrt(143 * n_walks)
        assert abs(np.mean(stds) - vol) < 0.002

    @settings(max_examples=50, deadline=None)
    @given(
        st.lists(
            st.lists(st.floats(1e-3, 1e6), min_size=2, max_size=2), min_size=2, max_size=40
        )
    )
    def test_round_trip(self, rows):
        p = PricePanel(month_range("2000-01", len(rows)), ("a", "b"), rows)
        r = to_log_returns(p)
        rebuilt = p.values[0] * np.exp(np.vstack([np.zeros(2), np.cumsum(r.returns, axis=0)]))
        np.testing.assert_allclose(rebuilt, p.values, rtol=1e-10)


class TestAlign:
    def test_identical_dates(self):
        a, b = panel("2012-01", 5, ["a"]), panel("2012-01", 5, ["b"], seed=1)
        out = align([a, b])
        assert out.names == ("a", "b") and out.dates == a.dates
        np.testing.assert_array_equal(out.values, np.hstack([a.values, b.values]))

    def test_interval_intersection(self):
        a = panel("2012-01", 108, ["a"])  # 2012-01 .. 2020-12
        b = panel("2015-01", 108, ["b"])  # 2015-01 .. 2023-12
        assert a.dates[-1] == "2020-12" and b.dates[-1] == "2023-12"
        out = align([a, b])
        assert out.dates[0] == "2015-01" and out.dates[-1] == "2020-12"
        assert out.n_obs == 72

    def test_three_panels_common_core(self):
        # 144 / 140 / 120 months that share exactly a 120-month core
        a = panel("2012-01", 144, ["a"])
        b = panel("2012-03", 140, ["b"])
        c = panel("2013-01", 120, ["c"])
        core = set(a.dates) & set(b.dates) & set(c.dates)
        out = align([a, b, c])
        assert (out.n_obs, out.n_series) == (len(core), 3) == (120, 3)

    def test_idempotent(self):
        ps = [panel("2012-01", 30, ["a"]), panel("2012-06", 30, ["b"], 2)]
        once = align(ps)
        assert align([once]) == once

    def test_empty_intersection(self):
        with pytest.raises(EmptyIntersection):
            align([panel("2012-01", 5, ["a"]), panel("2015-01", 5, ["b"])])
        with pytest.raises(EmptyIntersection):
            align([])

    def test_duplicate_names(self):
        with pytest.raises(DuplicateSeriesName):
            align([panel("2012-01", 5, ["a"]), panel("2012-01", 5, ["a"], 3)])


def test_panels_are_immutable():
    p = panel("2012-01", 5, ["a", "b"])
    with pytest.raises(ValueError):
        p.values[0, 0] = 1.0
    r = to_log_returns(p)
    with pytest.raises(ValueError):
        r.returns[0, 0] = 1.0


def test_return_panel_rejects_non_finite():
    with pytest.raises(DataError):
        ReturnPanel(month_range("2012-01", 2), ("a",), [[0.1], [np.nan]])
