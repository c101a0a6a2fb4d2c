"""
扫描结果汇总
"""

import numpy as np
import pandas as pd
import pytest

from flexcast.config import AppConfig, FlexSettings, set_config
from flexcast.config.constants import RESULT_COLUMNS
from flexcast.core.sweep import summarize
from flexcast.utils.exceptions import ConfigError, ValidationError


def row(magnitude, product="redispatch", lead=1.0, day="2023-06-01", status="optimal", bau="cost_min"):
    return {
        'date': day, 'category': "all", 'bau': bau, 'v2g': False, 'product': product,
        'window_start': "17:00", 'window_len': 1.0, 'lead_h': lead, 'magnitude_kw': magnitude,
        'cost_delta': 0.0, 'emission_delta': 0.0, 'status': status, 'n_transactions': 10, 'message': "",
    }


def table(*rows) -> pd.DataFrame:
    return pd.DataFrame(list(rows), columns=RESULT_COLUMNS)


class TestSummarize:
    def test_single_row(self):
        summary = summarize(table(row(7.5)), ["product"])
        assert len(summary) == 1
        first = summary.iloc[0]
        assert first['count'] == 1
        assert first['mean'] == first['min'] == first['max'] == first['q50'] == 7.5
        assert np.isnan(first['std'])

    def test_mean_of_two(self):
        summary = summarize(table(row(4.0), row(6.0, day="2023-06-02")), ["product", "bau"])
        assert summary['mean'].iloc[0] == pytest.approx(5.0)
        assert summary['q05'].iloc[0] == pytest.approx(4.1)
        assert summary['q95'].iloc[0] == pytest.approx(5.9)

    def test_columns(self):
        summary = summarize(table(row(1.0)), ["product"])
        assert list(summary.columns) == [
            'product', 'count', 'mean', 'std', 'min', 'max', 'q05', 'q25', 'q50', 'q75', 'q95',
            'lead_delta_mean', 'lead_reduction_mean',
        ]

    def test_only_optimal_rows_count(self):
        rows = table(row(4.0), row(float('nan'), status="infeasible", day="2023-06-02"))
        assert summarize(rows, ["product"])['count'].iloc[0] == 1

    def test_lead_deltas_by_product(self):
        rows = table(
            row(10.0, lead=1.0), row(14.0, lead=23.0),
            row(10.0, lead=1.0, day="2023-06-02"), row(12.0, lead=23.0, day="2023-06-02"),
            row(20.0, "capacity_limitation", lead=1.0), row(15.0, "capacity_limitation", lead=23.0),
        )
        summary = summarize(rows, ["product"]).set_index('product')
        assert summary.loc["redispatch", 'lead_delta_mean'] == pytest.approx(3.0)
        assert summary.loc["redispatch", 'lead_reduction_mean'] == pytest.approx(3.0)
        assert summary.loc["capacity_limitation", 'lead_delta_mean'] == pytest.approx(-5.0)
        assert summary.loc["capacity_limitation", 'lead_reduction_mean'] == pytest.approx(5.0)

    def test_unpaired_rows_leave_delta_empty(self):
        summary = summarize(table(row(3.0, lead=4.0)), ["product"])
        assert np.isnan(summary['lead_delta_mean'].iloc[0])

    def test_no_group_keys(self):
        summary = summarize(table(row(2.0), row(4.0, "capacity_limitation")), [])
        assert len(summary) == 1
        assert summary['count'].iloc[0] == 2
        assert '_all' not in summary.columns

    def test_grouping_by_lead(self):
        summary = summarize(table(row(1.0, lead=1.0), row(3.0, lead=23.0)), ["lead_h"])
        assert summary['lead_h'].tolist() == [1.0, 23.0]
        assert summary['lead_delta_mean'].isna().all()

    def test_unknown_key(self):
        with pytest.raises(ConfigError):
            summarize(table(row(1.0)), ["station"])

    def test_empty_table(self):
        with pytest.raises(ValidationError):
            summarize(table(), ["product"])

    def test_lead_pair_follows_configured_range(self):
        set_config(AppConfig(flex=FlexSettings(min_lead_time_h=2.0, max_lead_time_h=6.0)))
        rows = table(row(5.0, lead=1.0), row(8.0, lead=2.0), row(11.0, lead=6.0), row(40.0, lead=23.0))
        summary = summarize(rows, ["product"])
        assert summary['lead_delta_mean'].iloc[0] == pytest.approx(3.0)

    def test_explicit_leads_override_config(self):
        rows = table(row(5.0, lead=1.0), row(8.0, lead=2.0), row(40.0, lead=23.0))
        summary = summarize(rows, ["product"], short_lead_h=1.0, long_lead_h=2.0)
        assert summary['lead_delta_mean'].iloc[0] == pytest.approx(3.0)
