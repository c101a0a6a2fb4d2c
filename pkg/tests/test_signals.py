"""
价格与排放信号的读取与对齐
"""

import io
from datetime import datetime, timedelta

import numpy as np
import pytest

from flexcast.core.grid import TimeGrid
from flexcast.core.signals import Signal, SignalKind, SignalSeries, load_signal
from flexcast.utils.exceptions import (
    DuplicateTimestampError,
    MissingIntervalError,
    SignalError,
    ValidationError,
)

from conftest import ANCHOR


def hourly_csv(hours=72, start=datetime(2023, 5, 31), skip=(), blank=(),
               value=lambda h: 0.1 + 0.001 * h) -> str:
    lines = ["timestamp,value"]
    for h in range(hours):
        if h in skip:
            continue
        text = "" if h in blank else value(h)
        lines.append(f"{(start + timedelta(hours=h)).isoformat()},{text}")
    return "\n".join(lines) + "\n"


class TestLoadSignal:
    def test_hourly_value_is_broadcast(self):
        grid = TimeGrid.for_day(ANCHOR)
        text = hourly_csv(value=lambda h: 0.20 if h == 32 else 0.1)
        signal = load_signal(io.StringIO(text), SignalKind.DAY_AHEAD_PRICE, grid)
        eight = grid.step_of_clock(8, 0)
        assert signal.n_steps == 288
        np.testing.assert_allclose(signal.values[eight:eight + 4], 0.20)
        assert signal.values[eight - 1] == pytest.approx(0.1)
        assert signal.values[eight + 4] == pytest.approx(0.1)
        assert signal.unit == "EUR/kWh"

    def test_constant_series(self):
        grid = TimeGrid.for_day(ANCHOR)
        signal = load_signal(io.StringIO(hourly_csv(value=lambda h: 0.3)), SignalKind.MEF, grid)
        assert np.all(signal.values == 0.3)
        assert Signal.constant(SignalKind.MEF, grid, 0.3).values.tolist() == signal.values.tolist()

    def test_quarter_hour_series(self):
        grid = TimeGrid.for_day(ANCHOR)
        lines = ["timestamp,value"]
        for t in range(288):
            lines.append(f"{grid.step_start(t).isoformat()},{t}")
        signal = load_signal(io.StringIO("\n".join(lines)), SignalKind.DAY_AHEAD_PRICE, grid)
        np.testing.assert_array_equal(signal.values, np.arange(288, dtype=float))

    def test_missing_hour_is_reported(self):
        grid = TimeGrid.for_day(ANCHOR)
        with pytest.raises(MissingIntervalError) as excinfo:
            load_signal(io.StringIO(hourly_csv(skip={40})), SignalKind.DAY_AHEAD_PRICE, grid)
        assert excinfo.value.gaps == [{"start": "2023-06-01T16:00:00", "end": "2023-06-01T17:00:00"}]
        assert excinfo.value.error_code == "MISSING_INTERVAL"

    def test_short_series_reports_tail_gap(self):
        grid = TimeGrid.for_day(ANCHOR)
        with pytest.raises(MissingIntervalError) as excinfo:
            load_signal(io.StringIO(hourly_csv(hours=70)), SignalKind.MEF, grid)
        assert excinfo.value.gaps == [{"start": "2023-06-02T22:00:00", "end": "2023-06-03T00:00:00"}]

    def test_nan_value_counts_as_gap(self):
        grid = TimeGrid.for_day(ANCHOR)
        with pytest.raises(MissingIntervalError):
            load_signal(io.StringIO(hourly_csv(blank={24})), SignalKind.DAY_AHEAD_PRICE, grid)

    def test_duplicate_timestamp(self):
        text = hourly_csv() + "2023-06-01T05:00:00,0.5\n"
        with pytest.raises(DuplicateTimestampError):
            SignalSeries.from_csv(io.StringIO(text), SignalKind.DAY_AHEAD_PRICE)

    def test_missing_columns(self):
        with pytest.raises(SignalError) as excinfo:
            SignalSeries.from_csv(io.StringIO("time,price\n2023-06-01T00:00:00,1\n"), SignalKind.MEF)
        assert excinfo.value.error_code == "SIGNAL_FORMAT"

    def test_kind_mismatch(self):
        grid = TimeGrid.for_day(ANCHOR)
        series = SignalSeries.from_csv(io.StringIO(hourly_csv()), SignalKind.MEF)
        with pytest.raises(SignalError) as excinfo:
            load_signal(series, SignalKind.DAY_AHEAD_PRICE, grid)
        assert excinfo.value.error_code == "SIGNAL_KIND_MISMATCH"

    def test_one_series_serves_many_days(self):
        series = SignalSeries.from_csv(io.StringIO(hourly_csv(hours=96)), SignalKind.DAY_AHEAD_PRICE)
        first = series.for_grid(TimeGrid.for_day(ANCHOR))
        second = series.for_grid(TimeGrid.for_day(ANCHOR + timedelta(days=1)))
        np.testing.assert_array_equal(first.values[96:], second.values[:192])


class TestSignalModel:
    def test_values_are_read_only(self):
        signal = Signal.from_values(SignalKind.DAY_AHEAD_PRICE, [0.1, 0.2])
        with pytest.raises(ValueError):
            signal.values[0] = 1.0

    def test_negative_mef_rejected(self):
        with pytest.raises(ValidationError):
            Signal.from_values(SignalKind.MEF, [0.1, -0.2])

    def test_negative_price_allowed(self):
        assert Signal.from_values(SignalKind.DAY_AHEAD_PRICE, [-0.05, 0.1]).values[0] == -0.05

    def test_non_finite_rejected(self):
        with pytest.raises(ValidationError):
            Signal.from_values(SignalKind.DAY_AHEAD_PRICE, [0.1, float('nan')])
