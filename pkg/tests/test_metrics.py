"""
小时平均成本与日峰值
"""

from datetime import timedelta

import numpy as np
import pytest

from flexcast.core.grid import TimeGrid
from flexcast.core.metrics import cost_increase_after_flex, daily_peak_by_hour, hourly_avg_cost, hourly_totals
from flexcast.core.scheduling import BauStrategy, Schedule, schedule_cost
from flexcast.core.signals import Signal, SignalKind
from flexcast.utils.exceptions import ConfigError, PairingError, ValidationError

from conftest import ANCHOR

NEXT_DAY = ANCHOR + timedelta(days=1)


def fixed_schedule(anchor, power_by_step) -> Schedule:
    """单笔交易、按步给定功率的调度方案"""
    grid = TimeGrid.for_day(anchor)
    power = np.zeros((1, grid.n_steps))
    for step, kw in power_by_step.items():
        power[0, step] = kw
    energy = np.concatenate([[0.0], np.cumsum(power[0]) * grid.dt_hours])[None, :]
    return Schedule(grid, power, energy, BauStrategy.unoptimized(), transaction_ids=(0,))


def at(hour, quarter=0) -> int:
    """样本日 hour:quarter*15 对应的步"""
    return 96 + hour * 4 + quarter


def constant_price(anchor, value) -> Signal:
    return Signal.constant(SignalKind.DAY_AHEAD_PRICE, TimeGrid.for_day(anchor), value)


class TestHourlyAvgCost:
    def test_single_hour(self):
        schedule = fixed_schedule(ANCHOR, {at(8): 11.0, at(8, 1): 11.0})
        result = hourly_avg_cost([schedule], constant_price(ANCHOR, 0.2))
        assert result['hour'].tolist() == [8]
        assert result['value'].iloc[0] == pytest.approx(0.2)

    def test_flat_price_is_flat(self):
        schedule = fixed_schedule(ANCHOR, {at(h): 7.4 for h in (0, 5, 17, 23)})
        result = hourly_avg_cost([schedule], constant_price(ANCHOR, 0.15))
        assert result['hour'].tolist() == [0, 5, 17, 23]
        np.testing.assert_allclose(result['value'], 0.15)

    def test_weighted_by_energy_across_days(self):
        first = fixed_schedule(ANCHOR, {at(18): 12.0})
        second = fixed_schedule(NEXT_DAY, {at(18): 4.0})
        prices = [constant_price(ANCHOR, 0.3), constant_price(NEXT_DAY, 0.1)]
        result = hourly_avg_cost([first, second], prices)
        assert result['value'].iloc[0] == pytest.approx((12 * 0.3 + 4 * 0.1) / 16)

    def test_steps_outside_sample_day_are_ignored(self):
        schedule = fixed_schedule(ANCHOR, {10: 11.0, 200: 11.0, at(12): 3.7})
        totals = hourly_totals([schedule], constant_price(ANCHOR, 0.2))
        assert totals['energy_kwh'].sum() == pytest.approx(3.7 * 0.25)
        assert hourly_avg_cost([schedule], constant_price(ANCHOR, 0.2))['hour'].tolist() == [12]

    def test_cost_follows_the_step_price(self):
        grid = TimeGrid.for_day(ANCHOR)
        values = np.full(grid.n_steps, 0.1)
        values[at(9, 2)] = 0.5
        price = Signal.from_values(SignalKind.DAY_AHEAD_PRICE, values)
        schedule = fixed_schedule(ANCHOR, {at(9): 10.0, at(9, 2): 10.0})
        assert hourly_avg_cost([schedule], price)['value'].iloc[0] == pytest.approx(0.3)

    def test_totals_match_schedule_cost(self):
        grid = TimeGrid.for_day(ANCHOR)
        rng = np.random.default_rng(5)
        price = Signal.from_values(SignalKind.DAY_AHEAD_PRICE, rng.uniform(-0.05, 0.4, grid.n_steps))
        schedule = fixed_schedule(ANCHOR, {t: float(rng.uniform(0, 11)) for t in range(96, 192, 3)})
        totals = hourly_totals([schedule], price)
        assert totals['cost'].sum() == pytest.approx(schedule_cost(schedule, price))

    def test_negative_average_is_kept(self):
        schedule = fixed_schedule(ANCHOR, {at(3): 11.0})
        result = hourly_avg_cost([schedule], constant_price(ANCHOR, -0.02))
        assert result['value'].iloc[0] == pytest.approx(-0.02)

    def test_v2g_hour_with_cancelling_flows_is_dropped(self):
        grid = TimeGrid.for_day(ANCHOR)
        values = np.full(grid.n_steps, 0.1)
        values[at(6, 1)] = 0.3
        price = Signal.from_values(SignalKind.DAY_AHEAD_PRICE, values)
        schedule = fixed_schedule(ANCHOR, {at(6): 11.0, at(6, 1): -11.0 + 4e-6, at(7): 11.0, at(7, 1): -7.4})
        totals = hourly_totals([schedule], price).set_index('hour')
        assert totals.loc[6, 'gross_kwh'] == pytest.approx(5.5, rel=1e-6)
        assert abs(totals.loc[6, 'energy_kwh']) < 1e-5
        result = hourly_avg_cost([schedule], price)
        assert result['hour'].tolist() == [7]
        assert result['value'].iloc[0] == pytest.approx(0.1)

    def test_signal_count_must_match(self):
        schedule = fixed_schedule(ANCHOR, {at(3): 11.0})
        with pytest.raises(ConfigError):
            hourly_avg_cost([schedule], [constant_price(ANCHOR, 0.1)] * 2)

    def test_signal_must_cover_grid(self):
        schedule = fixed_schedule(ANCHOR, {at(3): 11.0})
        short = Signal.from_values(SignalKind.DAY_AHEAD_PRICE, [0.1] * 96)
        with pytest.raises(ConfigError):
            hourly_avg_cost([schedule], short)


class TestCostIncrease:
    def test_identical_schedules(self):
        schedule = fixed_schedule(ANCHOR, {at(h): 5.0 for h in range(6)})
        delta = cost_increase_after_flex([schedule], [schedule], constant_price(ANCHOR, 0.2))
        assert delta['hour'].tolist() == list(range(6))
        np.testing.assert_allclose(delta['value'], 0.0)

    def test_shift_within_the_same_hour_keeps_average(self):
        grid = TimeGrid.for_day(ANCHOR)
        values = np.full(grid.n_steps, 0.1)
        values[at(18):at(19)] = 0.4
        price = Signal.from_values(SignalKind.DAY_AHEAD_PRICE, values)
        bau = fixed_schedule(ANCHOR, {at(18): 11.0, at(18, 1): 11.0})
        adjusted = fixed_schedule(ANCHOR, {at(18, 1): 11.0, at(18, 2): 11.0})
        delta = cost_increase_after_flex([bau], [adjusted], price)
        assert delta['value'].iloc[0] == pytest.approx(0.0)

    def test_unpaired_dates(self):
        bau = fixed_schedule(ANCHOR, {at(1): 1.0})
        adjusted = fixed_schedule(NEXT_DAY, {at(1): 1.0})
        with pytest.raises(PairingError) as excinfo:
            cost_increase_after_flex([bau], [adjusted], constant_price(ANCHOR, 0.1))
        assert excinfo.value.details["dates"] == ["2023-06-01", "2023-06-02"]

    def test_duplicate_dates(self):
        bau = fixed_schedule(ANCHOR, {at(1): 1.0})
        with pytest.raises(PairingError):
            cost_increase_after_flex([bau, bau], [bau], constant_price(ANCHOR, 0.1))


class TestDailyPeak:
    def test_peak_hour(self):
        power = {t: 11.0 for t in range(at(7), at(9))}
        power.update({at(18, 1): 22.0})
        result = daily_peak_by_hour([fixed_schedule(ANCHOR, power)])
        assert result.to_dict(orient='records') == [{'date': "2023-06-01", 'peak_kw': 22.0, 'hour': 18}]

    def test_tie_takes_earliest(self):
        result = daily_peak_by_hour([fixed_schedule(ANCHOR, {at(20): 7.4, at(6): 7.4})])
        assert result['hour'].iloc[0] == 6

    def test_rows_sorted_by_date(self):
        schedules = [fixed_schedule(NEXT_DAY, {at(1): 1.0}), fixed_schedule(ANCHOR, {at(2): 2.0})]
        result = daily_peak_by_hour(schedules)
        assert result['date'].tolist() == ["2023-06-01", "2023-06-02"]
        assert result['hour'].tolist() == [2, 1]

    def test_empty(self):
        with pytest.raises(ValidationError):
            daily_peak_by_hour([])
