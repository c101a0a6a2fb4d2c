"""
Metrics - 小时平均成本与日峰值统计

只统计样本日内的步长；成本归属到能量实际流动的小时。
"""

from typing import Dict, List, Sequence, Union

import numpy as np
import pandas as pd

from ..scheduling.models import Schedule
from ..signals.models import Signal
from ...utils.exceptions import ConfigError, PairingError, ValidationError
from ...utils.logger import log_debug

SignalArg = Union[Signal, Sequence[Signal]]

# 净能量低于该值的小时视为无数据
_EMPTY_HOUR_KWH = 1e-9
# V2G小时充放电相抵：净能量相对总流量低于该比例视为无数据
_NET_TO_GROSS_MIN = 1e-6


def _signals_for(schedules: Sequence[Schedule], signal: SignalArg) -> List[Signal]:
    if isinstance(signal, Signal):
        return [signal] * len(schedules)
    signals = list(signal)
    if len(signals) != len(schedules):
        raise ConfigError("信号数量与调度方案数量不一致",
                          details={"signals": len(signals), "schedules": len(schedules)})
    return signals


def hourly_totals(schedules: Sequence[Schedule], signal: SignalArg) -> pd.DataFrame:
    """
    每个小时的总成本与总净能量

    Returns:
        24行 DataFrame: hour, cost, energy_kwh（净）, gross_kwh（充放电绝对值之和）
    """
    cost = np.zeros(24)
    energy = np.zeros(24)
    gross = np.zeros(24)
    for schedule, sig in zip(schedules, _signals_for(schedules, signal)):
        grid = schedule.grid
        if not sig.covers(grid):
            raise ConfigError("信号未覆盖调度方案的时域", details={"date": str(grid.anchor_date)})
        steps = np.asarray(grid.anchor_day_steps())
        if len(steps) == 0:
            continue
        step_energy = schedule.aggregate()[steps] * grid.dt_hours
        hours = (steps - grid.start_offset_steps) * grid.step_minutes // 60
        energy += np.bincount(hours, weights=step_energy, minlength=24)
        gross += np.bincount(hours, weights=np.abs(step_energy), minlength=24)
        cost += np.bincount(hours, weights=step_energy * sig.values[steps], minlength=24)
    return pd.DataFrame({'hour': np.arange(24), 'cost': cost, 'energy_kwh': energy, 'gross_kwh': gross})


def hourly_avg_cost(schedules: Sequence[Schedule], signal: SignalArg) -> pd.DataFrame:
    """
    按小时平均的单位能量成本 Σcost / ΣkWh（跨所有日期）

    无能量流动或V2G充放电几乎相抵的小时不出现在结果中；负价格导致的负值保留。

    Returns:
        DataFrame: hour, value
    """
    totals = hourly_totals(schedules, signal)
    net = np.abs(totals['energy_kwh'])
    populated = totals[(net > _EMPTY_HOUR_KWH) & (net > _NET_TO_GROSS_MIN * totals['gross_kwh'])]
    result = pd.DataFrame({
        'hour': populated['hour'].to_numpy(),
        'value': (populated['cost'] / populated['energy_kwh']).to_numpy(),
    })
    log_debug(f"小时平均成本: {len(schedules)} 个方案, {len(result)} 个有效小时")
    return result


def cost_increase_after_flex(bau_schedules: Sequence[Schedule], adjusted_schedules: Sequence[Schedule],
                             signal: SignalArg) -> pd.DataFrame:
    """
    交付灵活性后的小时平均成本变化（调整后 - BAU），按样本日配对

    signal 为列表时与 bau_schedules 一一对应。
    """
    bau_by_date: Dict = {s.anchor_date: s for s in bau_schedules}
    adjusted_by_date: Dict = {s.anchor_date: s for s in adjusted_schedules}
    unpaired = sorted(set(bau_by_date) ^ set(adjusted_by_date))
    if unpaired or len(bau_by_date) != len(bau_schedules) or len(adjusted_by_date) != len(adjusted_schedules):
        missing = [d.isoformat() for d in unpaired]
        if not missing:
            missing = ["duplicate dates"]
        raise PairingError(missing)

    signals = _signals_for(bau_schedules, signal)
    signal_by_date = {s.anchor_date: sig for s, sig in zip(bau_schedules, signals)}
    dates = sorted(bau_by_date)

    before = hourly_avg_cost([bau_by_date[d] for d in dates], [signal_by_date[d] for d in dates])
    after = hourly_avg_cost([adjusted_by_date[d] for d in dates], [signal_by_date[d] for d in dates])
    merged = before.merge(after, on='hour', suffixes=('_bau', '_adjusted'))
    return pd.DataFrame({
        'hour': merged['hour'].to_numpy(),
        'value': (merged['value_adjusted'] - merged['value_bau']).to_numpy(),
    })


def daily_peak_by_hour(schedules: Sequence[Schedule]) -> pd.DataFrame:
    """
    每个样本日的总功率峰值及其所在小时（并列取最早的步长）

    Returns:
        DataFrame: date, peak_kw, hour
    """
    if not schedules:
        raise ValidationError("schedules", 0, "调度方案列表为空")

    records = []
    for schedule in schedules:
        grid = schedule.grid
        steps = np.asarray(grid.anchor_day_steps())
        profile = schedule.aggregate()[steps]
        best = int(np.argmax(profile))
        records.append({
            'date': grid.anchor_date.isoformat(),
            'peak_kw': float(profile[best]),
            'hour': grid.hour_of_day(int(steps[best])),
        })
    return pd.DataFrame(records, columns=['date', 'peak_kw', 'hour']).sort_values(
        'date', kind='mergesort').reset_index(drop=True)
