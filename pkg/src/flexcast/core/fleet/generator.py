"""
Fleet generator - 可复现的合成充电记录

每个 (类别, 充电站, 日期) 使用独立派生的随机数流，结果只取决于种子。
"""

from datetime import datetime, timedelta
from typing import Iterable, List, Tuple

import numpy as np
from scipy.special import ndtr, ndtri

from .models import FleetSpec, LogNormalParams
from ..grid.models import ChargerCategory, RawTransaction
from ...config.constants import STEP_HOURS
from ...utils.logger import log_debug, log_info

# 每个充电站两个充电口
CONNECTORS_PER_STATION = 2

# 充电量相对可交付电量的余量
_ENERGY_MARGIN = 0.95

_CATEGORY_STREAM = {
    ChargerCategory.RESIDENTIAL: 0,
    ChargerCategory.COMMERCIAL: 1,
    ChargerCategory.SHARED: 2,
}


def truncated_lognormal(rng: np.random.Generator, params: LogNormalParams, size: int) -> np.ndarray:
    """逆CDF采样截断对数正态，落在 [min, max]"""
    if size == 0:
        return np.zeros(0)
    mu = np.log(params.median)
    if params.sigma == 0:
        return np.full(size, np.clip(params.median, params.min, params.max))

    low = ndtr((np.log(params.min) - mu) / params.sigma) if params.min > 0 else 0.0
    high = ndtr((np.log(params.max) - mu) / params.sigma)
    u = rng.uniform(low, high, size=size)
    samples = np.exp(mu + params.sigma * ndtri(u))
    return np.clip(samples, params.min, params.max)


def _station_day(spec: FleetSpec, station: int, day) -> List[Tuple[datetime, datetime, float, float]]:
    """单个充电站单日的候选会话 (到达, 离开, 电量, 功率)"""
    rng = np.random.default_rng([spec.seed, _CATEGORY_STREAM[spec.category], station, day.toordinal()])
    n = int(rng.poisson(spec.sessions_per_station_day))
    if n == 0:
        return []

    weights = np.asarray(spec.arrival_profile, dtype=float)
    hours = rng.choice(24, size=n, p=weights / weights.sum())
    seconds = rng.integers(0, 3600, size=n)
    durations = truncated_lognormal(rng, spec.connection_hours, n)
    energies = truncated_lognormal(rng, spec.energy_kwh, n)
    p_weights = np.asarray(spec.p_max_weights, dtype=float)
    powers = rng.choice(np.asarray(spec.p_max_kw, dtype=float), size=n, p=p_weights / p_weights.sum())

    midnight = datetime.combine(day, datetime.min.time())
    sessions = []
    for hour, second, duration, energy, power in zip(hours, seconds, durations, energies, powers):
        duration = float(max(duration, 0.5))
        arrival = midnight + timedelta(seconds=int(hour) * 3600 + int(second))
        departure = arrival + timedelta(seconds=int(round(duration * 3600)))
        # 离散化后最坏损失一个步长，留出余量保证可行
        cap = float(power) * (duration - STEP_HOURS) * _ENERGY_MARGIN
        energy_kwh = np.floor(min(float(energy), cap) * 1000.0) / 1000.0
        sessions.append((arrival, departure, float(energy_kwh), float(power)))
    return sessions


def _assign_connectors(sessions: Iterable[Tuple[datetime, datetime, float, float]]) -> List[Tuple]:
    """两个充电口均被占用时丢弃新会话"""
    free_at = [datetime.min] * CONNECTORS_PER_STATION
    accepted = []
    for session in sorted(sessions, key=lambda s: (s[0], s[1])):
        arrival, departure = session[0], session[1]
        connector = min(range(CONNECTORS_PER_STATION), key=lambda c: (free_at[c], c))
        if free_at[connector] <= arrival:
            free_at[connector] = departure
            accepted.append(session)
    return accepted


def generate(spec: FleetSpec) -> List[RawTransaction]:
    """
    生成单一类别的合成充电记录

    Returns:
        按 (到达时间, 充电站编号) 排序的原始记录
    """
    days = spec.days()
    raws: List[RawTransaction] = []
    dropped = 0
    for station in range(spec.n_stations):
        station_id = f"{spec.station_prefix}-{spec.station_offset + station + 1:04d}"
        candidates = [s for day in days for s in _station_day(spec, station, day)]
        accepted = _assign_connectors(candidates)
        dropped += len(candidates) - len(accepted)
        raws.extend(
            RawTransaction(
                station_id=station_id,
                category=spec.category,
                arrival=arrival,
                departure=departure,
                energy_kwh=energy,
                max_power_kw=power,
            )
            for arrival, departure, energy, power in accepted
        )

    raws.sort(key=lambda r: (r.arrival, r.station_id))
    log_debug(f"{spec.category.value}: 充电口占满丢弃 {dropped} 个会话")
    log_info(f"合成 {spec.category.value} 车队: {spec.n_stations} 个充电站, {len(days)} 天, {len(raws)} 条记录")
    return raws


def generate_many(specs: Iterable[FleetSpec]) -> List[RawTransaction]:
    """合并多个类别的车队"""
    raws = [raw for spec in specs for raw in generate(spec)]
    raws.sort(key=lambda r: (r.arrival, r.station_id))
    return raws
