"""
共享测试夹具
"""

from datetime import date, datetime, timedelta
from pathlib import Path
from typing import Callable, List, Optional

import numpy as np
import pandas as pd
import pytest

from flexcast.config import AppConfig, set_config
from flexcast.core.grid import ChargerCategory, RawTransaction, TimeGrid, Transaction
from flexcast.core.grid.ingest import write_transactions
from flexcast.core.signals import Signal, SignalKind

ANCHOR = date(2023, 6, 1)


@pytest.fixture(autouse=True)
def fresh_config():
    """每个测试使用默认配置"""
    set_config(AppConfig())
    yield
    set_config(AppConfig())


def small_grid(n_steps: int = 4) -> TimeGrid:
    """从样本日零点开始的短时域"""
    return TimeGrid(ANCHOR, start_offset_steps=0, n_steps=n_steps)


def make_tx(arrive: int, depart: int, energy: float, p_max: float = 11.0, v2g: bool = False,
            tx_id: int = 0) -> Transaction:
    return Transaction(
        id=tx_id,
        category=ChargerCategory.RESIDENTIAL,
        arrive_step=arrive,
        depart_step=depart,
        energy_kwh=energy,
        p_max_kw=p_max,
        p_min_kw=-p_max if v2g else 0.0,
        station_id=f"RES-{tx_id + 1:04d}",
    )


def random_fleet(rng: np.random.Generator, grid: TimeGrid, n: int, v2g: bool = False,
                 max_duration: int = 32) -> List[Transaction]:
    """在 grid 内随机生成可行交易"""
    transactions = []
    for i in range(n):
        duration = int(rng.integers(2, max_duration + 1))
        arrive = int(rng.integers(0, grid.n_steps - duration + 1))
        p_max = float(rng.choice([3.7, 7.4, 11.0, 22.0]))
        capacity = duration * grid.dt_hours * p_max
        energy = float(np.floor(rng.uniform(0.05, 0.95) * capacity * 1000.0) / 1000.0)
        transactions.append(make_tx(arrive, arrive + duration, energy, p_max, v2g, tx_id=i))
    return transactions


def price_signal(values) -> Signal:
    return Signal.from_values(SignalKind.DAY_AHEAD_PRICE, values)


def mef_signal(values) -> Signal:
    return Signal.from_values(SignalKind.MEF, values)


def daily_shape(grid: TimeGrid, base: float, amplitude: float, peak_hour: int = 18) -> np.ndarray:
    """以 peak_hour 为峰值的日内余弦曲线"""
    hours = np.array([grid.step_start(t).hour + grid.step_start(t).minute / 60.0
                      for t in range(grid.n_steps)])
    return base + amplitude * np.cos((hours - peak_hour) / 24.0 * 2 * np.pi)


def write_hourly_signal(path: Path, start: datetime, hours: int,
                        value: Callable[[datetime], float]) -> Path:
    stamps = [start + timedelta(hours=h) for h in range(hours)]
    pd.DataFrame({
        'timestamp': [ts.isoformat() for ts in stamps],
        'value': [value(ts) for ts in stamps],
    }).to_csv(path, index=False)
    return path


def raw_session(station: str, arrival: str, departure: str, energy: float, power: float = 11.0,
                category: ChargerCategory = ChargerCategory.RESIDENTIAL) -> RawTransaction:
    return RawTransaction(
        station_id=station,
        category=category,
        arrival=datetime.fromisoformat(arrival),
        departure=datetime.fromisoformat(departure),
        energy_kwh=energy,
        max_power_kw=power,
    )


def sample_sessions(days: List[date]) -> List[RawTransaction]:
    """每天几条住宅/商业会话，保证离散化后可行"""
    sessions = []
    for day in days:
        d = day.isoformat()
        n = day + timedelta(days=1)
        sessions += [
            raw_session("RES-0001", f"{d}T17:40:00", f"{n.isoformat()}T07:10:00", 12.5, 11.0),
            raw_session("RES-0002", f"{d}T18:05:00", f"{d}T23:50:00", 9.0, 7.4),
            raw_session("RES-0003", f"{d}T19:20:00", f"{n.isoformat()}T06:30:00", 20.0, 11.0),
            raw_session("COM-0001", f"{d}T08:10:00", f"{d}T16:45:00", 15.0, 11.0, ChargerCategory.COMMERCIAL),
            raw_session("COM-0002", f"{d}T09:00:00", f"{d}T12:00:00", 6.0, 22.0, ChargerCategory.COMMERCIAL),
        ]
    return sorted(sessions, key=lambda r: (r.arrival, r.station_id))


def price_value(ts: datetime) -> float:
    # 傍晚高价，夜间低价
    return round(0.10 + 0.15 * np.cos((ts.hour - 19) / 24.0 * 2 * np.pi) + 0.01 * (ts.day % 3), 4)


def mef_value(ts: datetime) -> float:
    return round(0.35 + 0.1 * np.cos((ts.hour - 13) / 24.0 * 2 * np.pi), 4)


@pytest.fixture
def grid4() -> TimeGrid:
    return small_grid(4)


@pytest.fixture
def day_inputs(tmp_path) -> Callable[..., dict]:
    """写出若干天的充电记录与信号CSV，返回路径"""

    def build(days: Optional[List[date]] = None) -> dict:
        days = days or [ANCHOR]
        transactions = tmp_path / "transactions.csv"
        write_transactions(sample_sessions(days), str(transactions))
        start = datetime.combine(min(days) - timedelta(days=1), datetime.min.time())
        hours = ((max(days) - min(days)).days + 3) * 24
        return {
            'transactions': transactions,
            'price': write_hourly_signal(tmp_path / "price.csv", start, hours, price_value),
            'mef': write_hourly_signal(tmp_path / "mef.csv", start, hours, mef_value),
            'days': days,
        }

    return build
