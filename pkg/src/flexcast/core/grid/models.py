"""
Grid data models - 时间网格与充电记录模型
"""

from dataclasses import dataclass, field, replace
from datetime import date, datetime, timedelta
from enum import Enum
from typing import List, Optional

import pandas as pd

from ...config.constants import (
    HORIZON_DAYS_AFTER,
    HORIZON_DAYS_BEFORE,
    MAX_CONNECTION_STEPS,
    STEP_HOURS,
    STEP_MINUTES,
    STEPS_PER_DAY,
)
from ...utils.exceptions import ValidationError

# 可行性判断的浮点容差
FEASIBILITY_TOLERANCE = 1e-9


class ChargerCategory(Enum):
    """充电站类别"""
    RESIDENTIAL = "residential"
    COMMERCIAL = "commercial"
    SHARED = "shared"


@dataclass(frozen=True)
class TimeGrid:
    """
    离散化的优化时域

    step 0 对应 anchor_date 零点之前 start_offset_steps 个步长。
    """
    anchor_date: date
    step_minutes: int = STEP_MINUTES
    start_offset_steps: int = HORIZON_DAYS_BEFORE * STEPS_PER_DAY
    n_steps: int = (HORIZON_DAYS_BEFORE + 1 + HORIZON_DAYS_AFTER) * STEPS_PER_DAY

    def __post_init__(self):
        if self.step_minutes != STEP_MINUTES:
            raise ValidationError("step_minutes", self.step_minutes, f"步长固定为 {STEP_MINUTES} 分钟")
        if self.n_steps <= 0:
            raise ValidationError("n_steps", self.n_steps, "时域步数必须大于0")
        if self.start_offset_steps < 0:
            raise ValidationError("start_offset_steps", self.start_offset_steps, "偏移不能为负")

    @classmethod
    def for_day(cls, anchor_date: date, days_before: int = HORIZON_DAYS_BEFORE,
                days_after: int = HORIZON_DAYS_AFTER) -> 'TimeGrid':
        """以样本日为锚点构建 [前days_before天, 后days_after天] 的时域"""
        return cls(
            anchor_date=anchor_date,
            start_offset_steps=days_before * STEPS_PER_DAY,
            n_steps=(days_before + 1 + days_after) * STEPS_PER_DAY,
        )

    @property
    def dt_hours(self) -> float:
        return STEP_HOURS

    @property
    def steps_per_day(self) -> int:
        return STEPS_PER_DAY

    @property
    def start(self) -> datetime:
        """时域起点（step 0 的开始时刻）"""
        midnight = datetime.combine(self.anchor_date, datetime.min.time())
        return midnight - timedelta(minutes=self.step_minutes * self.start_offset_steps)

    @property
    def end(self) -> datetime:
        """时域终点（不含）"""
        return self.step_start(self.n_steps)

    def step_start(self, step: int) -> datetime:
        return self.start + timedelta(minutes=self.step_minutes * step)

    def timestamps(self) -> pd.DatetimeIndex:
        """每个步长的起始时刻"""
        return pd.date_range(self.start, periods=self.n_steps, freq=f"{self.step_minutes}min")

    def contains(self, ts: datetime) -> bool:
        return self.start <= ts < self.end

    def round_to_step(self, ts: datetime) -> int:
        """四舍五入到最近的步长边界，恰好居中时取较晚的一步"""
        seconds = int((ts - self.start).total_seconds())
        step_seconds = self.step_minutes * 60
        return (seconds + step_seconds // 2) // step_seconds

    def step_of_clock(self, hh: int, mm: int, day_offset: int = 0) -> int:
        """样本日（或偏移day_offset天）某时刻对应的步长"""
        if mm % self.step_minutes != 0:
            raise ValidationError("clock", f"{hh:02d}:{mm:02d}", f"必须是 {self.step_minutes} 分钟的整数倍")
        return self.start_offset_steps + day_offset * self.steps_per_day + (hh * 60 + mm) // self.step_minutes

    def anchor_day_steps(self) -> range:
        """样本日在时域内的步长范围"""
        first = max(self.start_offset_steps, 0)
        last = min(self.start_offset_steps + self.steps_per_day, self.n_steps)
        return range(first, max(first, last))

    def hour_of_day(self, step: int) -> int:
        return self.step_start(step).hour

    def date_of(self, step: int) -> date:
        return self.step_start(step).date()


@dataclass(frozen=True)
class RawTransaction:
    """原始充电记录（秒级时间戳）"""
    station_id: str
    category: ChargerCategory
    arrival: datetime
    departure: datetime
    energy_kwh: float
    max_power_kw: float

    def __post_init__(self):
        if self.departure <= self.arrival:
            raise ValidationError("departure", self.departure.isoformat(), "离开时间必须晚于到达时间")
        if not self.energy_kwh >= 0:
            raise ValidationError("energy_kwh", self.energy_kwh, "充电量不能为负")
        if not self.max_power_kw > 0:
            raise ValidationError("max_power_kw", self.max_power_kw, "最大功率必须大于0")

    @property
    def connection_hours(self) -> float:
        return (self.departure - self.arrival).total_seconds() / 3600.0


@dataclass(frozen=True)
class Transaction:
    """离散化后的充电记录"""
    id: int
    category: ChargerCategory
    arrive_step: int
    depart_step: int
    energy_kwh: float
    p_max_kw: float
    p_min_kw: float = 0.0
    station_id: str = ""
    # 原始到达时刻，用于按日期抽样
    arrival: Optional[datetime] = field(default=None, compare=False)

    def __post_init__(self):
        if self.depart_step <= self.arrive_step:
            raise ValidationError("depart_step", self.depart_step, "离开步必须晚于到达步")
        if self.duration_steps > MAX_CONNECTION_STEPS:
            raise ValidationError("depart_step", self.depart_step, f"连接时长超过 {MAX_CONNECTION_STEPS} 步")
        if self.p_max_kw <= 0:
            raise ValidationError("p_max_kw", self.p_max_kw, "最大功率必须大于0")
        if self.p_min_kw not in (0.0, -self.p_max_kw):
            raise ValidationError("p_min_kw", self.p_min_kw, "最小功率只能为0或-p_max")
        if self.energy_kwh < 0:
            raise ValidationError("energy_kwh", self.energy_kwh, "充电量不能为负")
        if self.max_deliverable_kwh + FEASIBILITY_TOLERANCE < self.energy_kwh:
            raise ValidationError("energy_kwh", self.energy_kwh, "连接时长内无法充满需求电量")

    @property
    def duration_steps(self) -> int:
        return self.depart_step - self.arrive_step

    @property
    def max_deliverable_kwh(self) -> float:
        return self.duration_steps * STEP_HOURS * self.p_max_kw

    @property
    def is_v2g(self) -> bool:
        return self.p_min_kw < 0

    def connected_steps(self) -> range:
        return range(self.arrive_step, self.depart_step)

    def with_v2g(self, v2g: bool) -> 'Transaction':
        return replace(self, p_min_kw=-self.p_max_kw if v2g else 0.0)


@dataclass(frozen=True)
class Excluded:
    """离散化后不可行而被剔除的记录"""
    raw: RawTransaction
    reason: str
    arrive_step: int
    depart_step: int


@dataclass
class DiscretizationReport:
    """批量离散化结果"""
    transactions: List[Transaction] = field(default_factory=list)
    excluded: List[Excluded] = field(default_factory=list)
    out_of_horizon: int = 0

    @property
    def n_considered(self) -> int:
        return len(self.transactions) + len(self.excluded)

    @property
    def exclusion_rate(self) -> float:
        """剔除比例（只统计落在时域内的记录）"""
        return len(self.excluded) / self.n_considered if self.n_considered else 0.0
