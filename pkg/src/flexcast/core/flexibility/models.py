"""
Flexibility models - 拥塞管理产品请求与结果
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional

from ..grid.models import TimeGrid
from ..optimization.lp_core import SolverStatus
from ..scheduling.models import Schedule
from ...utils.exceptions import ConfigError, ValidationError
from ...utils.validators import hours_to_steps, parse_clock, validate_lead_time, validate_window


class FlexProduct(Enum):
    """拥塞管理产品"""
    REDISPATCH = "redispatch"
    CAPACITY_LIMITATION = "capacity_limitation"

    @classmethod
    def from_alias(cls, value: str) -> 'FlexProduct':
        """接受 caplimit 简写"""
        key = str(value).strip().lower()
        if key == "caplimit":
            return cls.CAPACITY_LIMITATION
        try:
            return cls(key)
        except ValueError:
            raise ConfigError(f"未知的灵活性产品: {value}", details={"value": value})

    @property
    def alias(self) -> str:
        return "caplimit" if self is FlexProduct.CAPACITY_LIMITATION else self.value


@dataclass(frozen=True)
class FlexRequest:
    """灵活性请求：窗口 [window_start_step, window_start_step + window_len_steps)"""
    product: FlexProduct
    window_start_step: int
    window_len_steps: int
    lead_time_hours: float
    v2g: bool = False

    def __post_init__(self):
        if self.window_len_steps <= 0:
            raise ValidationError("window_len", self.window_len_steps, "窗口长度必须大于0")
        if self.window_start_step < 0:
            raise ValidationError("window_start", self.window_start_step, "窗口起点不能为负")
        validate_lead_time(self.lead_time_hours)

    @classmethod
    def from_clock(cls, grid: TimeGrid, product: FlexProduct, window_start: str, window_len_h: float,
                   lead_time_h: float, v2g: bool = False) -> 'FlexRequest':
        """以样本日挂钟时间 HH:MM 指定窗口起点"""
        hh, mm = parse_clock(window_start)
        request = cls(
            product=product,
            window_start_step=grid.step_of_clock(hh, mm),
            window_len_steps=hours_to_steps(window_len_h, "window_len_h"),
            lead_time_hours=lead_time_h,
            v2g=v2g,
        )
        request.validate_for(grid)
        return request

    @property
    def lead_steps(self) -> int:
        return hours_to_steps(self.lead_time_hours, "lead_time_h")

    def window_steps(self) -> range:
        return range(self.window_start_step, self.window_start_step + self.window_len_steps)

    def validate_for(self, grid: TimeGrid) -> None:
        """窗口必须位于时域及样本日内"""
        day = grid.anchor_day_steps()
        validate_window(self.window_start_step, self.window_len_steps, day.start, day.stop)


@dataclass(frozen=True, eq=False)
class FlexResult:
    """灵活性求解结果"""
    product: FlexProduct
    magnitude_kw: float
    adjusted_schedule: Optional[Schedule]
    status: SolverStatus
    cost_delta: float
    emission_delta: float
    freeze_step: int = 0
    epsilon_ratio: float = float('nan')
    message: str = ""
