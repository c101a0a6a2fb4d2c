"""
Signal models - 日前电价与边际排放因子序列
"""

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from ..grid.models import TimeGrid
from ...config.constants import SIGNAL_UNITS
from ...utils.exceptions import ValidationError


class SignalKind(Enum):
    """信号类型"""
    DAY_AHEAD_PRICE = "day_ahead_price"
    MEF = "mef"

    @property
    def unit(self) -> str:
        return SIGNAL_UNITS[self.value]


@dataclass(frozen=True, eq=False)
class Signal:
    """对齐到时间网格的逐步信号，只读"""
    kind: SignalKind
    unit: str
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 1:
            raise ValidationError("values", values.shape, "信号必须是一维序列")
        if not np.all(np.isfinite(values)):
            raise ValidationError("values", self.kind.value, "信号包含缺失或非有限值")
        if self.kind is SignalKind.MEF and np.any(values < 0):
            raise ValidationError("values", self.kind.value, "边际排放因子不能为负")
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    @classmethod
    def from_values(cls, kind: SignalKind, values: Sequence[float]) -> 'Signal':
        return cls(kind=kind, unit=kind.unit, values=np.asarray(values, dtype=float))

    @classmethod
    def constant(cls, kind: SignalKind, grid: TimeGrid, value: float) -> 'Signal':
        return cls.from_values(kind, np.full(grid.n_steps, value, dtype=float))

    @property
    def n_steps(self) -> int:
        return len(self.values)

    def covers(self, grid: TimeGrid) -> bool:
        return self.n_steps == grid.n_steps
