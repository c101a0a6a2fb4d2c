"""
Scheduling models - BAU策略与调度方案
"""

from dataclasses import dataclass
from enum import Enum
from typing import IO, Optional, Tuple, Union

import numpy as np
import pandas as pd

from ..grid.models import TimeGrid
from ..signals.models import Signal, SignalKind
from ...config.constants import SCHEDULE_COLUMNS
from ...utils.exceptions import ConfigError


class BauStrategyKind(Enum):
    """BAU调度策略"""
    COST_MIN = "cost_min"
    MEF_MIN = "mef_min"
    UNOPTIMIZED = "unoptimized"

    @classmethod
    def from_alias(cls, value: str) -> 'BauStrategyKind':
        """接受 cost/mef/unopt 简写"""
        aliases = {
            'cost': cls.COST_MIN,
            'mef': cls.MEF_MIN,
            'unopt': cls.UNOPTIMIZED,
        }
        key = str(value).strip().lower()
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            raise ConfigError(f"未知的BAU策略: {value}", details={"value": value})

    @property
    def alias(self) -> str:
        return {'cost_min': 'cost', 'mef_min': 'mef', 'unoptimized': 'unopt'}[self.value]

    @property
    def signal_kind(self) -> Optional[SignalKind]:
        return {
            BauStrategyKind.COST_MIN: SignalKind.DAY_AHEAD_PRICE,
            BauStrategyKind.MEF_MIN: SignalKind.MEF,
        }.get(self)


@dataclass(frozen=True)
class BauStrategy:
    """BAU策略及其引用的信号"""
    kind: BauStrategyKind
    signal: Optional[Signal] = None

    def __post_init__(self):
        required = self.kind.signal_kind
        if required is None:
            if self.signal is not None:
                raise ConfigError("unoptimized 策略不使用信号", details={"strategy": self.kind.value})
            return
        if self.signal is None:
            raise ConfigError(
                f"{self.kind.value} 策略缺少 {required.value} 信号",
                details={"strategy": self.kind.value, "signal": required.value}
            )
        if self.signal.kind is not required:
            raise ConfigError(
                f"{self.kind.value} 策略需要 {required.value} 信号，实际为 {self.signal.kind.value}",
                details={"strategy": self.kind.value, "signal": self.signal.kind.value}
            )

    @classmethod
    def cost_min(cls, price: Signal) -> 'BauStrategy':
        return cls(BauStrategyKind.COST_MIN, price)

    @classmethod
    def mef_min(cls, mef: Signal) -> 'BauStrategy':
        return cls(BauStrategyKind.MEF_MIN, mef)

    @classmethod
    def unoptimized(cls) -> 'BauStrategy':
        return cls(BauStrategyKind.UNOPTIMIZED)

    @classmethod
    def from_kind(cls, kind: BauStrategyKind, price: Optional[Signal] = None,
                  mef: Optional[Signal] = None) -> 'BauStrategy':
        if kind is BauStrategyKind.COST_MIN:
            return cls(kind, price)
        if kind is BauStrategyKind.MEF_MIN:
            return cls(kind, mef)
        return cls(kind)


@dataclass(frozen=True, eq=False)
class Schedule:
    """
    调度方案

    power_kw: [交易 × 步]；energy_kwh: [交易 × (步+1)]，最后一列等于需求电量 ē
    """
    grid: TimeGrid
    power_kw: np.ndarray
    energy_kwh: np.ndarray
    strategy: BauStrategy
    transaction_ids: Tuple[int, ...] = ()
    v2g: bool = False
    objective_value: float = 0.0

    @classmethod
    def empty(cls, grid: TimeGrid, strategy: BauStrategy, v2g: bool = False) -> 'Schedule':
        return cls(
            grid=grid,
            power_kw=np.zeros((0, grid.n_steps)),
            energy_kwh=np.zeros((0, grid.n_steps + 1)),
            strategy=strategy,
            v2g=v2g,
        )

    @property
    def n_transactions(self) -> int:
        return self.power_kw.shape[0]

    @property
    def demand_kwh(self) -> np.ndarray:
        return self.energy_kwh[:, -1] if self.n_transactions else np.zeros(0)

    @property
    def anchor_date(self):
        return self.grid.anchor_date

    def aggregate(self) -> np.ndarray:
        return self.power_kw.sum(axis=0) if self.n_transactions else np.zeros(self.grid.n_steps)

    def to_frame(self, tolerance: float = 1e-9) -> pd.DataFrame:
        """长表 transaction_id,step,power_kw；只保留非零功率"""
        if self.n_transactions == 0:
            return pd.DataFrame(columns=SCHEDULE_COLUMNS)
        rows, steps = np.nonzero(np.abs(self.power_kw) > tolerance)
        ids = np.asarray(self.transaction_ids if self.transaction_ids else range(self.n_transactions))
        return pd.DataFrame({
            'transaction_id': ids[rows],
            'step': steps,
            'power_kw': self.power_kw[rows, steps],
        }, columns=SCHEDULE_COLUMNS)

    def to_csv(self, dest: Union[str, IO[str]], float_format: str = "%.6f") -> None:
        self.to_frame().to_csv(dest, index=False, float_format=float_format, lineterminator='\n')
