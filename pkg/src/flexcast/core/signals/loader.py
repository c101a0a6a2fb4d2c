"""
Signal loader - 读取并对齐信号CSV
"""

from typing import Dict, List, Union

import numpy as np
import pandas as pd

from .models import Signal, SignalKind
from ..grid.ingest import CsvSource, _open_text
from ..grid.models import TimeGrid
from ...utils.exceptions import DuplicateTimestampError, MissingIntervalError, SignalError
from ...utils.logger import log_error, log_info

_HOURLY = pd.Timedelta(hours=1)
_QUARTER = pd.Timedelta(minutes=15)


def _collapse_gaps(missing: pd.DatetimeIndex, freq: pd.Timedelta) -> List[Dict[str, str]]:
    """将缺失时刻合并为连续区间 [start, end)"""
    gaps: List[Dict[str, str]] = []
    if len(missing) == 0:
        return gaps
    start = prev = missing[0]
    for ts in missing[1:]:
        if ts - prev != freq:
            gaps.append({"start": start.isoformat(), "end": (prev + freq).isoformat()})
            start = ts
        prev = ts
    gaps.append({"start": start.isoformat(), "end": (prev + freq).isoformat()})
    return gaps


class SignalSeries:
    """完整的原始信号序列（例如一整年），按网格切片"""

    def __init__(self, kind: SignalKind, series: pd.Series, resolution: pd.Timedelta):
        self.kind = kind
        self.series = series
        self.resolution = resolution

    @classmethod
    def from_csv(cls, source: CsvSource, kind: SignalKind) -> 'SignalSeries':
        """读取 timestamp,value 两列的CSV"""
        stream = _open_text(source)
        try:
            frame = pd.read_csv(stream)
        except pd.errors.EmptyDataError:
            raise SignalError(f"信号 {kind.value} 文件为空", error_code="SIGNAL_FORMAT")
        finally:
            if isinstance(source, str):
                stream.close()

        if not {'timestamp', 'value'}.issubset(frame.columns):
            raise SignalError(
                f"信号 {kind.value} 必须包含列 timestamp,value",
                error_code="SIGNAL_FORMAT",
                details={"columns": list(frame.columns)}
            )

        try:
            stamps = pd.to_datetime(frame['timestamp'], format='ISO8601')
        except (ValueError, TypeError) as e:
            raise SignalError(f"信号 {kind.value} 时间戳无法解析: {e}", error_code="SIGNAL_FORMAT")
        if stamps.dt.tz is not None:
            # 按本地挂钟时间解释
            stamps = stamps.dt.tz_localize(None)

        values = pd.to_numeric(frame['value'], errors='coerce')
        series = pd.Series(values.to_numpy(dtype=float), index=pd.DatetimeIndex(stamps))

        duplicated = series.index[series.index.duplicated()]
        if len(duplicated) > 0:
            stamps_txt = sorted({ts.isoformat() for ts in duplicated})
            log_error(f"信号 {kind.value} 存在 {len(stamps_txt)} 个重复时间戳")
            raise DuplicateTimestampError(kind.value, stamps_txt)

        # 缺失值视为覆盖空洞，在切片时报告
        series = series.dropna().sort_index()
        resolution = cls._infer_resolution(series, kind)
        log_info(f"读取信号 {kind.value}: {len(series)} 条，分辨率 {resolution}")
        return cls(kind, series, resolution)

    @staticmethod
    def _infer_resolution(series: pd.Series, kind: SignalKind) -> pd.Timedelta:
        if len(series) < 2:
            # 单点序列按时刻是否整点判断
            if len(series) == 1 and series.index[0].minute != 0:
                return _QUARTER
            return _HOURLY
        step = pd.Series(series.index).diff().dropna().min()
        if step == _QUARTER:
            return _QUARTER
        if step >= _HOURLY and all(ts.minute == 0 for ts in series.index[:96]):
            return _HOURLY
        raise SignalError(
            f"信号 {kind.value} 分辨率不受支持: {step}",
            error_code="SIGNAL_RESOLUTION",
            details={"step": str(step)}
        )

    def for_grid(self, grid: TimeGrid) -> Signal:
        """对齐到网格：小时值广播到4个15分钟步，15分钟值一一对应"""
        stamps = grid.timestamps()
        if self.resolution == _HOURLY:
            required = stamps.floor('h')
            keys = pd.DatetimeIndex(required.unique())
        else:
            required = stamps
            keys = stamps

        aligned = self.series.reindex(keys)
        missing = keys[aligned.isna().to_numpy()]
        if len(missing) > 0:
            gaps = _collapse_gaps(missing, self.resolution)
            log_error(f"信号 {self.kind.value} 在 {grid.anchor_date} 时域内缺少 {len(gaps)} 个区间")
            raise MissingIntervalError(self.kind.value, gaps)

        values = aligned.reindex(required).to_numpy(dtype=float)
        return Signal(kind=self.kind, unit=self.kind.unit, values=np.asarray(values))


def load_signal(source: Union[CsvSource, SignalSeries], kind: SignalKind, grid: TimeGrid) -> Signal:
    """读取信号并对齐到网格"""
    series = source if isinstance(source, SignalSeries) else SignalSeries.from_csv(source, kind)
    if series.kind is not kind:
        raise SignalError(
            f"信号类型不匹配: {series.kind.value} != {kind.value}",
            error_code="SIGNAL_KIND_MISMATCH"
        )
    return series.for_grid(grid)
