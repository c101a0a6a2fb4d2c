"""
Sweep config - 批量实验配置（TOML）
"""

import hashlib
import json
from dataclasses import dataclass, field
from datetime import date, datetime, timedelta
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import toml

from ..flexibility.models import FlexProduct
from ..grid.models import ChargerCategory
from ..scheduling.models import BauStrategyKind
from ...config import get_config
from ...config.constants import STEP_MINUTES
from ...utils.exceptions import ConfigError, FlexcastError
from ...utils.validators import hours_to_steps, parse_clock, validate_lead_time

# 不按类别筛选
ALL_CATEGORIES = "all"


def _as_date(value: Any) -> date:
    if isinstance(value, datetime):
        return value.date()
    if isinstance(value, date):
        return value
    try:
        return date.fromisoformat(str(value))
    except ValueError:
        raise ConfigError(f"无法解析日期: {value}", details={"value": str(value)})


def _as_list(value: Any) -> List[Any]:
    return list(value) if isinstance(value, (list, tuple)) else [value]


@dataclass
class SweepConfig:
    """批量实验配置：日期 × 类别 × BAU策略 × 产品 × 提前量 × 窗口 × V2G"""
    dates: List[date]
    categories: List[str] = field(default_factory=lambda: [ALL_CATEGORIES])
    strategies: List[BauStrategyKind] = field(default_factory=lambda: list(BauStrategyKind))
    products: List[FlexProduct] = field(default_factory=lambda: list(FlexProduct))
    lead_times_h: List[float] = field(default_factory=lambda: [1.0, 23.0])
    window_starts: List[str] = field(default_factory=lambda: ["17:00"])
    window_lens_h: List[float] = field(default_factory=lambda: [1.0])
    v2g: List[bool] = field(default_factory=lambda: [False])
    transactions_path: Optional[str] = None
    fleet_path: Optional[str] = None
    price_path: str = ""
    mef_path: str = ""
    output_path: str = ""
    parallelism: int = 1
    executor: str = "process"

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        """窗口必须落在样本日内，提前量必须是步长整数倍"""
        if not self.dates:
            raise ConfigError("dates 不能为空")
        for name in ('categories', 'strategies', 'products', 'lead_times_h', 'window_starts',
                     'window_lens_h', 'v2g'):
            if not getattr(self, name):
                raise ConfigError(f"{name} 不能为空", details={"field": name})

        valid_categories = {c.value for c in ChargerCategory} | {ALL_CATEGORIES}
        for category in self.categories:
            if category not in valid_categories:
                raise ConfigError(f"未知的充电站类别: {category}", details={"category": category})

        try:
            for lead in self.lead_times_h:
                validate_lead_time(lead)
            for start in self.window_starts:
                hh, mm = parse_clock(start)
                for length in self.window_lens_h:
                    steps = hours_to_steps(length, "window_len_h")
                    if steps <= 0:
                        raise ConfigError(f"窗口长度必须大于0: {length}")
                    if (hh * 60 + mm) // STEP_MINUTES + steps > 24 * 60 // STEP_MINUTES:
                        raise ConfigError(
                            f"窗口 {start} + {length}h 超出样本日",
                            details={"window_start": start, "window_len_h": length}
                        )
        except ConfigError:
            raise
        except FlexcastError as e:
            raise ConfigError(e.message, details=e.details)

        if bool(self.transactions_path) == bool(self.fleet_path):
            raise ConfigError("transactions 与 fleet 必须且只能指定一个")
        if not self.price_path or not self.mef_path:
            raise ConfigError("必须指定 price 与 mef 信号文件")
        if self.parallelism < 1:
            raise ConfigError(f"parallelism 必须至少为1: {self.parallelism}")
        if self.executor not in ("process", "thread"):
            raise ConfigError(f"未知的执行器类型: {self.executor}")

    @classmethod
    def from_dict(cls, data: Dict[str, Any], base_dir: Union[str, Path] = ".") -> 'SweepConfig':
        """
        从字典构建；[sweep] 为实验维度，[inputs] 为输入文件

        相对路径以配置文件所在目录为基准。
        """
        sweep = dict(data.get('sweep', {}))
        inputs = dict(data.get('inputs', {}))
        base = Path(base_dir)
        app = get_config()

        def resolve(value: Optional[str]) -> Optional[str]:
            if not value:
                return None
            path = Path(value)
            return str(path if path.is_absolute() else base / path)

        if 'dates' in sweep:
            dates = [_as_date(d) for d in _as_list(sweep['dates'])]
        elif 'start_date' in sweep:
            start = _as_date(sweep['start_date'])
            end = _as_date(sweep.get('end_date', sweep['start_date']))
            if end < start:
                raise ConfigError("end_date 早于 start_date")
            dates = [start + timedelta(days=i) for i in range((end - start).days + 1)]
        else:
            raise ConfigError("[sweep] 需要 dates 或 start_date/end_date")

        try:
            strategies = [BauStrategyKind.from_alias(s) for s in _as_list(sweep.get('strategies', ['cost_min', 'mef_min', 'unoptimized']))]
            products = [FlexProduct.from_alias(p) for p in _as_list(sweep.get('products', ['redispatch', 'capacity_limitation']))]
            config = cls(
                dates=dates,
                categories=[str(c).lower() for c in _as_list(sweep.get('categories', [ALL_CATEGORIES]))],
                strategies=strategies,
                products=products,
                lead_times_h=[float(v) for v in _as_list(sweep.get('lead_times_h', [1.0, 23.0]))],
                window_starts=[str(v) for v in _as_list(sweep.get('window_starts', ["17:00"]))],
                window_lens_h=[float(v) for v in _as_list(sweep.get('window_lens_h', [1.0]))],
                v2g=[bool(v) for v in _as_list(sweep.get('v2g', [False]))],
                transactions_path=resolve(inputs.get('transactions')),
                fleet_path=resolve(inputs.get('fleet')),
                price_path=resolve(inputs.get('price')) or "",
                mef_path=resolve(inputs.get('mef')) or "",
                output_path=resolve(sweep.get('output')) or str(base / "results.csv"),
                parallelism=int(sweep.get('parallelism', app.sweep.parallelism)),
                executor=str(sweep.get('executor', app.sweep.executor)),
            )
        except (TypeError, ValueError) as e:
            raise ConfigError(f"扫描配置字段格式错误: {e}")
        return config

    @classmethod
    def from_toml(cls, path: Union[str, Path]) -> 'SweepConfig':
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"扫描配置文件不存在: {path}", details={"path": str(path)})
        try:
            data = toml.load(str(path))
        except toml.TomlDecodeError as e:
            raise ConfigError(f"扫描配置TOML格式错误: {e}", details={"path": str(path)})
        return cls.from_dict(data, base_dir=path.parent)

    def experiment_dict(self) -> Dict[str, Any]:
        """决定实验结果的字段（不含并行度与输出路径）"""
        return {
            "dates": [d.isoformat() for d in self.dates],
            "categories": list(self.categories),
            "strategies": [s.value for s in self.strategies],
            "products": [p.value for p in self.products],
            "lead_times_h": list(self.lead_times_h),
            "window_starts": list(self.window_starts),
            "window_lens_h": list(self.window_lens_h),
            "v2g": list(self.v2g),
            "transactions": Path(self.transactions_path).name if self.transactions_path else None,
            "fleet": Path(self.fleet_path).name if self.fleet_path else None,
            "price": Path(self.price_path).name,
            "mef": Path(self.mef_path).name,
        }

    def config_hash(self) -> str:
        canonical = json.dumps(self.experiment_dict(), sort_keys=True, separators=(',', ':'))
        return hashlib.sha256(canonical.encode('utf-8')).hexdigest()

    @property
    def cells_per_date(self) -> int:
        return (len(self.categories) * len(self.strategies) * len(self.products) * len(self.lead_times_h)
                * len(self.window_starts) * len(self.window_lens_h) * len(self.v2g))
