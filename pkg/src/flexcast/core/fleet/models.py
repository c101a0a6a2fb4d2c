"""
Fleet models - 合成车队参数

参数为虚构的默认值，仅在没有真实充电数据时用于实验。
"""

from dataclasses import dataclass
from datetime import date, datetime, timedelta
from pathlib import Path
from typing import Any, Dict, List, Union

import toml

from ..grid.models import ChargerCategory
from ...config.constants import CATEGORY_SHARES, FLEET_PRESETS
from ...utils.exceptions import ConfigError, ValidationError
from ...utils.logger import log_info

STATION_PREFIXES = {
    ChargerCategory.RESIDENTIAL: "RES",
    ChargerCategory.COMMERCIAL: "COM",
    ChargerCategory.SHARED: "SHR",
}

# 64位无符号种子
_SEED_LIMIT = 2 ** 64


@dataclass(frozen=True)
class LogNormalParams:
    """截断对数正态分布：中位数、对数标准差、上下限"""
    median: float
    sigma: float
    max: float
    min: float = 0.0

    def __post_init__(self):
        if self.median <= 0:
            raise ValidationError("median", self.median, "中位数必须大于0")
        if self.sigma < 0:
            raise ValidationError("sigma", self.sigma, "对数标准差不能为负")
        if not 0 <= self.min < self.max:
            raise ValidationError("max", self.max, "上限必须大于下限")

    @classmethod
    def from_dict(cls, data: Dict[str, float], minimum: float) -> 'LogNormalParams':
        try:
            return cls(
                median=float(data['median']),
                sigma=float(data['sigma']),
                max=float(data['max']),
                min=float(data.get('min', minimum)),
            )
        except KeyError as e:
            raise ConfigError(f"分布参数缺少字段 {e}", details={"params": dict(data)})


@dataclass(frozen=True)
class FleetSpec:
    """单一类别的合成车队描述"""
    category: ChargerCategory
    n_stations: int
    start_date: date
    end_date: date
    seed: int
    arrival_profile: List[float]
    connection_hours: LogNormalParams
    energy_kwh: LogNormalParams
    p_max_kw: List[float]
    p_max_weights: List[float]
    sessions_per_station_day: float
    station_offset: int = 0

    def __post_init__(self):
        if self.n_stations < 0:
            raise ValidationError("n_stations", self.n_stations, "充电站数量不能为负")
        if self.end_date < self.start_date:
            raise ValidationError("end_date", self.end_date, "结束日期早于开始日期")
        if not 0 <= self.seed < _SEED_LIMIT:
            raise ValidationError("seed", self.seed, "种子必须是64位无符号整数")
        if len(self.arrival_profile) != 24:
            raise ValidationError("arrival_profile", len(self.arrival_profile), "需要24个小时权重")
        if min(self.arrival_profile) < 0 or sum(self.arrival_profile) <= 0:
            raise ValidationError("arrival_profile", self.arrival_profile, "权重必须非负且不全为0")
        if self.connection_hours.max > 24:
            raise ValidationError("connection_hours.max", self.connection_hours.max, "连接时长上限为24小时")
        if not self.p_max_kw or min(self.p_max_kw) <= 0:
            raise ValidationError("p_max_kw", self.p_max_kw, "功率选项必须大于0")
        if len(self.p_max_weights) != len(self.p_max_kw) or sum(self.p_max_weights) <= 0:
            raise ValidationError("p_max_weights", self.p_max_weights, "权重数量需与功率选项一致")
        if self.sessions_per_station_day < 0:
            raise ValidationError("sessions_per_station_day", self.sessions_per_station_day, "到达率不能为负")

    @property
    def station_prefix(self) -> str:
        return STATION_PREFIXES[self.category]

    def days(self) -> List[date]:
        n_days = (self.end_date - self.start_date).days + 1
        return [self.start_date + timedelta(days=i) for i in range(n_days)]

    @classmethod
    def from_preset(cls, category: Union[str, ChargerCategory], n_stations: int,
                    start_date: date, end_date: date, seed: int, **overrides) -> 'FleetSpec':
        category = ChargerCategory(category) if isinstance(category, str) else category
        return cls.from_dict({
            'category': category.value,
            'n_stations': n_stations,
            'start_date': start_date,
            'end_date': end_date,
            'seed': seed,
            **overrides,
        })

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'FleetSpec':
        """类别预设打底，data 中的字段覆盖"""
        try:
            category = ChargerCategory(str(data['category']).lower())
        except KeyError:
            raise ConfigError("车队配置缺少 category 字段")
        except ValueError:
            raise ConfigError(f"未知的充电站类别: {data['category']}")

        preset = FLEET_PRESETS[category.value]
        merged = {**preset, **data}
        try:
            return cls(
                category=category,
                n_stations=int(merged['n_stations']),
                start_date=_as_date(merged['start_date']),
                end_date=_as_date(merged.get('end_date', merged['start_date'])),
                seed=int(merged.get('seed', 0)),
                arrival_profile=[float(w) for w in merged['arrival_profile']],
                connection_hours=LogNormalParams.from_dict(merged['connection_hours'], minimum=0.5),
                energy_kwh=LogNormalParams.from_dict(merged['energy_kwh'], minimum=0.5),
                p_max_kw=[float(p) for p in merged['p_max_kw']],
                p_max_weights=[float(w) for w in merged['p_max_weights']],
                sessions_per_station_day=float(merged['sessions_per_station_day']),
                station_offset=int(merged.get('station_offset', 0)),
            )
        except KeyError as e:
            raise ConfigError(f"车队配置缺少字段 {e}", details={"category": category.value})
        except (TypeError, ValueError) as e:
            raise ConfigError(f"车队配置字段格式错误: {e}", details={"category": category.value})


def _as_date(value: Any) -> date:
    if isinstance(value, datetime):
        return value.date()
    if isinstance(value, date):
        return value
    try:
        return date.fromisoformat(str(value))
    except ValueError:
        raise ConfigError(f"无法解析日期: {value}")


def load_fleet_specs(path: Union[str, Path]) -> List[FleetSpec]:
    """读取TOML车队配置，每个 [[fleet]] 表对应一个FleetSpec"""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"车队配置文件不存在: {path}", details={"path": str(path)})

    try:
        data = toml.load(str(path))
    except toml.TomlDecodeError as e:
        raise ConfigError(f"车队配置TOML格式错误: {e}", details={"path": str(path)})

    tables = data.get('fleet')
    if not tables:
        raise ConfigError("车队配置中没有 [[fleet]] 表", details={"path": str(path)})

    specs = [FleetSpec.from_dict(table) for table in tables]
    log_info(f"读取车队配置 {path.name}: {len(specs)} 组")
    return specs


def default_mix_specs(n_stations: int, start_date: date, end_date: date, seed: int) -> List[FleetSpec]:
    """按默认类别占比拆分充电站数量（最大余数法）"""
    shares = list(CATEGORY_SHARES.items())
    quotas = [n_stations * share for _, share in shares]
    counts = [int(q) for q in quotas]
    order = sorted(range(len(shares)), key=lambda i: (-(quotas[i] - counts[i]), i))
    for i in order[:n_stations - sum(counts)]:
        counts[i] += 1

    specs = []
    for (category, _), count in zip(shares, counts):
        spec = FleetSpec.from_preset(category, count, start_date, end_date, seed)
        specs.append(spec)
    return specs
