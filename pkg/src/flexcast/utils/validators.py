"""
Validation utilities
"""

import math
import re
from typing import Tuple

import numpy as np

from ..config.constants import STEP_HOURS, STEP_MINUTES
from ..config.settings import get_config
from .exceptions import ValidationError
from .logger import log_warning

_CLOCK_RE = re.compile(r"^\s*(\d{1,2}):(\d{2})\s*$")


def parse_clock(value: str) -> Tuple[int, int]:
    """解析 HH:MM，分钟必须对齐到步长"""
    match = _CLOCK_RE.match(str(value))
    if not match:
        raise ValidationError("clock", value, "时间格式应为 'HH:MM'")

    hh, mm = int(match.group(1)), int(match.group(2))
    if hh > 23 or mm > 59:
        raise ValidationError("clock", value, "时间超出范围")
    if mm % STEP_MINUTES != 0:
        raise ValidationError("clock", value, f"分钟必须是 {STEP_MINUTES} 的整数倍")
    return hh, mm


def hours_to_steps(hours: float, field: str) -> int:
    """小时数换算为步数，必须是步长的整数倍"""
    steps = hours / STEP_HOURS
    rounded = round(steps)
    if not math.isfinite(steps) or abs(steps - rounded) > 1e-9:
        raise ValidationError(field, hours, f"必须是 {STEP_HOURS} 小时的整数倍")
    return int(rounded)


def validate_lead_time(lead_time_h: float) -> bool:
    """验证提前量；超出配置的研究范围只告警"""
    if not lead_time_h > 0:
        raise ValidationError("lead_time_h", lead_time_h, "提前量必须大于0")

    hours_to_steps(lead_time_h, "lead_time_h")

    flex = get_config().flex
    low, high = flex.min_lead_time_h, flex.max_lead_time_h
    if lead_time_h < low or lead_time_h > high:
        log_warning(f"提前量 {lead_time_h}h 超出研究范围 [{low}, {high}]h")
    return True


def validate_window(start_step: int, len_steps: int, day_first: int, day_last: int) -> bool:
    """验证灵活性窗口位于样本日 [day_first, day_last) 内"""
    if len_steps <= 0:
        raise ValidationError("window_len", len_steps, "窗口长度必须大于0")

    if start_step < day_first:
        raise ValidationError("window_start", start_step, "窗口起点早于样本日")

    if start_step + len_steps > day_last:
        raise ValidationError("window_len", len_steps, "窗口超出样本日")

    return True


def check_energy_conservation(power_kw: np.ndarray, energy_kwh: np.ndarray,
                              dt_hours: float, tolerance: float) -> float:
    """
    返回 |Σ_t p·Δt − ē| 的最大值

    Args:
        power_kw: [交易 × 步] 功率矩阵
        energy_kwh: 每笔交易的需求电量
    """
    if power_kw.shape[0] == 0:
        return 0.0
    delivered = power_kw.sum(axis=1) * dt_hours
    worst = float(np.max(np.abs(delivered - energy_kwh)))
    if worst > tolerance:
        raise ValidationError("energy_kwh", f"{worst:.3e}", "调度方案未满足能量守恒")
    return worst
