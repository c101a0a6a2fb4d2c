"""
Brute-force oracle - 小规模实例的穷举校验

在离散功率格点上枚举所有调度方案，用于核对LP结果。
每个方案中除一个"补差步"外其余自由步取格点值，补差步取恰好满足能量需求的值，
因此枚举得到的方案严格可行。
"""

from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .lp_core import Solution, SolverStatus, VariableLayout
from ..grid.models import FEASIBILITY_TOLERANCE, TimeGrid, Transaction
from ...config.constants import (
    ORACLE_MAX_JOINT,
    ORACLE_MAX_PROFILES,
    ORACLE_MAX_STEPS,
    ORACLE_MAX_TRANSACTIONS,
)
from ...utils.exceptions import OracleLimitError, ValidationError
from ...utils.logger import log_debug


class OracleKind(Enum):
    SIGNAL = "signal"            # min Σ w_t·p·Δt
    ENERGY = "energy"            # max Σ e
    REDISPATCH = "redispatch"    # max c^r
    CAPACITY = "capacity"        # min c^l


@dataclass
class OracleObjective:
    """穷举目标；产品目标只比较主目标（不含ε项）"""
    kind: OracleKind
    weights: Optional[np.ndarray] = None
    baseline: Optional[np.ndarray] = None
    window: Tuple[int, ...] = ()
    fixed_power: Optional[np.ndarray] = None
    freeze_until: int = 0

    @classmethod
    def signal(cls, weights: Sequence[float]) -> 'OracleObjective':
        return cls(OracleKind.SIGNAL, weights=np.asarray(weights, dtype=float))

    @classmethod
    def energy(cls) -> 'OracleObjective':
        return cls(OracleKind.ENERGY)

    @classmethod
    def redispatch(cls, baseline: Sequence[float], window: Sequence[int],
                   fixed_power: Optional[np.ndarray] = None, freeze_until: int = 0) -> 'OracleObjective':
        return cls(OracleKind.REDISPATCH, baseline=np.asarray(baseline, dtype=float),
                   window=tuple(window), fixed_power=fixed_power, freeze_until=freeze_until)

    @classmethod
    def capacity_limit(cls, window: Sequence[int], fixed_power: Optional[np.ndarray] = None,
                       freeze_until: int = 0) -> 'OracleObjective':
        return cls(OracleKind.CAPACITY, window=tuple(window),
                   fixed_power=fixed_power, freeze_until=freeze_until)

    @property
    def is_product(self) -> bool:
        return self.kind in (OracleKind.REDISPATCH, OracleKind.CAPACITY)

    @property
    def maximize(self) -> bool:
        return self.kind in (OracleKind.ENERGY, OracleKind.REDISPATCH)


def _lattice(tx: Transaction, power_levels: int) -> np.ndarray:
    return tx.p_min_kw + np.arange(power_levels + 1) * (tx.p_max_kw - tx.p_min_kw) / power_levels


def _grid_points(levels: np.ndarray, width: int) -> np.ndarray:
    if width == 0:
        return np.zeros((1, 0))
    mesh = np.meshgrid(*([levels] * width), indexing='ij')
    return np.stack(mesh, axis=-1).reshape(-1, width)


def enumerate_profiles(tx: Transaction, grid: TimeGrid, power_levels: int,
                       fixed: Optional[np.ndarray] = None, freeze_until: int = 0) -> np.ndarray:
    """
    枚举单笔交易的可行功率曲线

    Returns:
        [方案数 × n_steps] 功率矩阵（可能为0行）
    """
    dt = grid.dt_hours
    n_steps = grid.n_steps
    connected = np.arange(tx.arrive_step, tx.depart_step)
    frozen = connected[connected < freeze_until]
    free = connected[connected >= freeze_until]

    base = np.zeros(n_steps)
    if fixed is not None and len(frozen):
        base[frozen] = fixed[frozen]
    remaining = tx.energy_kwh / dt - base.sum()

    levels = _lattice(tx, power_levels)
    n_free = len(free)
    if n_free == 0:
        candidates = base[None, :] if abs(remaining) * dt <= 1e-7 else np.zeros((0, n_steps))
    else:
        count = n_free * len(levels) ** (n_free - 1)
        if count > ORACLE_MAX_PROFILES:
            raise OracleLimitError("单笔交易方案数", count, ORACLE_MAX_PROFILES)

        others = _grid_points(levels, n_free - 1)
        blocks = []
        for position in range(n_free):
            residual = remaining - others.sum(axis=1)
            keep = (residual >= tx.p_min_kw - FEASIBILITY_TOLERANCE) & \
                   (residual <= tx.p_max_kw + FEASIBILITY_TOLERANCE)
            if not np.any(keep):
                continue
            block = np.tile(base, (int(keep.sum()), 1))
            rest = np.delete(free, position)
            block[:, rest] = others[keep]
            block[:, free[position]] = np.clip(residual[keep], tx.p_min_kw, tx.p_max_kw)
            blocks.append(block)
        candidates = np.vstack(blocks) if blocks else np.zeros((0, n_steps))

    if len(candidates) == 0:
        return candidates

    # 电量轨迹必须在 [0, ē] 内
    energy = np.cumsum(candidates * dt, axis=1)
    ok = (energy.min(axis=1) >= -1e-9) & (energy.max(axis=1) <= tx.energy_kwh + 1e-9)
    candidates = candidates[ok]
    if len(candidates) == 0:
        return candidates
    return np.unique(np.round(candidates, 12), axis=0)


def energy_trajectory(power: np.ndarray, tx: Transaction, grid: TimeGrid) -> np.ndarray:
    """由功率曲线（可为多行）计算 e_0..e_T"""
    power = np.atleast_2d(power)
    energy = np.zeros((power.shape[0], grid.n_steps + 1))
    energy[:, 1:] = np.cumsum(power * grid.dt_hours, axis=1)
    energy[:, tx.depart_step:] = tx.energy_kwh
    return energy


def _product_value(aggregate_window: np.ndarray, objective: OracleObjective) -> np.ndarray:
    """aggregate_window: [..., |窗口|]"""
    if objective.kind is OracleKind.REDISPATCH:
        baseline = objective.baseline[list(objective.window)]
        return np.min(baseline - aggregate_window, axis=-1)
    return np.maximum(np.max(aggregate_window, axis=-1), 0.0)


def brute_force_oracle(transactions: Sequence[Transaction], grid: TimeGrid,
                       objective: OracleObjective, power_levels: int = 4) -> Solution:
    """
    穷举求解小规模实例

    Args:
        transactions: 至多2笔交易
        grid: 至多8步的时域
        objective: 穷举目标
        power_levels: 功率区间的等分数
    """
    if len(transactions) > ORACLE_MAX_TRANSACTIONS:
        raise OracleLimitError("交易数", len(transactions), ORACLE_MAX_TRANSACTIONS)
    if grid.n_steps > ORACLE_MAX_STEPS:
        raise OracleLimitError("时域步数", grid.n_steps, ORACLE_MAX_STEPS)
    if power_levels < 1:
        raise ValidationError("power_levels", power_levels, "等分数至少为1")
    if objective.is_product and not objective.window:
        raise ValidationError("window", objective.window, "产品目标需要非空窗口")

    layout = VariableLayout(len(transactions), grid.n_steps, with_product=objective.is_product)
    profiles: List[np.ndarray] = [
        enumerate_profiles(tx, grid, power_levels, objective.fixed_power[n] if objective.fixed_power is not None
                           else None, objective.freeze_until)
        for n, tx in enumerate(transactions)
    ]
    if any(len(p) == 0 for p in profiles):
        return Solution(SolverStatus.INFEASIBLE, float('nan'), np.full(layout.n_vars, np.nan), layout,
                        message="no lattice profile is feasible")

    chosen: List[np.ndarray] = []
    product = 0.0
    if objective.kind is OracleKind.SIGNAL:
        for tx_profiles in profiles:
            scores = tx_profiles @ objective.weights * grid.dt_hours
            chosen.append(tx_profiles[int(np.argmin(scores))])
    elif objective.kind is OracleKind.ENERGY:
        for tx, tx_profiles in zip(transactions, profiles):
            scores = energy_trajectory(tx_profiles, tx, grid).sum(axis=1)
            chosen.append(tx_profiles[int(np.argmax(scores))])
    else:
        chosen, product = _best_joint(profiles, objective, grid)

    power = np.array(chosen).reshape(len(transactions), grid.n_steps)
    values = np.zeros(layout.n_vars)
    if len(transactions):
        values[layout.power_block()] = power
        values[layout.energy_block()] = np.vstack([
            energy_trajectory(power[n], tx, grid) for n, tx in enumerate(transactions)
        ])
    if objective.is_product:
        values[layout.product_index] = product

    if objective.kind is OracleKind.SIGNAL:
        value = float(power.sum(axis=0) @ objective.weights * grid.dt_hours)
    elif objective.kind is OracleKind.ENERGY:
        value = float(values[layout.n_power:layout.n_power + layout.n_energy].sum())
    else:
        value = product

    log_debug(f"穷举校验: {[len(p) for p in profiles]} 个方案, 目标 {objective.kind.value} = {value:.6f}")
    return Solution(SolverStatus.OPTIMAL, value, values, layout, message="brute force")


def _best_joint(profiles: List[np.ndarray], objective: OracleObjective,
                grid: TimeGrid) -> Tuple[List[np.ndarray], float]:
    window = list(objective.window)
    if not profiles:
        value = float(_product_value(np.zeros(len(window)), objective))
        return [], value

    if len(profiles) == 1:
        values = _product_value(profiles[0][:, window], objective)
        best = int(np.argmax(values) if objective.maximize else np.argmin(values))
        return [profiles[0][best]], float(values[best])

    first, second = profiles
    joint = len(first) * len(second)
    if joint > ORACLE_MAX_JOINT:
        raise OracleLimitError("联合方案数", joint, ORACLE_MAX_JOINT)

    # [n1, n2, |窗口|]
    aggregate = first[:, None, window] + second[None, :, window]
    values = _product_value(aggregate, objective)
    flat = int(np.argmax(values) if objective.maximize else np.argmin(values))
    i, j = np.unravel_index(flat, values.shape)
    return [first[i], second[j]], float(values[i, j])


def quantization_bound(transactions: Sequence[Transaction], grid: TimeGrid,
                       objective: OracleObjective, power_levels: int = 4) -> float:
    """
    LP最优值与格点穷举最优值之差的上界（单向充电）

    单笔交易每步偏差不超过一个格距 g = (p_max - p_min)/power_levels。
    """
    total = 0.0
    for tx in transactions:
        gap = (tx.p_max_kw - tx.p_min_kw) / power_levels
        steps = tx.connected_steps()
        if objective.kind is OracleKind.SIGNAL:
            total += 2.0 * gap * grid.dt_hours * float(np.abs(objective.weights[steps.start:steps.stop]).sum())
        elif objective.kind is OracleKind.ENERGY:
            total += 2.0 * gap * grid.dt_hours * tx.duration_steps ** 2
        else:
            total += 2.0 * gap
    return total
