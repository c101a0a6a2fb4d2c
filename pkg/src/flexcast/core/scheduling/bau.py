"""
BAU scheduler - 成本最优 / 排放最优 / 无序充电三种基准调度
"""

from typing import Optional, Sequence, Tuple

import numpy as np

from .models import BauStrategy, BauStrategyKind, Schedule
from ..grid.models import TimeGrid, Transaction
from ..optimization.lp_core import Sense, Solution, SolverStatus, VariableLayout, build_feasibility, solve
from ..signals.models import Signal, SignalKind
from ...config.settings import SolverSettings
from ...utils.exceptions import ConfigError, InternalSolveError
from ...utils.logger import log_debug, log_error


def _check_signal(signal: Signal, grid: TimeGrid) -> None:
    if not signal.covers(grid):
        raise ConfigError(
            f"信号长度 {signal.n_steps} 与时域步数 {grid.n_steps} 不一致",
            details={"signal": signal.kind.value, "n_steps": grid.n_steps}
        )


def signal_coefficients(signal: Signal, layout: VariableLayout, grid: TimeGrid) -> np.ndarray:
    """Σ_n Σ_t w_t·p_{n,t}·Δt 的目标系数"""
    _check_signal(signal, grid)
    coefficients = np.zeros(layout.n_vars)
    if layout.n_transactions:
        coefficients[layout.power_block()] = signal.values[None, :] * grid.dt_hours
    return coefficients


def energy_coefficients(layout: VariableLayout) -> np.ndarray:
    """Σ_n Σ_t e_{n,t} 的目标系数"""
    coefficients = np.zeros(layout.n_vars)
    if layout.n_transactions:
        coefficients[layout.energy_block()] = 1.0
    return coefficients


def strategy_objective(strategy: BauStrategy, layout: VariableLayout,
                       grid: TimeGrid) -> Tuple[np.ndarray, Sense]:
    """
    策略对应的目标

    无序充电按"尽快充电"取 max Σe（累计电量越大越早充满）。
    """
    if strategy.kind is BauStrategyKind.UNOPTIMIZED:
        return energy_coefficients(layout), Sense.MAX
    return signal_coefficients(strategy.signal, layout, grid), Sense.MIN


def schedule_from_solution(solution: Solution, grid: TimeGrid, strategy: BauStrategy,
                           transactions: Sequence[Transaction], v2g: bool) -> Schedule:
    return Schedule(
        grid=grid,
        power_kw=solution.power_matrix(),
        energy_kwh=solution.energy_matrix(),
        strategy=strategy,
        transaction_ids=tuple(tx.id for tx in transactions),
        v2g=v2g,
        objective_value=solution.objective_value,
    )


def _find_infeasible(transactions: Sequence[Transaction], grid: TimeGrid,
                     settings: Optional[SolverSettings]) -> Optional[Transaction]:
    """逐笔求解，找出自身不可行的交易"""
    for tx in transactions:
        lp = build_feasibility([tx], grid)
        if not solve(lp, settings).is_optimal:
            return tx
    return None


def schedule_bau(transactions: Sequence[Transaction], grid: TimeGrid, strategy: BauStrategy,
                 settings: Optional[SolverSettings] = None) -> Schedule:
    """
    计算BAU调度方案

    Args:
        transactions: 已离散化的交易（同一V2G设置）
        grid: 时间网格
        strategy: BAU策略
    """
    v2g = any(tx.is_v2g for tx in transactions)
    if not transactions:
        return Schedule.empty(grid, strategy, v2g=v2g)

    lp = build_feasibility(transactions, grid)
    coefficients, sense = strategy_objective(strategy, lp.layout, grid)
    lp.set_objective(coefficients, sense)
    solution = solve(lp, settings)

    if not solution.is_optimal:
        details = {"strategy": strategy.kind.value, "solver_message": solution.message}
        if solution.status is SolverStatus.INFEASIBLE:
            offending = _find_infeasible(transactions, grid, settings)
            if offending is not None:
                details["transaction_id"] = offending.id
                details["station_id"] = offending.station_id
        log_error(f"BAU求解失败 ({strategy.kind.value}, {grid.anchor_date}): {solution.status.value}")
        raise InternalSolveError(
            f"BAU调度求解失败: {solution.status.value}",
            status=solution.status.value,
            details=details,
        )

    log_debug(f"BAU {strategy.kind.value} {grid.anchor_date}: {len(transactions)} 笔交易, "
              f"目标值 {solution.objective_value:.6f}")
    return schedule_from_solution(solution, grid, strategy, transactions, v2g)


def aggregate_profile(schedule: Schedule) -> np.ndarray:
    """逐步总功率 Σ_n p_{n,t}"""
    return schedule.aggregate()


def schedule_cost(schedule: Schedule, signal: Signal) -> float:
    """Σ_t Σ_n w_t·p_{n,t}·Δt（€ 或 kgCO2）"""
    _check_signal(signal, schedule.grid)
    return float(aggregate_profile(schedule) @ signal.values * schedule.grid.dt_hours)


def schedule_emissions(schedule: Schedule, mef: Signal) -> float:
    if mef.kind is not SignalKind.MEF:
        raise ConfigError("排放核算需要MEF信号", details={"signal": mef.kind.value})
    return schedule_cost(schedule, mef)
