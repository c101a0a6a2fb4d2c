"""
Flexibility products - 最优向下再调度与最优容量限制

两类产品共享BAU可行域，在激活时刻之前的功率冻结为BAU值。
"""

from typing import Optional, Sequence

import numpy as np

from .models import FlexProduct, FlexRequest, FlexResult
from ..grid.models import TimeGrid, Transaction
from ..optimization.lp_core import LinearProgram, Relation, Sense, Solution, build_feasibility, solve
from ..scheduling.bau import schedule_cost, schedule_from_solution, strategy_objective
from ..scheduling.models import Schedule
from ..signals.models import Signal, SignalKind
from ...config.settings import SolverSettings, get_config
from ...utils.exceptions import ConfigError, InternalSolveError
from ...utils.logger import log_debug, log_error, log_warning

# 数值噪声归零阈值
_ZERO_TOLERANCE = 1e-9
# 第二阶段对产品量的放宽
_REFINE_SLACK = 1e-9


def freeze_step(request: FlexRequest, grid: TimeGrid) -> int:
    """激活时刻 a* = 窗口起点 - l/Δt（不小于0），a* 之前的步长冻结"""
    lead_steps = int(round(request.lead_time_hours / grid.dt_hours))
    return max(request.window_start_step - lead_steps, 0)


def _check_inputs(bau: Schedule, transactions: Sequence[Transaction], request: FlexRequest) -> None:
    request.validate_for(bau.grid)
    ids = tuple(tx.id for tx in transactions)
    if len(transactions) != bau.n_transactions or (bau.transaction_ids and ids != bau.transaction_ids):
        raise ConfigError(
            "BAU方案与交易列表不一致",
            details={"bau_transactions": bau.n_transactions, "transactions": len(transactions)}
        )
    if transactions and request.v2g != bau.v2g:
        raise ConfigError(
            "请求的V2G设置与BAU方案不一致",
            details={"request_v2g": request.v2g, "bau_v2g": bau.v2g}
        )
    for tx in transactions:
        if tx.depart_step > bau.grid.n_steps:
            raise ConfigError("交易超出BAU方案的时域", details={"transaction_id": tx.id})


def _build_product_lp(bau: Schedule, transactions: Sequence[Transaction], request: FlexRequest,
                      epsilon: float) -> LinearProgram:
    grid = bau.grid
    base = build_feasibility(transactions, grid)
    is_redispatch = request.product is FlexProduct.REDISPATCH
    # c^r 自由；c^l >= 0
    lp = base.with_product_variable(lower=-np.inf if is_redispatch else 0.0, upper=np.inf)
    layout = lp.layout
    product = layout.product_index

    a_star = freeze_step(request, grid)
    if a_star > 0 and layout.n_transactions:
        frozen = layout.power_block()[:, :a_star]
        lp.fix(frozen.ravel(), bau.power_kw[:, :a_star].ravel())

    window = np.asarray(request.window_steps())
    n_tx = layout.n_transactions
    n_rows = len(window)
    rows = np.concatenate([np.repeat(np.arange(n_rows), n_tx), np.arange(n_rows)])
    power_cols = layout.power_block()[:, window].T.ravel() if n_tx else np.zeros(0, dtype=np.int64)
    cols = np.concatenate([power_cols, np.full(n_rows, product)])
    if is_redispatch:
        # Σ_n p_{n,t} + c^r <= Σ_n p̃*_{n,t}
        vals = np.concatenate([np.ones(n_rows * n_tx), np.ones(n_rows)])
        rhs = bau.aggregate()[window]
        lp.add_constraints("redispatch", Relation.LE, rows, cols, vals, rhs)
    else:
        # Σ_n p_{n,t} - c^l <= 0
        vals = np.concatenate([np.ones(n_rows * n_tx), -np.ones(n_rows)])
        lp.add_constraints("caplimit", Relation.LE, rows, cols, vals, np.zeros(n_rows))

    # 次目标与BAU目标同向：代价类取 -f，无序充电取 +Σe
    f_coefficients, f_sense = strategy_objective(bau.strategy, base.layout, grid)
    secondary = np.append(f_coefficients, 0.0)
    if f_sense is Sense.MAX:
        secondary = -secondary
    objective = np.zeros(layout.n_vars)
    objective[product] = 1.0
    if is_redispatch:
        lp.set_objective(objective - epsilon * secondary, Sense.MAX)
    else:
        lp.set_objective(objective + epsilon * secondary, Sense.MIN)
    return lp


def _refine(lp: LinearProgram, solution: Solution, bau: Schedule, request: FlexRequest,
            settings: SolverSettings) -> Solution:
    """第二阶段：产品量固定在第一阶段最优值，按BAU目标求解调整后的调度"""
    refined = lp.copy()
    product = lp.layout.product_index
    value = float(solution.values[product])
    slack = _REFINE_SLACK * max(1.0, abs(value))
    if request.product is FlexProduct.REDISPATCH:
        refined.lower[product] = value - slack
    else:
        refined.upper[product] = max(value + slack, refined.lower[product])

    coefficients, sense = strategy_objective(bau.strategy, lp.layout, bau.grid)
    refined.set_objective(coefficients, sense)
    second = solve(refined, settings)
    if not second.is_optimal:
        log_warning(f"{request.product.value} 第二阶段未得到最优解 ({second.status.value})，沿用第一阶段调度")
        return solution
    return second


def _delta(adjusted: Schedule, bau: Schedule, signal: Optional[Signal]) -> float:
    if signal is None:
        return float('nan')
    return schedule_cost(adjusted, signal) - schedule_cost(bau, signal)


def _resolve_signal(bau: Schedule, signal: Optional[Signal], kind: SignalKind) -> Optional[Signal]:
    if signal is not None:
        return signal
    strategy_signal = bau.strategy.signal
    if strategy_signal is not None and strategy_signal.kind is kind:
        return strategy_signal
    return None


def _solve_product(bau: Schedule, transactions: Sequence[Transaction], request: FlexRequest,
                   price: Optional[Signal], mef: Optional[Signal],
                   settings: Optional[SolverSettings], epsilon: Optional[float]) -> FlexResult:
    _check_inputs(bau, transactions, request)
    if epsilon is None:
        epsilon = get_config().flex.epsilon
    if settings is None:
        settings = get_config().solver

    lp = _build_product_lp(bau, transactions, request, epsilon)
    solution = solve(lp, settings)
    if not solution.is_optimal:
        log_error(f"{request.product.value} 求解失败 ({bau.grid.anchor_date}): {solution.status.value}")
        raise InternalSolveError(
            f"{request.product.value} 求解失败: {solution.status.value}",
            status=solution.status.value,
            details={
                "product": request.product.value,
                "window_start": request.window_start_step,
                "lead_h": request.lead_time_hours,
                "solver_message": solution.message,
            }
        )

    magnitude = solution.product_value()
    if abs(magnitude) < _ZERO_TOLERANCE:
        magnitude = 0.0

    f_value = float(strategy_objective(bau.strategy, lp.layout, bau.grid)[0] @ solution.values)
    ratio = epsilon * abs(f_value) / abs(magnitude) if magnitude != 0.0 else float('nan')
    if transactions:
        solution = _refine(lp, solution, bau, request, settings)
    adjusted = schedule_from_solution(solution, bau.grid, bau.strategy, transactions, bau.v2g)

    price = _resolve_signal(bau, price, SignalKind.DAY_AHEAD_PRICE)
    mef = _resolve_signal(bau, mef, SignalKind.MEF)
    a_star = freeze_step(request, bau.grid)
    log_debug(f"{request.product.value} {bau.grid.anchor_date} 窗口 {request.window_start_step}"
              f"+{request.window_len_steps} 提前量 {request.lead_time_hours}h: {magnitude:.6f} kW")

    return FlexResult(
        product=request.product,
        magnitude_kw=magnitude,
        adjusted_schedule=adjusted,
        status=solution.status,
        cost_delta=_delta(adjusted, bau, price),
        emission_delta=_delta(adjusted, bau, mef),
        freeze_step=a_star,
        epsilon_ratio=ratio,
        message=solution.message,
    )


def solve_redispatch(bau: Schedule, transactions: Sequence[Transaction], request: FlexRequest,
                     price: Optional[Signal] = None, mef: Optional[Signal] = None,
                     settings: Optional[SolverSettings] = None,
                     epsilon: Optional[float] = None) -> FlexResult:
    """
    最优向下再调度 c^r

    max c^r ∓ ε·f(p)，窗口内 Σ_n p_{n,t} <= Σ_n p̃*_{n,t} - c^r，激活前冻结。

    Args:
        bau: 同一时域、同一交易列表上的BAU方案
        price / mef: 计算成本与排放变化；缺省时取BAU策略自带的信号
    """
    if request.product is not FlexProduct.REDISPATCH:
        raise ConfigError("请求的产品不是 redispatch", details={"product": request.product.value})
    return _solve_product(bau, transactions, request, price, mef, settings, epsilon)


def solve_capacity_limit(bau: Schedule, transactions: Sequence[Transaction], request: FlexRequest,
                         price: Optional[Signal] = None, mef: Optional[Signal] = None,
                         settings: Optional[SolverSettings] = None,
                         epsilon: Optional[float] = None) -> FlexResult:
    """
    最优容量限制 c^l

    min c^l ± ε·f(p)，c^l >= 0，窗口内 Σ_n p_{n,t} <= c^l，激活前冻结。
    """
    if request.product is not FlexProduct.CAPACITY_LIMITATION:
        raise ConfigError("请求的产品不是 capacity_limitation", details={"product": request.product.value})
    return _solve_product(bau, transactions, request, price, mef, settings, epsilon)


def solve_product(bau: Schedule, transactions: Sequence[Transaction], request: FlexRequest,
                  price: Optional[Signal] = None, mef: Optional[Signal] = None,
                  settings: Optional[SolverSettings] = None,
                  epsilon: Optional[float] = None) -> FlexResult:
    if request.product is FlexProduct.REDISPATCH:
        return solve_redispatch(bau, transactions, request, price, mef, settings, epsilon)
    return solve_capacity_limit(bau, transactions, request, price, mef, settings, epsilon)
