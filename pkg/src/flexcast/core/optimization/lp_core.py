"""
LP core - 可行域构建、线性规划容器与求解
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from ..grid.models import TimeGrid, Transaction
from ...config.settings import SolverSettings, get_config
from ...utils.exceptions import HorizonError, ValidationError
from ...utils.logger import log_debug, log_warning


class Relation(Enum):
    """约束关系"""
    LE = "<="
    EQ = "="
    GE = ">="


class Sense(Enum):
    """优化方向"""
    MIN = "min"
    MAX = "max"


class SolverStatus(Enum):
    """求解状态"""
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    FAILED = "failed"


@dataclass(frozen=True)
class VariableLayout:
    """
    变量排布：按交易、再按步长排列

    p_{n,t}: n*T + t
    e_{n,t}: N*T + n*(T+1) + t, t = 0..T
    产品变量（c^r 或 c^l）位于最后
    """
    n_transactions: int
    n_steps: int
    with_product: bool = False

    @property
    def n_power(self) -> int:
        return self.n_transactions * self.n_steps

    @property
    def n_energy(self) -> int:
        return self.n_transactions * (self.n_steps + 1)

    @property
    def n_vars(self) -> int:
        return self.n_power + self.n_energy + (1 if self.with_product else 0)

    def p_index(self, n: int, t: int) -> int:
        if not (0 <= n < self.n_transactions and 0 <= t < self.n_steps):
            raise IndexError(f"p[{n},{t}] 不在变量排布内")
        return n * self.n_steps + t

    def e_index(self, n: int, t: int) -> int:
        if not (0 <= n < self.n_transactions and 0 <= t <= self.n_steps):
            raise IndexError(f"e[{n},{t}] 不在变量排布内")
        return self.n_power + n * (self.n_steps + 1) + t

    @property
    def product_index(self) -> int:
        if not self.with_product:
            raise IndexError("未声明产品变量")
        return self.n_power + self.n_energy

    def power_block(self) -> np.ndarray:
        """[N × T] 的p变量下标矩阵"""
        return np.arange(self.n_power).reshape(self.n_transactions, self.n_steps)

    def energy_block(self) -> np.ndarray:
        """[N × (T+1)] 的e变量下标矩阵"""
        return (self.n_power + np.arange(self.n_energy)).reshape(self.n_transactions, self.n_steps + 1)

    def with_product_variable(self) -> 'VariableLayout':
        return VariableLayout(self.n_transactions, self.n_steps, with_product=True)

    def variable_name(self, index: int) -> str:
        """LP文本中的变量名"""
        if index < self.n_power:
            n, t = divmod(index, self.n_steps)
            return f"p_{n}_{t}"
        if index < self.n_power + self.n_energy:
            n, t = divmod(index - self.n_power, self.n_steps + 1)
            return f"e_{n}_{t}"
        return "c"


@dataclass
class ConstraintBlock:
    """一组同类稀疏约束（COO格式）"""
    name: str
    relation: Relation
    rows: np.ndarray
    cols: np.ndarray
    vals: np.ndarray
    rhs: np.ndarray

    @property
    def n_rows(self) -> int:
        return len(self.rhs)

    def matrix(self, n_vars: int) -> sp.csr_matrix:
        return sp.coo_matrix((self.vals, (self.rows, self.cols)), shape=(self.n_rows, n_vars)).tocsr()


@dataclass
class LinearProgram:
    """线性规划：目标 + 稀疏约束 + 变量界"""
    layout: VariableLayout
    lower: np.ndarray
    upper: np.ndarray
    objective: np.ndarray = None
    sense: Sense = Sense.MIN
    constraints: List[ConstraintBlock] = field(default_factory=list)

    def __post_init__(self):
        if self.objective is None:
            self.objective = np.zeros(self.layout.n_vars)

    @classmethod
    def empty(cls, layout: VariableLayout) -> 'LinearProgram':
        return cls(
            layout=layout,
            lower=np.full(layout.n_vars, -np.inf),
            upper=np.full(layout.n_vars, np.inf),
        )

    def copy(self) -> 'LinearProgram':
        return LinearProgram(
            layout=self.layout,
            lower=self.lower.copy(),
            upper=self.upper.copy(),
            objective=self.objective.copy(),
            sense=self.sense,
            constraints=list(self.constraints),
        )

    def with_product_variable(self, lower: float = -np.inf, upper: float = np.inf) -> 'LinearProgram':
        """追加一个标量产品变量，已有约束保持不变"""
        if self.layout.with_product:
            raise ValidationError("layout", "with_product", "产品变量已存在")
        layout = self.layout.with_product_variable()
        return LinearProgram(
            layout=layout,
            lower=np.append(self.lower, lower),
            upper=np.append(self.upper, upper),
            objective=np.append(self.objective, 0.0),
            sense=self.sense,
            constraints=list(self.constraints),
        )

    def set_objective(self, coefficients: np.ndarray, sense: Sense) -> None:
        coefficients = np.asarray(coefficients, dtype=float)
        if coefficients.shape != (self.layout.n_vars,):
            raise ValidationError("objective", coefficients.shape, f"目标系数长度应为 {self.layout.n_vars}")
        self.objective = coefficients
        self.sense = sense

    def add_constraints(self, name: str, relation: Relation, rows: Sequence[int], cols: Sequence[int],
                        vals: Sequence[float], rhs: Sequence[float]) -> None:
        block = ConstraintBlock(
            name=name,
            relation=relation,
            rows=np.asarray(rows, dtype=np.int64),
            cols=np.asarray(cols, dtype=np.int64),
            vals=np.asarray(vals, dtype=float),
            rhs=np.asarray(rhs, dtype=float),
        )
        if block.n_rows > 0:
            self.constraints.append(block)

    def fix(self, indices: np.ndarray, values: np.ndarray) -> None:
        """以 lb = ub 固定变量"""
        self.lower[indices] = values
        self.upper[indices] = values

    @property
    def n_constraints(self) -> int:
        return sum(block.n_rows for block in self.constraints)

    def validate(self) -> None:
        """检查系数下标与p/e变量界"""
        n_vars = self.layout.n_vars
        for block in self.constraints:
            if len(block.cols) and (block.cols.min() < 0 or block.cols.max() >= n_vars):
                raise ValidationError("constraints", block.name, "系数引用了未声明的变量")
            if len(block.rows) and (block.rows.min() < 0 or block.rows.max() >= block.n_rows):
                raise ValidationError("constraints", block.name, "行下标越界")

        n_state = self.layout.n_power + self.layout.n_energy
        if not (np.all(np.isfinite(self.lower[:n_state])) and np.all(np.isfinite(self.upper[:n_state]))):
            raise ValidationError("bounds", "p/e", "功率与电量变量必须有有限的界")
        if np.any(self.lower > self.upper + 1e-12):
            raise ValidationError("bounds", "lower>upper", "变量下界大于上界")

    def to_matrices(self) -> Tuple[Optional[sp.csr_matrix], Optional[np.ndarray],
                                   Optional[sp.csr_matrix], Optional[np.ndarray]]:
        """合并为 (A_ub, b_ub, A_eq, b_eq)；>= 行取负并入 <="""
        n_vars = self.layout.n_vars
        ub_blocks, ub_rhs, eq_blocks, eq_rhs = [], [], [], []
        for block in self.constraints:
            matrix = block.matrix(n_vars)
            if block.relation is Relation.EQ:
                eq_blocks.append(matrix)
                eq_rhs.append(block.rhs)
            elif block.relation is Relation.LE:
                ub_blocks.append(matrix)
                ub_rhs.append(block.rhs)
            else:
                ub_blocks.append(-matrix)
                ub_rhs.append(-block.rhs)

        a_ub = sp.vstack(ub_blocks, format='csr') if ub_blocks else None
        b_ub = np.concatenate(ub_rhs) if ub_rhs else None
        a_eq = sp.vstack(eq_blocks, format='csr') if eq_blocks else None
        b_eq = np.concatenate(eq_rhs) if eq_rhs else None
        return a_ub, b_ub, a_eq, b_eq

    def to_lp_text(self) -> str:
        """导出CPLEX LP格式文本，便于与外部求解器对照"""
        name = self.layout.variable_name
        lines = ["\\ flexcast LP", "Maximize" if self.sense is Sense.MAX else "Minimize"]
        nonzero = np.flatnonzero(self.objective)
        lines.append(" obj: " + _linear_text(nonzero, self.objective[nonzero], name))

        lines.append("Subject To")
        for block in self.constraints:
            matrix = block.matrix(self.layout.n_vars)
            for row in range(block.n_rows):
                start, end = matrix.indptr[row], matrix.indptr[row + 1]
                lhs = _linear_text(matrix.indices[start:end], matrix.data[start:end], name)
                lines.append(f" {block.name}_{row}: {lhs} {block.relation.value} {block.rhs[row]:.12g}")

        lines.append("Bounds")
        for index in range(self.layout.n_vars):
            low, high = self.lower[index], self.upper[index]
            var = name(index)
            if np.isinf(low) and np.isinf(high):
                lines.append(f" {var} free")
            elif low == high:
                lines.append(f" {var} = {low:.12g}")
            else:
                low_txt = "-inf" if np.isinf(low) else f"{low:.12g}"
                high_txt = "+inf" if np.isinf(high) else f"{high:.12g}"
                lines.append(f" {low_txt} <= {var} <= {high_txt}")
        lines.append("End")
        return "\n".join(lines) + "\n"


def _linear_text(indices: np.ndarray, coefficients: np.ndarray, name) -> str:
    if len(indices) == 0:
        return "0"
    terms = []
    for position, (index, value) in enumerate(zip(indices, coefficients)):
        sign = "-" if value < 0 else "+"
        magnitude = abs(value)
        body = name(index) if magnitude == 1 else f"{magnitude:.12g} {name(index)}"
        if position == 0:
            terms.append(f"-{body}" if value < 0 else body)
        else:
            terms.append(f"{sign} {body}")
    return " ".join(terms)


@dataclass
class Solution:
    """求解结果"""
    status: SolverStatus
    objective_value: float
    values: np.ndarray
    layout: VariableLayout
    message: str = ""
    iterations: int = 0
    max_residual: float = 0.0

    @property
    def is_optimal(self) -> bool:
        return self.status is SolverStatus.OPTIMAL

    def power_matrix(self) -> np.ndarray:
        if self.layout.n_transactions == 0:
            return np.zeros((0, self.layout.n_steps))
        return self.values[self.layout.power_block()]

    def energy_matrix(self) -> np.ndarray:
        if self.layout.n_transactions == 0:
            return np.zeros((0, self.layout.n_steps + 1))
        return self.values[self.layout.energy_block()]

    def product_value(self) -> float:
        return float(self.values[self.layout.product_index])


def build_feasibility(transactions: Sequence[Transaction], grid: TimeGrid,
                      with_product: bool = False) -> LinearProgram:
    """
    构建所有交易共享的可行域

    - t <= t_a: e = 0；t >= t_d: e = ē；其余 0 <= e <= ē
    - [t_a, t_d) 内 p_min <= p <= p_max，之外 p = 0
    - t_a < t <= t_d: e_t - e_{t-1} - Δt·p_{t-1} = 0

    Args:
        transactions: 已离散化到grid的交易
        with_product: 是否追加标量产品变量（自由变量）
    """
    n_steps = grid.n_steps
    layout = VariableLayout(len(transactions), n_steps, with_product=with_product)
    lp = LinearProgram.empty(layout)
    dt = grid.dt_hours

    rows: List[np.ndarray] = []
    cols: List[np.ndarray] = []
    vals: List[np.ndarray] = []
    row_offset = 0

    for n, tx in enumerate(transactions):
        if tx.arrive_step < 0:
            raise HorizonError("arrive_step", tx.arrive_step, n_steps)
        if tx.depart_step > n_steps:
            raise HorizonError("depart_step", tx.depart_step, n_steps)

        a, d = tx.arrive_step, tx.depart_step
        e_idx = layout.energy_block()[n]
        p_idx = layout.power_block()[n]

        lp.lower[e_idx] = 0.0
        lp.upper[e_idx] = tx.energy_kwh
        lp.upper[e_idx[:a + 1]] = 0.0
        lp.lower[e_idx[d:]] = tx.energy_kwh

        lp.lower[p_idx] = 0.0
        lp.upper[p_idx] = 0.0
        lp.lower[p_idx[a:d]] = tx.p_min_kw
        lp.upper[p_idx[a:d]] = tx.p_max_kw

        steps = np.arange(a + 1, d + 1)
        row_ids = row_offset + np.arange(len(steps))
        rows.append(np.repeat(row_ids, 3))
        cols.append(np.column_stack([e_idx[steps], e_idx[steps - 1], p_idx[steps - 1]]).ravel())
        vals.append(np.tile([1.0, -1.0, -dt], len(steps)))
        row_offset += len(steps)

    if row_offset:
        lp.add_constraints(
            "dyn",
            Relation.EQ,
            np.concatenate(rows),
            np.concatenate(cols),
            np.concatenate(vals),
            np.zeros(row_offset),
        )

    log_debug(f"可行域: {len(transactions)} 笔交易, {layout.n_vars} 个变量, {row_offset} 条动态约束")
    return lp


_STATUS_MAP: Dict[int, SolverStatus] = {
    0: SolverStatus.OPTIMAL,
    2: SolverStatus.INFEASIBLE,
    3: SolverStatus.UNBOUNDED,
}


def _max_residual(lp: LinearProgram, x: np.ndarray) -> float:
    """约束与变量界的最大绝对违反量"""
    worst = 0.0
    a_ub, b_ub, a_eq, b_eq = lp.to_matrices()
    if a_eq is not None:
        worst = max(worst, float(np.max(np.abs(a_eq @ x - b_eq))))
    if a_ub is not None:
        worst = max(worst, float(np.max(np.maximum(a_ub @ x - b_ub, 0.0))))
    if len(x):
        worst = max(worst, float(np.max(np.maximum(lp.lower - x, 0.0))))
        worst = max(worst, float(np.max(np.maximum(x - lp.upper, 0.0))))
    return worst


def solve(lp: LinearProgram, settings: Optional[SolverSettings] = None) -> Solution:
    """
    求解线性规划

    不可行/无界/数值失败以状态返回，不抛异常。
    """
    if settings is None:
        settings = get_config().solver

    lp.validate()
    layout = lp.layout
    if layout.n_vars == 0:
        return Solution(SolverStatus.OPTIMAL, 0.0, np.zeros(0), layout)

    sign = -1.0 if lp.sense is Sense.MAX else 1.0
    a_ub, b_ub, a_eq, b_eq = lp.to_matrices()
    bounds = [
        (None if np.isinf(low) else low, None if np.isinf(high) else high)
        for low, high in zip(lp.lower, lp.upper)
    ]

    try:
        result = linprog(
            sign * lp.objective,
            A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq,
            bounds=bounds,
            method=settings.method,
            options={
                "presolve": settings.presolve,
                "time_limit": settings.time_limit,
                "primal_feasibility_tolerance": settings.primal_feasibility_tolerance,
                "dual_feasibility_tolerance": settings.dual_feasibility_tolerance,
            },
        )
    except (ValueError, np.linalg.LinAlgError) as e:
        log_warning(f"LP求解异常: {e}")
        return Solution(SolverStatus.FAILED, float('nan'), np.full(layout.n_vars, np.nan), layout, message=str(e))

    status = _STATUS_MAP.get(result.status, SolverStatus.FAILED)
    iterations = int(getattr(result, 'nit', 0) or 0)
    if status is not SolverStatus.OPTIMAL:
        log_debug(f"LP求解未得到最优解: {status.value} ({result.message})")
        return Solution(status, float('nan'), np.full(layout.n_vars, np.nan), layout,
                        message=str(result.message), iterations=iterations)

    x = np.asarray(result.x, dtype=float)
    residual = _max_residual(lp, x)
    if residual > settings.residual_tolerance:
        log_warning(f"LP解的约束残差 {residual:.3e} 超过容差 {settings.residual_tolerance:.0e}")
        return Solution(SolverStatus.FAILED, float('nan'), x, layout,
                        message=f"residual {residual:.3e} exceeds tolerance",
                        iterations=iterations, max_residual=residual)

    return Solution(
        status=SolverStatus.OPTIMAL,
        objective_value=float(lp.objective @ x),
        values=x,
        layout=layout,
        message=str(result.message),
        iterations=iterations,
        max_residual=residual,
    )
