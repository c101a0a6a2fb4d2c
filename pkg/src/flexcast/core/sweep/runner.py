"""
Sweep runner - 按日期并行执行实验单元并汇总结果
"""

import bisect
from dataclasses import dataclass
from datetime import date
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from .config import ALL_CATEGORIES, SweepConfig
from ..common.events import EventBus, Job, JobQueue
from ..fleet.generator import generate_many
from ..fleet.models import load_fleet_specs
from ..flexibility.models import FlexProduct, FlexRequest
from ..flexibility.products import solve_product
from ..grid.ingest import discretize_all, parse_transactions, sample_day
from ..grid.models import ChargerCategory, RawTransaction, TimeGrid
from ..scheduling.bau import schedule_bau
from ..scheduling.models import BauStrategy, BauStrategyKind
from ..signals.loader import SignalSeries
from ..signals.models import Signal, SignalKind
from ... import __version__
from ...config import get_config
from ...config.constants import ENERGY_TOLERANCE_KWH, RESULT_COLUMNS, RESULT_KEY_COLUMNS
from ...config.settings import SolverSettings
from ...storage.results import ResultStore
from ...utils.exceptions import FlexcastError, InternalSolveError
from ...utils.logger import log_error, log_info, log_progress, log_success, log_warning
from ...utils.validators import check_energy_conservation


@dataclass(frozen=True)
class Cell:
    """单个实验单元（不含日期与类别）"""
    strategy: BauStrategyKind
    product: FlexProduct
    lead_h: float
    window_start: str
    window_len_h: float
    v2g: bool


@dataclass
class DayJob:
    """单个 (日期, 类别) 的全部实验单元；可被pickle"""
    anchor_date: date
    category: str
    raws: List[RawTransaction]
    price: Signal
    mef: Signal
    cells: List[Cell]
    solver: SolverSettings
    epsilon: float


@dataclass
class DayOutcome:
    rows: List[Dict[str, Any]]
    excluded: int
    considered: int


def _row(job: DayJob, cell: Cell, status: str, n_transactions: int, magnitude: float = float('nan'),
         cost_delta: float = float('nan'), emission_delta: float = float('nan'),
         message: str = "") -> Dict[str, Any]:
    return {
        'date': job.anchor_date.isoformat(),
        'category': job.category,
        'bau': cell.strategy.value,
        'v2g': cell.v2g,
        'product': cell.product.value,
        'window_start': cell.window_start,
        'window_len': cell.window_len_h,
        'lead_h': cell.lead_h,
        'magnitude_kw': magnitude,
        'cost_delta': cost_delta,
        'emission_delta': emission_delta,
        'status': status,
        'n_transactions': n_transactions,
        'message': message,
    }


def _failure(error: Exception) -> Tuple[str, str]:
    if isinstance(error, InternalSolveError):
        return error.status, error.error_code
    if isinstance(error, FlexcastError):
        return "error", error.error_code
    return "error", type(error).__name__


def run_day_job(job: DayJob) -> DayOutcome:
    """
    执行一个 (日期, 类别) 的所有单元

    BAU按 (策略, V2G) 只求解一次，供该日所有产品单元共享；单元失败不影响其它单元。
    """
    grid = TimeGrid.for_day(job.anchor_date)
    rows: List[Dict[str, Any]] = []
    excluded = considered = 0

    for position, v2g in enumerate(sorted({cell.v2g for cell in job.cells})):
        report = discretize_all(job.raws, grid, v2g)
        transactions = sample_day(report.transactions, grid)
        demand = np.array([tx.energy_kwh for tx in transactions])
        # 剔除与V2G设置无关，只统计一次
        if position == 0:
            day = grid.anchor_day_steps()
            excluded = sum(1 for ex in report.excluded if ex.arrive_step in day)
            considered = excluded + sum(1 for tx in report.transactions if tx.arrive_step in day)

        for strategy_kind in sorted({c.strategy for c in job.cells if c.v2g == v2g}, key=lambda s: s.value):
            cells = [c for c in job.cells if c.v2g == v2g and c.strategy is strategy_kind]
            try:
                strategy = BauStrategy.from_kind(strategy_kind, price=job.price, mef=job.mef)
                bau = schedule_bau(transactions, grid, strategy, job.solver)
                check_energy_conservation(bau.power_kw, demand, grid.dt_hours, ENERGY_TOLERANCE_KWH)
            except Exception as e:
                status, message = _failure(e)
                log_error(f"{job.anchor_date} {job.category} BAU {strategy_kind.value} 失败: {e}")
                rows.extend(_row(job, cell, status, len(transactions), message=message) for cell in cells)
                continue

            for cell in cells:
                try:
                    request = FlexRequest.from_clock(grid, cell.product, cell.window_start,
                                                     cell.window_len_h, cell.lead_h, v2g=v2g)
                    result = solve_product(bau, transactions, request, price=job.price, mef=job.mef,
                                           settings=job.solver, epsilon=job.epsilon)
                    check_energy_conservation(result.adjusted_schedule.power_kw, demand, grid.dt_hours,
                                              ENERGY_TOLERANCE_KWH)
                    rows.append(_row(job, cell, result.status.value, len(transactions),
                                     result.magnitude_kw, result.cost_delta, result.emission_delta))
                except Exception as e:
                    status, message = _failure(e)
                    log_warning(f"{job.anchor_date} {job.category} 单元失败 {cell}: {e}")
                    rows.append(_row(job, cell, status, len(transactions), message=message))

    return DayOutcome(rows=rows, excluded=excluded, considered=considered)


@dataclass
class SweepResult:
    table: pd.DataFrame
    metadata: Dict[str, Any]


class SweepManager:
    """批量实验管理器"""

    def __init__(self, config: SweepConfig, bus: Optional[EventBus] = None,
                 store: Optional[ResultStore] = None):
        self.config = config
        self.app_config = get_config()
        self.bus = bus or EventBus()
        self.store = store or ResultStore()
        self.raws: List[RawTransaction] = []
        self._arrivals: List = []
        self.price: Optional[SignalSeries] = None
        self.mef: Optional[SignalSeries] = None
        self.bus.on("task_progress", self._on_progress)

    def _on_progress(self, payload: Dict[str, Any]) -> None:
        log_progress(payload.get("done", 0), payload.get("total", 0), "扫描进度")

    def load_inputs(self) -> None:
        """读取输入并检查每个日期的信号覆盖；任何问题在求解前报出"""
        config = self.config
        if config.transactions_path:
            self.raws = parse_transactions(config.transactions_path)
        else:
            self.raws = generate_many(load_fleet_specs(config.fleet_path))
        self.raws.sort(key=lambda r: (r.arrival, r.station_id))
        self._arrivals = [r.arrival for r in self.raws]

        self.price = SignalSeries.from_csv(config.price_path, SignalKind.DAY_AHEAD_PRICE)
        self.mef = SignalSeries.from_csv(config.mef_path, SignalKind.MEF)
        for anchor in config.dates:
            grid = TimeGrid.for_day(anchor)
            self.price.for_grid(grid)
            self.mef.for_grid(grid)
        log_info(f"输入就绪: {len(self.raws)} 条记录, {len(config.dates)} 个日期")

    def _raws_for(self, grid: TimeGrid, category: str) -> List[RawTransaction]:
        """到达时间落在时域内的记录"""
        first = bisect.bisect_left(self._arrivals, grid.start)
        last = bisect.bisect_left(self._arrivals, grid.end)
        selected = self.raws[first:last]
        if category != ALL_CATEGORIES:
            wanted = ChargerCategory(category)
            selected = [r for r in selected if r.category is wanted]
        return selected

    def build_jobs(self) -> List[Job]:
        config = self.config
        cells = [
            Cell(strategy, product, lead, start, length, v2g)
            for strategy in config.strategies
            for product in config.products
            for lead in config.lead_times_h
            for start in config.window_starts
            for length in config.window_lens_h
            for v2g in config.v2g
        ]
        jobs = []
        for anchor in config.dates:
            grid = TimeGrid.for_day(anchor)
            price = self.price.for_grid(grid)
            mef = self.mef.for_grid(grid)
            for category in config.categories:
                payload = DayJob(
                    anchor_date=anchor,
                    category=category,
                    raws=self._raws_for(grid, category),
                    price=price,
                    mef=mef,
                    cells=cells,
                    solver=self.app_config.solver,
                    epsilon=self.app_config.flex.epsilon,
                )
                jobs.append(Job(id=f"{anchor.isoformat()}/{category}", name=f"{anchor} {category}",
                                fn=run_day_job, args=(payload,)))
        return jobs

    def run(self) -> SweepResult:
        """执行扫描，返回按键列排序的结果表与元数据"""
        config = self.config
        if self.price is None:
            self.load_inputs()

        jobs = self.build_jobs()
        payloads = {job.id: job.args[0] for job in jobs}
        log_info(f"开始扫描: {len(jobs)} 个任务, 每个日期 {config.cells_per_date} 个单元, "
                 f"并行度 {config.parallelism}")

        queue = JobQueue(self.bus, max_workers=config.parallelism, executor=config.executor)
        outcomes = queue.run_all(jobs)

        rows: List[Dict[str, Any]] = []
        excluded = considered = 0
        for job_id in sorted(outcomes):
            outcome = outcomes[job_id]
            if outcome.ok:
                rows.extend(outcome.result.rows)
                excluded += outcome.result.excluded
                considered += outcome.result.considered
            else:
                payload = payloads[job_id]
                status, message = _failure(outcome.error)
                log_error(f"任务 {job_id} 异常: {outcome.error}")
                rows.extend(_row(payload, cell, status, 0, message=message) for cell in payload.cells)

        table = pd.DataFrame(rows, columns=RESULT_COLUMNS)
        table = table.sort_values(RESULT_KEY_COLUMNS, kind='mergesort').reset_index(drop=True)
        metadata = self._metadata(table, excluded, considered)

        n_failed = int((table['status'] != 'optimal').sum())
        if n_failed:
            log_warning(f"扫描完成，{n_failed} 个单元未得到最优解")
        else:
            log_success(f"扫描完成: {len(table)} 行")
        return SweepResult(table=table, metadata=metadata)

    def _metadata(self, table: pd.DataFrame, excluded: int, considered: int) -> Dict[str, Any]:
        counts = table['status'].value_counts()
        return {
            "tool": "flexcast",
            "version": __version__,
            "config_hash": self.config.config_hash(),
            "n_dates": len(self.config.dates),
            "cells_per_date": self.config.cells_per_date,
            "n_rows": int(len(table)),
            "rows_by_status": {status: int(counts[status]) for status in sorted(counts.index)},
            "exclusions": {
                "excluded": int(excluded),
                "considered": int(considered),
                "rate": round(excluded / considered, 6) if considered else 0.0,
            },
        }

    def save(self, result: SweepResult, output: Optional[str] = None) -> str:
        path = self.store.write_results(result.table, output or self.config.output_path, result.metadata)
        return str(path)


def run_sweep(config: SweepConfig, output: Optional[str] = None, write: bool = True) -> SweepResult:
    """按配置执行完整扫描并（可选）写出结果"""
    manager = SweepManager(config)
    manager.load_inputs()
    result = manager.run()
    if write:
        manager.save(result, output)
    return result
