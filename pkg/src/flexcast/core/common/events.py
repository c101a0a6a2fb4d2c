"""
Events and Job Queue - 事件总线和任务队列
"""

import threading
from collections import defaultdict
from concurrent.futures import Executor, Future, ProcessPoolExecutor, ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence


class EventBus:
    """
    事件总线，用于组件间解耦通信
    """
    def __init__(self) -> None:
        self._subs: Dict[str, List[Callable[[Any], None]]] = defaultdict(list)
        self._lock = threading.Lock()

    def on(self, topic: str, handler: Callable[[Any], None]) -> None:
        """
        订阅事件

        Args:
            topic: 事件主题
            handler: 事件处理函数
        """
        with self._lock:
            self._subs[topic].append(handler)

    def emit(self, topic: str, payload: Any = None) -> None:
        """
        发布事件

        Args:
            topic: 事件主题
            payload: 事件负载数据
        """
        with self._lock:
            handlers = list(self._subs.get(topic, []))
        for h in handlers:
            try:
                h(payload)
            except Exception:
                # 不让单个订阅者的异常拖垮总线
                pass


@dataclass
class Job:
    """
    任务定义

    fn 与 args 需可被pickle（进程池执行）
    """
    id: str
    name: str
    fn: Callable[..., Any]
    args: Sequence[Any] = field(default_factory=tuple)


@dataclass
class JobOutcome:
    """任务结果：result 与 error 二者其一"""
    job_id: str
    result: Any = None
    error: Optional[BaseException] = None

    @property
    def ok(self) -> bool:
        return self.error is None


class JobQueue:
    """
    任务队列，在进程池或线程池中并行执行任务；max_workers <= 1 时在当前线程顺序执行
    """
    def __init__(self, bus: EventBus, max_workers: int = 1, executor: str = "process") -> None:
        """
        初始化任务队列

        Args:
            bus: 事件总线实例
            max_workers: 最大并发数
            executor: process 或 thread
        """
        if executor not in ("process", "thread"):
            raise ValueError(f"未知的执行器类型: {executor}")
        self.bus = bus
        self.max_workers = max(1, int(max_workers))
        self.executor = executor

    def _make_pool(self) -> Executor:
        if self.executor == "thread":
            return ThreadPoolExecutor(max_workers=self.max_workers)
        return ProcessPoolExecutor(max_workers=self.max_workers)

    def _finish(self, job: Job, outcome: JobOutcome, done: int, total: int) -> None:
        if outcome.ok:
            self.bus.emit("task_state", {"id": job.id, "state": "COMPLETED", "name": job.name})
        else:
            self.bus.emit("task_state", {"id": job.id, "state": "FAILED", "name": job.name,
                                         "error": str(outcome.error)})
        self.bus.emit("task_progress", {"id": job.id, "done": done, "total": total})

    def run_all(self, jobs: Sequence[Job]) -> Dict[str, JobOutcome]:
        """
        执行全部任务并收集结果

        Returns:
            Dict[str, JobOutcome]: 以任务ID为键，与完成顺序无关
        """
        outcomes: Dict[str, JobOutcome] = {}
        total = len(jobs)
        for job in jobs:
            self.bus.emit("task_state", {"id": job.id, "state": "QUEUED", "name": job.name})

        if self.max_workers <= 1 or total <= 1:
            for done, job in enumerate(jobs, start=1):
                self.bus.emit("task_state", {"id": job.id, "state": "RUNNING", "name": job.name})
                try:
                    outcome = JobOutcome(job.id, result=job.fn(*job.args))
                except Exception as e:
                    outcome = JobOutcome(job.id, error=e)
                outcomes[job.id] = outcome
                self._finish(job, outcome, done, total)
            return outcomes

        by_future: Dict[Future, Job] = {}
        with self._make_pool() as pool:
            for job in jobs:
                future = pool.submit(job.fn, *job.args)
                by_future[future] = job
                self.bus.emit("task_state", {"id": job.id, "state": "RUNNING", "name": job.name})

            for done, future in enumerate(as_completed(by_future), start=1):
                job = by_future[future]
                try:
                    outcome = JobOutcome(job.id, result=future.result())
                except Exception as e:
                    outcome = JobOutcome(job.id, error=e)
                outcomes[job.id] = outcome
                self._finish(job, outcome, done, total)

        return outcomes
