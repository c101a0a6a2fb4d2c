"""
批量实验
"""

from .config import ALL_CATEGORIES, SweepConfig
from .runner import Cell, DayJob, DayOutcome, SweepManager, SweepResult, run_day_job, run_sweep
from .summary import summarize
