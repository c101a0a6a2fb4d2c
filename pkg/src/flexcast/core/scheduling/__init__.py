"""
BAU调度
"""

from .models import BauStrategy, BauStrategyKind, Schedule
from .bau import (
    aggregate_profile,
    energy_coefficients,
    schedule_bau,
    schedule_cost,
    schedule_emissions,
    schedule_from_solution,
    signal_coefficients,
    strategy_objective,
)
