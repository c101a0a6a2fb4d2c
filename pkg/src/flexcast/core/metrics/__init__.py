"""
成本与峰值统计
"""

from .accounting import cost_increase_after_flex, daily_peak_by_hour, hourly_avg_cost, hourly_totals
