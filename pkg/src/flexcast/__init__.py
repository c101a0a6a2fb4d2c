"""
FlexCast - EV充电集群拥塞管理灵活性仿真引擎

Simulates how much redispatch and capacity-limitation flexibility an EV charging
fleet can offer a distribution grid operator, given price/emission signals and lead time.
"""

__version__ = "1.0.0"
__author__ = "FlexCast Team"

from .core import *
