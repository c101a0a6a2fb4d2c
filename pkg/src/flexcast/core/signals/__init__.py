"""
价格与排放信号
"""

from .models import Signal, SignalKind
from .loader import SignalSeries, load_signal
