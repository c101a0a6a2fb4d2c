"""
Data storage modules
"""

from .results import ResultStore
