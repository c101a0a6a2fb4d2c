"""
Configuration management system
"""

from .settings import AppConfig, FlexSettings, SolverSettings, get_config, load_config, set_config
from .constants import *
