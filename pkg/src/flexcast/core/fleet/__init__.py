"""
合成车队
"""

from .models import FleetSpec, LogNormalParams, default_mix_specs, load_fleet_specs
from .generator import generate, generate_many, truncated_lognormal
