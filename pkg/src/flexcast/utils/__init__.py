"""
Utility modules
"""

from .exceptions import *
from .logger import *
from .validators import *
