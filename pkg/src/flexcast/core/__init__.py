"""
Core business logic modules
"""

from .grid import *
from .signals import *
from .optimization import *
from .scheduling import *
from .flexibility import *
from .fleet import *
from .metrics import *
from .sweep import *
