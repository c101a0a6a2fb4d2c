"""
拥塞管理灵活性产品
"""

from .models import FlexProduct, FlexRequest, FlexResult
from .products import freeze_step, solve_capacity_limit, solve_product, solve_redispatch
