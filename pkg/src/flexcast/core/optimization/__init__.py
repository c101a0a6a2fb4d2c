"""
线性规划核心与穷举校验
"""

from .lp_core import (
    ConstraintBlock,
    LinearProgram,
    Relation,
    Sense,
    Solution,
    SolverStatus,
    VariableLayout,
    build_feasibility,
    solve,
)
from .oracle import OracleKind, OracleObjective, brute_force_oracle, enumerate_profiles, quantization_bound
