"""
Custom exception classes for FlexCast
"""

from typing import Any, Dict, List, Optional


class FlexcastError(Exception):
    """Base exception class for FlexCast"""

    def __init__(self, message: str, error_code: Optional[str] = None, details: Optional[dict] = None):
        super().__init__(message)
        self.message = message
        self.error_code = error_code or "UNKNOWN_ERROR"
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        """转换为机器可读的字典"""
        return {
            "error_code": self.error_code,
            "message": self.message,
            "details": self.details,
        }


class ValidationError(FlexcastError):
    """验证错误"""

    def __init__(self, field: str, value: Any, reason: str):
        super().__init__(
            f"验证失败 {field}='{value}': {reason}",
            error_code="VALIDATION_ERROR",
            details={"field": field, "value": str(value), "reason": reason}
        )


class ConfigError(FlexcastError):
    """配置相关错误"""

    def __init__(self, message: str, details: Optional[dict] = None):
        super().__init__(message, error_code="CONFIG_ERROR", details=details)


class TransactionParseError(FlexcastError):
    """充电记录CSV解析错误"""

    def __init__(self, errors: List[Dict[str, Any]]):
        first = errors[0] if errors else {}
        super().__init__(
            f"充电记录解析失败，共 {len(errors)} 处错误，首个错误: "
            f"第{first.get('line')}行 字段'{first.get('field')}': {first.get('reason')}",
            error_code="TRANSACTION_PARSE_ERROR",
            details={"errors": errors}
        )
        self.errors = errors


class HorizonError(FlexcastError):
    """超出优化时域"""

    def __init__(self, what: str, step: Any, n_steps: int):
        super().__init__(
            f"{what} 超出时域范围: {step} (时域步数 {n_steps})",
            error_code="OUT_OF_HORIZON",
            details={"what": what, "step": str(step), "n_steps": n_steps}
        )


class SignalError(FlexcastError):
    """价格/排放信号相关错误"""
    pass


class MissingIntervalError(SignalError):
    """信号覆盖不完整"""

    def __init__(self, kind: str, gaps: List[Dict[str, str]]):
        super().__init__(
            f"信号 {kind} 缺少 {len(gaps)} 个时间区间",
            error_code="MISSING_INTERVAL",
            details={"kind": kind, "gaps": gaps}
        )
        self.gaps = gaps


class DuplicateTimestampError(SignalError):
    """信号时间戳重复"""

    def __init__(self, kind: str, timestamps: List[str]):
        super().__init__(
            f"信号 {kind} 存在重复时间戳: {', '.join(timestamps[:5])}",
            error_code="DUPLICATE_TIMESTAMP",
            details={"kind": kind, "timestamps": timestamps}
        )


class SolverError(FlexcastError):
    """求解器相关错误"""
    pass


class InternalSolveError(SolverError):
    """理论上可行的问题求解失败"""

    def __init__(self, message: str, status: str, details: Optional[dict] = None):
        merged = {"status": status}
        merged.update(details or {})
        super().__init__(message, error_code="INTERNAL_SOLVE_ERROR", details=merged)
        self.status = status


class OracleLimitError(SolverError):
    """穷举规模超限"""

    def __init__(self, reason: str, size: int, limit: int):
        super().__init__(
            f"穷举校验拒绝执行: {reason} ({size} > {limit})",
            error_code="ORACLE_LIMIT",
            details={"reason": reason, "size": size, "limit": limit}
        )


class PairingError(FlexcastError):
    """调度方案配对失败"""

    def __init__(self, missing: List[str]):
        super().__init__(
            f"以下日期的调度方案无法配对: {', '.join(missing)}",
            error_code="PAIRING_ERROR",
            details={"dates": missing}
        )


class StorageError(FlexcastError):
    """存储相关错误"""

    def __init__(self, message: str, details: Optional[dict] = None):
        super().__init__(message, error_code="STORAGE_ERROR", details=details)
