"""
Application configuration management
"""

import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .constants import DEFAULT_EPSILON, LEAD_TIME_RANGE_H, RESIDUAL_TOLERANCE


@dataclass
class SolverSettings:
    """LP求解器配置"""
    # highs-ds: 对偶单纯形，枢轴规则确定
    method: str = "highs-ds"
    presolve: bool = True
    time_limit: float = 600.0
    primal_feasibility_tolerance: float = 1e-7
    dual_feasibility_tolerance: float = 1e-7
    residual_tolerance: float = RESIDUAL_TOLERANCE


@dataclass
class FlexSettings:
    """灵活性产品配置"""
    epsilon: float = DEFAULT_EPSILON
    min_lead_time_h: float = LEAD_TIME_RANGE_H[0]
    max_lead_time_h: float = LEAD_TIME_RANGE_H[1]


@dataclass
class SweepSettings:
    """批量扫描配置"""
    parallelism: int = 1
    executor: str = "process"  # process, thread
    float_format: str = "%.6f"


@dataclass
class StorageSettings:
    """存储配置"""
    workspace_root: str = "./workspace"
    results_dir: str = "results"
    metadata_suffix: str = ".meta.json"


@dataclass
class LoggingSettings:
    """日志配置"""
    level: str = "INFO"
    log_dir: str = ""


@dataclass
class AppConfig:
    """应用主配置"""
    solver: SolverSettings = field(default_factory=SolverSettings)
    flex: FlexSettings = field(default_factory=FlexSettings)
    sweep: SweepSettings = field(default_factory=SweepSettings)
    storage: StorageSettings = field(default_factory=StorageSettings)
    logging: LoggingSettings = field(default_factory=LoggingSettings)


_SECTIONS = {
    'solver': SolverSettings,
    'flex': FlexSettings,
    'sweep': SweepSettings,
    'storage': StorageSettings,
    'logging': LoggingSettings,
}

# 全局配置实例
_config: Optional[AppConfig] = None


def get_config() -> AppConfig:
    """获取全局配置"""
    global _config
    if _config is None:
        _config = load_config()
    return _config


def set_config(config: AppConfig) -> None:
    """替换全局配置（CLI --config 与测试使用）"""
    global _config
    _config = config


def load_config(config_path: Optional[str] = None) -> AppConfig:
    """加载配置文件"""
    if config_path is None:
        config_path = get_config_path()

    config = AppConfig()

    if os.path.exists(config_path):
        try:
            with open(config_path, 'r', encoding='utf-8') as f:
                data = json.load(f)

            for name, section_cls in _SECTIONS.items():
                if name in data:
                    setattr(config, name, section_cls(**data[name]))

        except (OSError, ValueError, TypeError) as e:
            # 日志系统依赖配置，这里直接输出到stderr
            print(f"Warning: Failed to load config from {config_path}: {e}", file=sys.stderr)
            print("Using default configuration", file=sys.stderr)

    return config


def get_config_path() -> str:
    """获取配置文件路径"""
    env_path = os.environ.get("FLEXCAST_CONFIG")
    if env_path:
        return env_path
    return os.path.join(get_app_data_dir(), "config.json")


def get_app_data_dir() -> str:
    """获取应用数据目录"""
    # 使用程序根目录存储配置文件
    program_dir = Path(__file__).parent.parent.parent
    return str(program_dir / "config")

