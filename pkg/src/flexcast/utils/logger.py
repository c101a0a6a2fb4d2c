"""
Unified logging system for FlexCast
"""

import logging
import os
import sys
from datetime import datetime
from pathlib import Path
from typing import Optional


class FlexcastLogger:
    """统一日志系统"""

    def __init__(self, name: str = "FlexCast"):
        self.logger = logging.getLogger(name)
        self.logger.setLevel(logging.DEBUG)
        self.logger.propagate = False

        # 避免重复添加handler
        if not self.logger.handlers:
            self._setup_console_handler()

    def _formatter(self) -> logging.Formatter:
        return logging.Formatter(
            '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        )

    def _setup_console_handler(self) -> None:
        """设置控制台处理器（输出到stderr，保持stdout干净）"""
        console_handler = logging.StreamHandler(sys.stderr)
        debug = os.environ.get("FLEXCAST_DEBUG") == "1"
        console_handler.setLevel(logging.DEBUG if debug else logging.INFO)
        console_handler.setFormatter(self._formatter())
        self.logger.addHandler(console_handler)

    def configure(self, level: str = "INFO", log_dir: str = "") -> None:
        """根据配置调整控制台级别，并可选开启文件日志"""
        for handler in self.logger.handlers:
            if isinstance(handler, logging.StreamHandler) and not isinstance(handler, logging.FileHandler):
                handler.setLevel(getattr(logging, level.upper(), logging.INFO))

        if not log_dir:
            return
        if any(isinstance(h, logging.FileHandler) for h in self.logger.handlers):
            return
        try:
            path = Path(log_dir)
            path.mkdir(parents=True, exist_ok=True)
            file_handler = logging.FileHandler(
                path / f"flexcast_{datetime.now().strftime('%Y%m%d')}.log",
                encoding='utf-8'
            )
            file_handler.setLevel(logging.DEBUG)
            file_handler.setFormatter(self._formatter())
            self.logger.addHandler(file_handler)
        except OSError as e:
            self.logger.warning(f"文件日志初始化失败: {e}")

    def debug(self, message: str) -> None:
        """调试日志"""
        self.logger.debug(message)

    def info(self, message: str) -> None:
        """信息日志"""
        self.logger.info(message)

    def warning(self, message: str) -> None:
        """警告日志"""
        self.logger.warning(message)

    def error(self, message: str, exception: Optional[Exception] = None) -> None:
        """错误日志"""
        if exception:
            message = f"{message}: {exception}"
        self.logger.error(message)

    def success(self, message: str) -> None:
        """成功日志"""
        self.logger.info(f"SUCCESS: {message}")

    def progress(self, current: int, total: int, message: str) -> None:
        """进度日志"""
        percentage = round(current / total * 100) if total > 0 else 0
        progress_bar = "█" * (percentage // 5) + "░" * (20 - percentage // 5)
        self.logger.info(f"PROGRESS: [{progress_bar}] {percentage}% - {message}")


# 全局日志实例
logger = FlexcastLogger()


def get_logger() -> FlexcastLogger:
    """获取日志实例"""
    return logger


def log_debug(message: str) -> None:
    """快捷调试日志"""
    logger.debug(message)


def log_info(message: str) -> None:
    """快捷信息日志"""
    logger.info(message)


def log_warning(message: str) -> None:
    """快捷警告日志"""
    logger.warning(message)


def log_error(message: str, exception: Optional[Exception] = None) -> None:
    """快捷错误日志"""
    logger.error(message, exception)


def log_success(message: str) -> None:
    """快捷成功日志"""
    logger.success(message)


def log_progress(current: int, total: int, message: str) -> None:
    """快捷进度日志"""
    logger.progress(current, total, message)
