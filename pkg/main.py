#!/usr/bin/env python3
"""
FlexCast - EV充电集群拥塞管理灵活性仿真引擎

统一入口文件
"""

import sys
from pathlib import Path

# 添加src路径到Python路径
src_path = Path(__file__).parent / "src"
sys.path.insert(0, str(src_path))

from flexcast.main import main


if __name__ == "__main__":
    sys.exit(main())
