"""
Result store - 扫描结果CSV与JSON元数据
"""

import json
from pathlib import Path
from typing import Any, Dict, Optional, Union

import pandas as pd

from ..config import get_config
from ..config.constants import RESULT_COLUMNS
from ..utils.exceptions import StorageError
from ..utils.logger import log_error, log_info

PathLike = Union[str, Path]


class ResultStore:
    """结果表与元数据的读写"""

    def __init__(self, float_format: Optional[str] = None, metadata_suffix: Optional[str] = None):
        config = get_config()
        self.float_format = float_format or config.sweep.float_format
        self.metadata_suffix = metadata_suffix or config.storage.metadata_suffix

    def default_output(self, name: str) -> Path:
        """工作区下的默认结果路径"""
        config = get_config()
        return Path(config.storage.workspace_root) / config.storage.results_dir / name

    def metadata_path(self, output: PathLike) -> Path:
        """<output>.meta.json（替换扩展名）"""
        return Path(output).with_suffix(self.metadata_suffix)

    def write_table(self, table: pd.DataFrame, output: PathLike) -> Path:
        """写出CSV，浮点数固定格式"""
        path = Path(output)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            table.to_csv(path, index=False, float_format=self.float_format, lineterminator='\n')
        except OSError as e:
            log_error(f"写出结果失败: {path}", e)
            raise StorageError(f"写出结果失败: {e}", details={"path": str(path)})
        return path

    def write_metadata(self, metadata: Dict[str, Any], output: PathLike) -> Path:
        path = self.metadata_path(output)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, 'w', encoding='utf-8', newline='\n') as f:
                json.dump(metadata, f, ensure_ascii=False, indent=2, sort_keys=True)
                f.write('\n')
        except OSError as e:
            log_error(f"写出元数据失败: {path}", e)
            raise StorageError(f"写出元数据失败: {e}", details={"path": str(path)})
        return path

    def write_results(self, table: pd.DataFrame, output: PathLike, metadata: Dict[str, Any]) -> Path:
        """写出结果表及其元数据"""
        path = self.write_table(table, output)
        self.write_metadata(metadata, output)
        log_info(f"结果已保存: {path} ({len(table)} 行)")
        return path

    def load_results(self, output: PathLike) -> pd.DataFrame:
        """读取扫描结果表"""
        path = Path(output)
        if not path.exists():
            raise StorageError(f"结果文件不存在: {path}", details={"path": str(path)})
        try:
            table = pd.read_csv(path, dtype={'date': str, 'category': str, 'bau': str, 'product': str,
                                             'window_start': str, 'status': str, 'message': str})
        except (OSError, ValueError) as e:
            raise StorageError(f"读取结果失败: {e}", details={"path": str(path)})

        missing = [c for c in RESULT_COLUMNS if c not in table.columns]
        if missing:
            raise StorageError(f"结果文件缺少列: {', '.join(missing)}", details={"path": str(path)})
        table['message'] = table['message'].fillna('')
        table['v2g'] = table['v2g'].astype(str).str.lower() == 'true'
        return table

    def load_metadata(self, output: PathLike) -> Dict[str, Any]:
        path = self.metadata_path(output)
        try:
            with open(path, 'r', encoding='utf-8') as f:
                return json.load(f)
        except (OSError, ValueError) as e:
            raise StorageError(f"读取元数据失败: {e}", details={"path": str(path)})
