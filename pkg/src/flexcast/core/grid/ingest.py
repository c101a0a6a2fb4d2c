"""
Transaction ingestion - 充电记录读取、离散化与样本日抽取
"""

import io
from datetime import datetime
from typing import IO, Dict, Iterable, List, Sequence, Union

import pandas as pd

from .models import (
    FEASIBILITY_TOLERANCE,
    ChargerCategory,
    DiscretizationReport,
    Excluded,
    RawTransaction,
    TimeGrid,
    Transaction,
)
from ...config.constants import MAX_CONNECTION_STEPS, STEP_HOURS, TRANSACTION_COLUMNS
from ...utils.exceptions import ConfigError, HorizonError, TransactionParseError, ValidationError
from ...utils.logger import log_debug, log_error, log_info, log_warning

CsvSource = Union[str, bytes, IO[bytes], IO[str]]


def _open_text(source: CsvSource) -> IO[str]:
    """统一为文本流（字节流按UTF-8解码）"""
    if isinstance(source, bytes):
        return io.StringIO(source.decode('utf-8'))
    if isinstance(source, str):
        try:
            return open(source, 'r', encoding='utf-8', newline='')
        except OSError as e:
            log_error(f"无法读取输入文件: {source}", e)
            raise ConfigError(f"无法读取输入文件: {source}", details={"path": source})
    if isinstance(source, io.TextIOBase):
        return source
    return io.TextIOWrapper(source, encoding='utf-8', newline='')


def _parse_timestamp(value: str) -> datetime:
    ts = pd.Timestamp(value.strip())
    if pd.isna(ts):
        raise ValueError("空时间戳")
    if ts.tzinfo is not None:
        # 按本地挂钟时间解释
        ts = ts.tz_localize(None)
    return ts.to_pydatetime()


def _parse_row(line: int, row: Dict[str, str], errors: List[dict]) -> Union[RawTransaction, None]:
    """解析单行，错误追加到errors"""
    values = {}
    try:
        values['category'] = ChargerCategory(str(row['category']).strip().lower())
    except ValueError:
        errors.append({"line": line, "field": "category", "reason": f"未知类别 '{row['category']}'"})
        return None

    for name in ('arrival', 'departure'):
        try:
            values[name] = _parse_timestamp(str(row[name]))
        except (ValueError, TypeError):
            errors.append({"line": line, "field": name, "reason": f"无法解析时间戳 '{row[name]}'"})
            return None

    for name in ('energy_kwh', 'max_power_kw'):
        try:
            number = float(row[name])
        except (ValueError, TypeError):
            errors.append({"line": line, "field": name, "reason": f"不是数字 '{row[name]}'"})
            return None
        if number != number:
            errors.append({"line": line, "field": name, "reason": "缺失值"})
            return None
        values[name] = number

    station_id = str(row['station_id']).strip()
    if not station_id:
        errors.append({"line": line, "field": "station_id", "reason": "充电站编号为空"})
        return None

    try:
        return RawTransaction(station_id=station_id, **values)
    except ValidationError as e:
        errors.append({"line": line, "field": e.details["field"], "reason": e.details["reason"]})
        return None


def parse_transactions(source: CsvSource) -> List[RawTransaction]:
    """解析充电记录CSV，所有错误行一次性报告"""
    stream = _open_text(source)
    try:
        frame = pd.read_csv(stream, dtype=str, keep_default_na=False, skipinitialspace=True)
    except pd.errors.EmptyDataError:
        raise TransactionParseError([{"line": 1, "field": "header", "reason": "缺少表头"}])
    finally:
        if isinstance(source, str):
            stream.close()

    missing = [c for c in TRANSACTION_COLUMNS if c not in frame.columns]
    if missing:
        raise TransactionParseError([
            {"line": 1, "field": column, "reason": "缺少列"} for column in missing
        ])

    errors: List[dict] = []
    raws: List[RawTransaction] = []
    for position, row in enumerate(frame.to_dict(orient='records')):
        # 表头占第1行
        raw = _parse_row(position + 2, row, errors)
        if raw is not None:
            raws.append(raw)

    if errors:
        log_error(f"充电记录解析失败: {len(errors)} 行存在错误")
        raise TransactionParseError(errors)

    log_info(f"读取充电记录 {len(raws)} 条")
    return raws


def format_transactions(raws: Sequence[RawTransaction]) -> pd.DataFrame:
    """转换为CSV表结构"""
    return pd.DataFrame(
        [
            {
                'station_id': r.station_id,
                'category': r.category.value,
                'arrival': r.arrival.isoformat(timespec='seconds'),
                'departure': r.departure.isoformat(timespec='seconds'),
                'energy_kwh': f"{r.energy_kwh:.3f}",
                'max_power_kw': f"{r.max_power_kw:g}",
            }
            for r in raws
        ],
        columns=TRANSACTION_COLUMNS,
    )


def write_transactions(raws: Sequence[RawTransaction], dest: Union[str, IO[str]]) -> None:
    """按固定格式写出充电记录CSV"""
    format_transactions(raws).to_csv(dest, index=False, lineterminator='\n')


def discretize(raw: RawTransaction, grid: TimeGrid, v2g: bool,
               transaction_id: int = 0,
               max_steps: int = MAX_CONNECTION_STEPS) -> Union[Transaction, Excluded]:
    """将原始记录对齐到时间网格"""
    if not grid.contains(raw.arrival):
        raise HorizonError("arrival", raw.arrival.isoformat(), grid.n_steps)

    arrive_step = grid.round_to_step(raw.arrival)
    depart_step = grid.round_to_step(raw.departure)
    # 超过24小时的连接提前离开
    depart_step = min(depart_step, arrive_step + max_steps)
    duration = depart_step - arrive_step

    if duration <= 0:
        return Excluded(raw=raw, reason="zero_duration", arrive_step=arrive_step, depart_step=depart_step)
    if duration * STEP_HOURS * raw.max_power_kw + FEASIBILITY_TOLERANCE < raw.energy_kwh:
        return Excluded(raw=raw, reason="insufficient_connection_time",
                        arrive_step=arrive_step, depart_step=depart_step)

    return Transaction(
        id=transaction_id,
        category=raw.category,
        arrive_step=arrive_step,
        depart_step=depart_step,
        energy_kwh=raw.energy_kwh,
        p_max_kw=raw.max_power_kw,
        p_min_kw=-raw.max_power_kw if v2g else 0.0,
        station_id=raw.station_id,
        arrival=raw.arrival,
    )


def discretize_all(raws: Iterable[RawTransaction], grid: TimeGrid, v2g: bool) -> DiscretizationReport:
    """批量离散化；时域外的记录计数后跳过"""
    report = DiscretizationReport()
    next_id = 0
    for raw in raws:
        if not grid.contains(raw.arrival):
            report.out_of_horizon += 1
            continue
        result = discretize(raw, grid, v2g, transaction_id=next_id)
        next_id += 1
        if isinstance(result, Excluded):
            report.excluded.append(result)
        else:
            report.transactions.append(result)

    if report.excluded:
        log_warning(
            f"{grid.anchor_date} 剔除 {len(report.excluded)} 条不可行记录 "
            f"({report.exclusion_rate:.3%})"
        )
    log_debug(f"{grid.anchor_date} 离散化 {len(report.transactions)} 条记录")
    return report


def sample_day(transactions: Iterable[Transaction], grid: TimeGrid) -> List[Transaction]:
    """
    抽取到达时间在样本日及前一天的记录，按(到达步, id)排序

    有原始到达时刻时按时刻判断，23:53 这类舍入到次日零点的到达仍属原日期
    """
    first = grid.start_offset_steps - grid.steps_per_day
    last = grid.start_offset_steps + grid.steps_per_day
    opens, closes = grid.step_start(first), grid.step_start(last)

    def arrives_in_sample(t: Transaction) -> bool:
        if t.arrival is not None:
            return opens <= t.arrival < closes
        return first <= t.arrive_step < last

    selected = [t for t in transactions if arrives_in_sample(t)]
    return sorted(selected, key=lambda t: (t.arrive_step, t.id))
