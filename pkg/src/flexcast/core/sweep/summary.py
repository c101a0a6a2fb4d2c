"""
Sweep summary - 灵活性分布统计与提前量配对差值
"""

from typing import List, Optional, Sequence

import numpy as np
import pandas as pd

from ..flexibility.models import FlexProduct
from ...config.constants import RESULT_KEY_COLUMNS, SUMMARY_QUANTILES
from ...config.settings import get_config
from ...utils.exceptions import ConfigError, ValidationError
from ...utils.logger import log_info

_ALL = "_all"


def _quantile_name(q: float) -> str:
    return f"q{int(round(q * 100)):02d}"


def _paired_lead_deltas(rows: pd.DataFrame, short_h: float, long_h: float) -> pd.DataFrame:
    """
    按除提前量外的全部键配对，返回 c(long) - c(short) 及面向产品的下降量

    再调度：c(long) - c(short)；容量限制：c(short) - c(long)
    """
    pair_keys = [k for k in RESULT_KEY_COLUMNS if k != 'lead_h']
    short = rows[np.isclose(rows['lead_h'], short_h)][pair_keys + ['magnitude_kw']]
    long = rows[np.isclose(rows['lead_h'], long_h)][pair_keys + ['magnitude_kw']]
    paired = short.merge(long, on=pair_keys, suffixes=('_short', '_long'))
    paired['lead_delta'] = paired['magnitude_kw_long'] - paired['magnitude_kw_short']
    sign = np.where(paired['product'] == FlexProduct.REDISPATCH.value, 1.0, -1.0)
    paired['lead_reduction'] = sign * paired['lead_delta']
    return paired


def summarize(table: pd.DataFrame, group_by: Sequence[str],
              short_lead_h: Optional[float] = None,
              long_lead_h: Optional[float] = None) -> pd.DataFrame:
    """
    按 group_by 汇总 magnitude_kw（只统计 optimal 行）

    Returns:
        每组 count/mean/std/min/max/分位数，以及提前量配对差值
        lead_delta_mean = mean(c(长提前量) - c(短提前量))，lead_reduction_mean 按产品取向
        提前量缺省取配置 flex 节的研究范围两端
    """
    if table is None or len(table) == 0:
        raise ValidationError("results", 0, "结果表为空")

    keys: List[str] = list(group_by)
    unknown = [k for k in keys if k not in table.columns]
    if unknown:
        raise ConfigError(f"未知的分组键: {', '.join(unknown)}",
                          details={"unknown": unknown, "columns": list(table.columns)})

    flex = get_config().flex
    short_lead_h = flex.min_lead_time_h if short_lead_h is None else short_lead_h
    long_lead_h = flex.max_lead_time_h if long_lead_h is None else long_lead_h

    rows = table[table['status'] == 'optimal'].copy()
    if not keys:
        rows[_ALL] = _ALL
        keys = [_ALL]

    grouped = rows.groupby(keys, sort=True, dropna=False)['magnitude_kw']
    summary = grouped.agg(['count', 'mean', 'std', 'min', 'max'])
    for q in SUMMARY_QUANTILES:
        summary[_quantile_name(q)] = grouped.quantile(q)

    summary['lead_delta_mean'] = np.nan
    summary['lead_reduction_mean'] = np.nan
    pairable = set(RESULT_KEY_COLUMNS) - {'lead_h'} | {_ALL}
    if len(rows) and all(k in pairable for k in keys):
        paired = _paired_lead_deltas(rows, short_lead_h, long_lead_h)
        if _ALL in keys:
            paired[_ALL] = _ALL
        if len(paired):
            deltas = paired.groupby(keys, sort=True, dropna=False)[['lead_delta', 'lead_reduction']].mean()
            summary['lead_delta_mean'] = deltas['lead_delta'].reindex(summary.index)
            summary['lead_reduction_mean'] = deltas['lead_reduction'].reindex(summary.index)

    summary = summary.reset_index()
    if _ALL in summary.columns:
        summary = summary.drop(columns=[_ALL])
    summary['count'] = summary['count'].astype(int)
    log_info(f"汇总 {len(rows)} 行 optimal 结果为 {len(summary)} 组")
    return summary
