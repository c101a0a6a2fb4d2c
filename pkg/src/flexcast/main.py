"""
FlexCast 命令行入口

子命令: synth, bau, flex, sweep, summarize, metrics
失败时在stderr输出 {"error_code", "message", "details"}，FlexcastError 退出码2，其它异常退出码1。
"""

import argparse
import json
import os
import sys
from datetime import date, timedelta
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from . import __version__
from .config import get_config, load_config, set_config
from .core.fleet import default_mix_specs, generate_many, load_fleet_specs
from .core.flexibility import FlexProduct, FlexRequest, solve_product
from .core.grid import ChargerCategory, TimeGrid, Transaction, discretize_all, parse_transactions, sample_day
from .core.grid.ingest import write_transactions
from .core.metrics import cost_increase_after_flex, daily_peak_by_hour, hourly_avg_cost
from .core.optimization import build_feasibility
from .core.scheduling import (
    BauStrategy,
    BauStrategyKind,
    Schedule,
    schedule_bau,
    schedule_cost,
    schedule_emissions,
    strategy_objective,
)
from .core.signals import Signal, SignalKind, SignalSeries
from .core.sweep import SweepConfig, SweepManager, summarize
from .storage import ResultStore
from .utils.exceptions import ConfigError, FlexcastError
from .utils.logger import get_logger, log_info


def _parse_date(value: str) -> date:
    try:
        return date.fromisoformat(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"日期格式应为 YYYY-MM-DD: {value}")


def _add_day_inputs(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--transactions', required=True, help='充电记录CSV')
    parser.add_argument('--price', required=True, help='日前电价CSV (timestamp,value)')
    parser.add_argument('--mef', required=True, help='边际排放因子CSV (timestamp,value)')
    parser.add_argument('--bau', default='cost', help='BAU策略: cost|mef|unopt')
    parser.add_argument('--v2g', action='store_true', help='允许双向充电')
    parser.add_argument('--category', default='all', help='充电站类别筛选 (residential|commercial|shared|all)')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='flexcast', description='FlexCast - EV充电集群拥塞管理灵活性仿真引擎')
    parser.add_argument('--version', action='version', version=f'flexcast {__version__}')
    parser.add_argument('--config', '-c', help='指定配置文件路径')
    parser.add_argument('--debug', '-d', action='store_true', help='启用调试模式')
    sub = parser.add_subparsers(dest='command', required=True)

    synth = sub.add_parser('synth', help='生成合成充电记录')
    source = synth.add_mutually_exclusive_group(required=True)
    source.add_argument('--spec', help='车队TOML配置 ([[fleet]] 表)')
    source.add_argument('--stations', type=int, help='按默认类别占比生成的充电站总数')
    synth.add_argument('--start', type=_parse_date, help='起始日期（配合 --stations）')
    synth.add_argument('--end', type=_parse_date, help='结束日期（配合 --stations）')
    synth.add_argument('--seed', type=int, default=0, help='随机种子（配合 --stations）')
    synth.add_argument('--out', required=True, help='输出CSV')

    bau = sub.add_parser('bau', help='计算单日BAU调度')
    _add_day_inputs(bau)
    bau.add_argument('--date', required=True, type=_parse_date, help='样本日 YYYY-MM-DD')
    bau.add_argument('--out', help='调度方案CSV (transaction_id,step,power_kw)')
    bau.add_argument('--lp-dump', help='导出LP文本')

    flex = sub.add_parser('flex', help='计算单日灵活性产品')
    _add_day_inputs(flex)
    flex.add_argument('--date', required=True, type=_parse_date, help='样本日 YYYY-MM-DD')
    flex.add_argument('--product', required=True, help='redispatch|caplimit')
    flex.add_argument('--lead-h', required=True, type=float, help='提前量（小时）')
    flex.add_argument('--window-start', required=True, help='窗口起点 HH:MM（样本日）')
    flex.add_argument('--window-len-h', required=True, type=float, help='窗口长度（小时）')
    flex.add_argument('--out', help='调整后调度方案CSV')

    sweep = sub.add_parser('sweep', help='批量实验')
    sweep.add_argument('--config', dest='sweep_config', required=True, help='扫描TOML配置')
    sweep.add_argument('--output', help='覆盖配置中的输出路径')
    sweep.add_argument('--parallelism', type=int, help='覆盖配置中的并行度')

    summary = sub.add_parser('summarize', help='汇总扫描结果')
    summary.add_argument('--results', required=True, help='扫描结果CSV')
    summary.add_argument('--group-by', default='product,bau,v2g', help='逗号分隔的分组键')
    summary.add_argument('--out', help='输出CSV（缺省输出到stdout）')

    metrics = sub.add_parser('metrics', help='小时平均成本与日峰值')
    _add_day_inputs(metrics)
    metrics.add_argument('--start', required=True, type=_parse_date, help='起始样本日')
    metrics.add_argument('--end', required=True, type=_parse_date, help='结束样本日')
    metrics.add_argument('--out-dir', required=True, help='输出目录')
    metrics.add_argument('--product', help='另输出交付该产品后的小时平均成本变化: redispatch|caplimit')
    metrics.add_argument('--lead-h', type=float, help='提前量（小时，配合 --product）')
    metrics.add_argument('--window-start', help='窗口起点 HH:MM（配合 --product）')
    metrics.add_argument('--window-len-h', type=float, help='窗口长度（小时，配合 --product）')
    return parser


def _load_series(args) -> Tuple[SignalSeries, SignalSeries]:
    return (SignalSeries.from_csv(args.price, SignalKind.DAY_AHEAD_PRICE),
            SignalSeries.from_csv(args.mef, SignalKind.MEF))


def _day_instance(raws, grid: TimeGrid, category: str, v2g: bool) -> List[Transaction]:
    if category != 'all':
        try:
            wanted = ChargerCategory(category)
        except ValueError:
            raise ConfigError(f"未知的充电站类别: {category}")
        raws = [r for r in raws if r.category is wanted]
    report = discretize_all(raws, grid, v2g)
    return sample_day(report.transactions, grid)


def _bau_for_day(raws, series: Tuple[SignalSeries, SignalSeries], anchor: date,
                 args) -> Tuple[TimeGrid, List[Transaction], Signal, Signal, Schedule]:
    grid = TimeGrid.for_day(anchor)
    price, mef = series[0].for_grid(grid), series[1].for_grid(grid)
    transactions = _day_instance(raws, grid, args.category, args.v2g)
    strategy = BauStrategy.from_kind(BauStrategyKind.from_alias(args.bau), price=price, mef=mef)
    return grid, transactions, price, mef, schedule_bau(transactions, grid, strategy)


def _emit(payload: dict) -> None:
    print(json.dumps(payload, ensure_ascii=False, sort_keys=True))


def cmd_synth(args) -> int:
    if args.spec:
        specs = load_fleet_specs(args.spec)
    else:
        if args.start is None or args.end is None:
            raise ConfigError("--stations 需要同时指定 --start 与 --end")
        specs = default_mix_specs(args.stations, args.start, args.end, args.seed)
    raws = generate_many(specs)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    write_transactions(raws, args.out)
    _emit({"transactions": len(raws), "out": args.out})
    return 0


def cmd_bau(args) -> int:
    raws = parse_transactions(args.transactions)
    grid, transactions, price, mef, schedule = _bau_for_day(raws, _load_series(args), args.date, args)

    if args.lp_dump:
        lp = build_feasibility(transactions, grid)
        lp.set_objective(*strategy_objective(schedule.strategy, lp.layout, grid))
        Path(args.lp_dump).write_text(lp.to_lp_text(), encoding='utf-8')
    if args.out:
        schedule.to_csv(args.out, float_format=get_config().sweep.float_format)

    _emit({
        "date": args.date.isoformat(),
        "bau": schedule.strategy.kind.value,
        "v2g": args.v2g,
        "n_transactions": len(transactions),
        "objective": schedule.objective_value,
        "cost_eur": schedule_cost(schedule, price),
        "emissions_kg": schedule_emissions(schedule, mef),
    })
    return 0


def cmd_flex(args) -> int:
    raws = parse_transactions(args.transactions)
    grid, transactions, price, mef, bau = _bau_for_day(raws, _load_series(args), args.date, args)
    request = FlexRequest.from_clock(grid, FlexProduct.from_alias(args.product), args.window_start,
                                     args.window_len_h, args.lead_h, v2g=args.v2g)
    result = solve_product(bau, transactions, request, price=price, mef=mef)
    if args.out and result.adjusted_schedule is not None:
        result.adjusted_schedule.to_csv(args.out, float_format=get_config().sweep.float_format)

    _emit({
        "date": args.date.isoformat(),
        "product": result.product.value,
        "bau": bau.strategy.kind.value,
        "v2g": args.v2g,
        "window_start": args.window_start,
        "window_len": args.window_len_h,
        "lead_h": args.lead_h,
        "magnitude_kw": result.magnitude_kw,
        "cost_delta": result.cost_delta,
        "emission_delta": result.emission_delta,
        "status": result.status.value,
        "freeze_step": result.freeze_step,
        "epsilon_ratio": result.epsilon_ratio,
        "n_transactions": len(transactions),
    })
    return 0


def cmd_sweep(args) -> int:
    config = SweepConfig.from_toml(args.sweep_config)
    if args.parallelism is not None:
        config.parallelism = args.parallelism
        config.validate()
    manager = SweepManager(config)
    manager.load_inputs()
    result = manager.run()
    path = manager.save(result, args.output)
    _emit({"out": path, "rows": len(result.table), "rows_by_status": result.metadata["rows_by_status"]})
    return 0


def cmd_summarize(args) -> int:
    table = ResultStore().load_results(args.results)
    keys = [k.strip() for k in args.group_by.split(',') if k.strip()]
    summary = summarize(table, keys)
    float_format = get_config().sweep.float_format
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        summary.to_csv(args.out, index=False, float_format=float_format, lineterminator='\n')
    else:
        summary.to_csv(sys.stdout, index=False, float_format=float_format, lineterminator='\n')
    return 0


def cmd_metrics(args) -> int:
    if args.end < args.start:
        raise ConfigError("--end 早于 --start")
    product = None
    if args.product:
        product = FlexProduct.from_alias(args.product)
        missing = [flag for flag, value in (('--lead-h', args.lead_h), ('--window-start', args.window_start),
                                            ('--window-len-h', args.window_len_h)) if value is None]
        if missing:
            raise ConfigError(f"--product 需要同时指定 {', '.join(missing)}", details={"missing": missing})
    raws = parse_transactions(args.transactions)
    series = _load_series(args)

    schedules, adjusted, prices, mefs = [], [], [], []
    day = args.start
    while day <= args.end:
        grid, transactions, price, mef, schedule = _bau_for_day(raws, series, day, args)
        schedules.append(schedule)
        prices.append(price)
        mefs.append(mef)
        if product is not None:
            request = FlexRequest.from_clock(grid, product, args.window_start, args.window_len_h,
                                             args.lead_h, v2g=args.v2g)
            adjusted.append(solve_product(schedule, transactions, request, price=price, mef=mef).adjusted_schedule)
        day += timedelta(days=1)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    float_format = get_config().sweep.float_format
    outputs = {
        "hourly_avg_cost.csv": hourly_avg_cost(schedules, prices),
        "hourly_avg_emissions.csv": hourly_avg_cost(schedules, mefs),
        "daily_peak.csv": daily_peak_by_hour(schedules),
    }
    if product is not None:
        outputs["cost_increase.csv"] = cost_increase_after_flex(schedules, adjusted, prices)
    for name, frame in outputs.items():
        frame.to_csv(out_dir / name, index=False, float_format=float_format, lineterminator='\n')
    log_info(f"统计结果已写入 {out_dir}")
    _emit({"out_dir": str(out_dir), "days": len(schedules), "files": sorted(outputs)})
    return 0


COMMANDS = {
    'synth': cmd_synth,
    'bau': cmd_bau,
    'flex': cmd_flex,
    'sweep': cmd_sweep,
    'summarize': cmd_summarize,
    'metrics': cmd_metrics,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """主入口"""
    args = build_parser().parse_args(argv)

    # 设置调试模式
    if args.debug:
        os.environ['FLEXCAST_DEBUG'] = '1'

    # 设置配置文件路径
    if args.config:
        os.environ['FLEXCAST_CONFIG'] = args.config
        set_config(load_config(args.config))

    config = get_config()
    get_logger().configure('DEBUG' if args.debug else config.logging.level, config.logging.log_dir)

    try:
        return COMMANDS[args.command](args)
    except FlexcastError as e:
        print(json.dumps(e.to_dict(), ensure_ascii=False), file=sys.stderr)
        return 2
    except Exception as e:
        print(json.dumps({
            "error_code": "UNEXPECTED_ERROR",
            "message": str(e),
            "details": {"type": type(e).__name__},
        }, ensure_ascii=False), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
