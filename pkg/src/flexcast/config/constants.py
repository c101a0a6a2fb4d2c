"""
Application constants
"""

# 时间离散化
STEP_MINUTES = 15
STEP_HOURS = STEP_MINUTES / 60.0
STEPS_PER_HOUR = 60 // STEP_MINUTES
STEPS_PER_DAY = 24 * STEPS_PER_HOUR

# 单次连接最长24小时
MAX_CONNECTION_STEPS = 96

# 优化时域：样本日前1天 + 样本日 + 后1天
HORIZON_DAYS_BEFORE = 1
HORIZON_DAYS_AFTER = 1

# 次目标权重
DEFAULT_EPSILON = 1e-6

# 研究的提前量范围（小时）
LEAD_TIME_RANGE_H = (1.0, 23.0)

# 约束残差容差（绝对值）
RESIDUAL_TOLERANCE = 1e-6

# 能量守恒校验容差（kWh）
ENERGY_TOLERANCE_KWH = 1e-6

# 充电站类别
CHARGER_CATEGORIES = {
    'residential': '住宅',
    'commercial': '商业',
    'shared': '共享',
}

# 默认类别占比
CATEGORY_SHARES = {
    'residential': 0.576,
    'commercial': 0.31,
    'shared': 0.114,
}

# 信号单位
SIGNAL_UNITS = {
    'day_ahead_price': 'EUR/kWh',
    'mef': 'kgCO2/kWh',
}

# 充电记录CSV列
TRANSACTION_COLUMNS = ['station_id', 'category', 'arrival', 'departure', 'energy_kwh', 'max_power_kw']

# 调度方案CSV列
SCHEDULE_COLUMNS = ['transaction_id', 'step', 'power_kw']

# 扫描结果列（排序键在前）
RESULT_KEY_COLUMNS = ['date', 'category', 'bau', 'v2g', 'product', 'window_start', 'window_len', 'lead_h']
RESULT_COLUMNS = RESULT_KEY_COLUMNS + [
    'magnitude_kw', 'cost_delta', 'emission_delta', 'status', 'n_transactions', 'message'
]

# 结果状态
RESULT_STATES = {
    'optimal': '最优',
    'infeasible': '不可行',
    'unbounded': '无界',
    'failed': '求解失败',
    'error': '单元异常',
}

# 汇总分位数
SUMMARY_QUANTILES = (0.05, 0.25, 0.5, 0.75, 0.95)

# 穷举校验规模上限
ORACLE_MAX_TRANSACTIONS = 2
ORACLE_MAX_STEPS = 8
ORACLE_MAX_PROFILES = 200_000
ORACLE_MAX_JOINT = 2_000_000

# 合成车队参数（虚构参数，仅用于无真实数据时的实验）
# arrival_profile: 0..23点到达权重；connection/energy: 截断对数正态（中位数、对数标准差、上限）
FLEET_PRESETS = {
    'residential': {
        'arrival_profile': [
            0.5, 0.3, 0.2, 0.2, 0.2, 0.3, 0.5, 0.8, 1.0, 1.0, 1.0, 1.0,
            1.2, 1.2, 1.5, 2.5, 8.0, 12.0, 14.0, 13.0, 10.0, 7.0, 3.0, 1.2,
        ],
        'connection_hours': {'median': 11.0, 'sigma': 0.45, 'max': 24.0},
        'energy_kwh': {'median': 9.0, 'sigma': 0.6, 'max': 60.0},
        'p_max_kw': [3.7, 7.4, 11.0],
        'p_max_weights': [0.3, 0.3, 0.4],
        'sessions_per_station_day': 0.8,
    },
    'commercial': {
        'arrival_profile': [
            0.1, 0.1, 0.1, 0.1, 0.2, 0.8, 3.0, 9.0, 12.0, 9.0, 5.0, 3.0,
            2.5, 2.5, 2.0, 1.5, 1.2, 1.0, 0.8, 0.6, 0.4, 0.3, 0.2, 0.1,
        ],
        'connection_hours': {'median': 7.5, 'sigma': 0.4, 'max': 24.0},
        'energy_kwh': {'median': 11.0, 'sigma': 0.55, 'max': 60.0},
        'p_max_kw': [7.4, 11.0, 22.0],
        'p_max_weights': [0.2, 0.6, 0.2],
        'sessions_per_station_day': 1.1,
    },
    'shared': {
        'arrival_profile': [
            1.0, 0.6, 0.4, 0.4, 0.5, 1.0, 2.0, 3.0, 3.5, 3.5, 3.5, 3.5,
            3.5, 3.5, 3.5, 3.5, 3.5, 3.5, 3.5, 3.0, 2.5, 2.0, 1.5, 1.2,
        ],
        'connection_hours': {'median': 2.5, 'sigma': 0.7, 'max': 24.0},
        'energy_kwh': {'median': 8.0, 'sigma': 0.6, 'max': 50.0},
        'p_max_kw': [11.0, 22.0],
        'p_max_weights': [0.6, 0.4],
        'sessions_per_station_day': 2.5,
    },
}
