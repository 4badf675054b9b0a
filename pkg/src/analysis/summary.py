# src/analysis/summary.py

"""スイープ結果の記述統計

参加率は 100·n_mobbing/group_size から再計算する（runs.csv の丸め値に依存しない）。
標準偏差はすべて標本標準偏差（n−1）。
"""

import math
from dataclasses import dataclass
from typing import Dict, List, Any, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import stats as sp_stats

from ..models.messages import RangePolicy
from ..models.run_record import RunRecord, RunStatus, SweepResult, PhysicsAudit

STATUS_ORDER = (RunStatus.UNANIMOUS.value, RunStatus.PARTIAL.value, RunStatus.FAILED.value)

RUNS_COLUMNS = [
    'run_id', 'world_id', 'world_seed', 'range_m', 'group_size',
    'status', 'n_mobbing', 'participation_pct', 'first_call_t_s'
]
ROBOTS_COLUMNS = ['run_id', 'robot_id', 'mobbed', 'decision_t_s']


def records_frame(records: Sequence[RunRecord]) -> pd.DataFrame:
    """RunRecord の列を runs.csv と同じ列構成のデータフレームに変換"""
    rows = []
    for record in records:
        rows.append({
            'run_id': record.run_id,
            'world_id': record.world_id,
            'world_seed': record.world_seed,
            'range_m': record.range_policy.label,
            'group_size': record.group_size,
            'status': record.status.value,
            'n_mobbing': record.n_mobbing,
            'participation_pct': record.participation_pct,
            'first_call_t_s': record.first_call_time if record.first_call_time is not None else np.nan
        })
    return pd.DataFrame(rows, columns=RUNS_COLUMNS)


def robots_frame(records: Sequence[RunRecord]) -> pd.DataFrame:
    """ロボットごとの決定時刻（robots.csv と同じ列構成）"""
    rows = []
    for record in records:
        for robot_id in sorted(record.decision_times):
            decision = record.decision_times[robot_id]
            rows.append({
                'run_id': record.run_id,
                'robot_id': robot_id,
                'mobbed': 0 if decision is None else 1,
                'decision_t_s': np.nan if decision is None else decision
            })
    return pd.DataFrame(rows, columns=ROBOTS_COLUMNS)


def range_order(labels: Sequence[str]) -> List[str]:
    """通信範囲ラベルを広い順に並べる"""
    return sorted(set(labels), key=lambda label: RangePolicy.parse(label).sort_key)


def _participation(runs: pd.DataFrame) -> pd.Series:
    return 100.0 * runs['n_mobbing'].astype(float) / runs['group_size'].astype(float)


def _sd(values: pd.Series) -> float:
    return float(values.std(ddof=1)) if len(values) >= 2 else math.nan


def _describe(runs: pd.DataFrame) -> Dict[str, Any]:
    """状態の件数・全会一致率・参加率の平均と標準偏差"""
    n = len(runs)
    counts = runs['status'].value_counts()
    participation = runs['participation']
    row: Dict[str, Any] = {'n': n}
    for status in STATUS_ORDER:
        row[status] = int(counts.get(status, 0))
    row['unanimous_rate'] = 100.0 * row[RunStatus.UNANIMOUS.value] / n if n else math.nan
    row['mean'] = float(participation.mean()) if n else math.nan
    row['sd'] = _sd(participation)
    return row


def confidence_interval(values: pd.Series, level: float = 0.95) -> Tuple[float, float]:
    """t分布による平均の信頼区間（n < 2 なら NaN）"""
    n = len(values)
    if n < 2:
        return math.nan, math.nan
    mean = float(values.mean())
    sd = float(values.std(ddof=1))
    half = float(sp_stats.t.ppf(0.5 + level / 2.0, n - 1)) * sd / math.sqrt(n)
    return mean - half, mean + half


@dataclass
class SweepSummary:
    """summarize の結果"""
    overall: Dict[str, Any]
    by_condition: pd.DataFrame
    by_range: pd.DataFrame
    by_group_size: pd.DataFrame
    decision_times: Optional[pd.DataFrame] = None
    n_worlds: int = 0
    master_seed: Optional[int] = None
    audit: Optional[PhysicsAudit] = None


def summarize_frame(runs: pd.DataFrame, robots: Optional[pd.DataFrame] = None) -> SweepSummary:
    """runs.csv 形式のデータフレームから記述統計を作成

    Raises:
        ValueError: 記録が空の場合
    """
    if runs.empty:
        raise ValueError("記録が空です")

    runs = runs.copy()
    runs['range_m'] = runs['range_m'].astype(str)
    runs['group_size'] = runs['group_size'].astype(int)
    runs['participation'] = _participation(runs)

    ranges = range_order(runs['range_m'])
    sizes = sorted(runs['group_size'].unique(), reverse=True)

    overall = _describe(runs)
    for status in STATUS_ORDER:
        overall[f'{status}_pct'] = 100.0 * overall[status] / overall['n']
    others = runs[runs['status'] != RunStatus.UNANIMOUS.value]['participation']
    overall['non_unanimous_n'] = len(others)
    overall['non_unanimous_mean'] = float(others.mean()) if len(others) else math.nan
    overall['non_unanimous_sd'] = _sd(others)

    condition_rows = []
    for range_label in ranges:
        for size in sizes:
            cell = runs[(runs['range_m'] == range_label) & (runs['group_size'] == size)]
            if cell.empty:
                continue
            row = {'range_m': range_label, 'group_size': int(size)}
            row.update(_describe(cell))
            row['ci_low'], row['ci_high'] = confidence_interval(cell['participation'])
            row['lone_mobbers'] = int(((cell['n_mobbing'] == 1) & (cell['group_size'] >= 2)).sum())
            condition_rows.append(row)

    range_rows = [
        dict({'range_m': label}, **_describe(runs[runs['range_m'] == label])) for label in ranges
    ]
    size_rows = [
        dict({'group_size': int(size)}, **_describe(runs[runs['group_size'] == size])) for size in sizes
    ]

    decision = None
    if robots is not None and not robots.empty:
        decision = _decision_table(runs, robots, ranges, sizes)

    return SweepSummary(
        overall=overall,
        by_condition=pd.DataFrame(condition_rows),
        by_range=pd.DataFrame(range_rows),
        by_group_size=pd.DataFrame(size_rows),
        decision_times=decision,
        n_worlds=int(runs['world_id'].nunique())
    )


def _decision_table(runs: pd.DataFrame, robots: pd.DataFrame,
                    ranges: Sequence[str], sizes: Sequence[int]) -> pd.DataFrame:
    """条件ごとの決定時刻（モビングしたロボットのみ）"""
    merged = robots.merge(runs[['run_id', 'range_m', 'group_size']], on='run_id', how='inner')
    merged = merged[merged['mobbed'] == 1]

    rows = []
    for range_label in ranges:
        for size in sizes:
            cell_runs = runs[(runs['range_m'] == range_label) & (runs['group_size'] == size)]
            if cell_runs.empty:
                continue
            times = merged[(merged['range_m'] == range_label) & (merged['group_size'] == size)]['decision_t_s']
            first_calls = cell_runs['first_call_t_s'].dropna()
            rows.append({
                'range_m': range_label,
                'group_size': int(size),
                'n_decisions': len(times),
                'mean': float(times.mean()) if len(times) else math.nan,
                'sd': _sd(times),
                'first_call_n': len(first_calls),
                'first_call_mean': float(first_calls.mean()) if len(first_calls) else math.nan
            })
    return pd.DataFrame(rows)


def summarize(result: SweepResult) -> SweepSummary:
    """スイープ結果から記述統計を作成（記録の純関数）"""
    summary = summarize_frame(records_frame(result.records), robots_frame(result.records))
    summary.master_seed = result.master_seed
    summary.audit = result.audit
    return summary


def _pct(value: float) -> str:
    return "-" if value is None or (isinstance(value, float) and math.isnan(value)) else f"{value:.2f}"


def _sec(value: float) -> str:
    return "-" if value is None or (isinstance(value, float) and math.isnan(value)) else f"{value:.6f}"


def format_condition_table(summary: SweepSummary) -> List[str]:
    """条件別の表（summary.txt と report.txt で共通）"""
    lines = [
        "[条件別]",
        f"  {'range':>6} {'group':>5} {'n':>4} {'unan':>5} {'part':>5} {'fail':>5} "
        f"{'unan%':>7} {'mean':>7} {'sd':>7} {'ci95_lo':>8} {'ci95_hi':>8} {'lone':>5}"
    ]
    for _, row in summary.by_condition.iterrows():
        lines.append(
            f"  {row['range_m']:>6} {int(row['group_size']):>5} {int(row['n']):>4} "
            f"{int(row['unanimous']):>5} {int(row['partial']):>5} {int(row['failed']):>5} "
            f"{_pct(row['unanimous_rate']):>7} {_pct(row['mean']):>7} {_pct(row['sd']):>7} "
            f"{_pct(row['ci_low']):>8} {_pct(row['ci_high']):>8} {int(row['lone_mobbers']):>5}"
        )
    return lines


def _format_marginal(title: str, frame: pd.DataFrame, key: str) -> List[str]:
    lines = [
        title,
        f"  {key:>10} {'n':>4} {'unan':>5} {'part':>5} {'fail':>5} {'unan%':>7} {'mean':>7} {'sd':>7}"
    ]
    for _, row in frame.iterrows():
        lines.append(
            f"  {str(row[key]):>10} {int(row['n']):>4} {int(row['unanimous']):>5} "
            f"{int(row['partial']):>5} {int(row['failed']):>5} {_pct(row['unanimous_rate']):>7} "
            f"{_pct(row['mean']):>7} {_pct(row['sd']):>7}"
        )
    return lines


def format_summary(summary: SweepSummary) -> str:
    """summary.txt の本文（実行時刻などの非決定的な情報は含めない）"""
    overall = summary.overall
    lines = ["モビング実験サマリー"]
    if summary.master_seed is not None:
        lines.append(f"master_seed: {summary.master_seed}")
    lines.append(f"ワールド数: {summary.n_worlds}, 観測数: {overall['n']}")
    lines.append("")

    lines.append("[全体]")
    for status in STATUS_ORDER:
        lines.append(f"  {status}: {overall[status]} ({_pct(overall[f'{status}_pct'])}%)")
    lines.append(f"  参加率: M={_pct(overall['mean'])}, SD={_pct(overall['sd'])}")
    lines.append(
        f"  参加率（全会一致以外）: M={_pct(overall['non_unanimous_mean'])}, "
        f"SD={_pct(overall['non_unanimous_sd'])} (n={overall['non_unanimous_n']})"
    )
    lines.append("")

    lines.extend(format_condition_table(summary))
    lines.append("")
    lines.extend(_format_marginal("[通信範囲別]", summary.by_range, 'range_m'))
    lines.append("")
    lines.extend(_format_marginal("[群れサイズ別]", summary.by_group_size, 'group_size'))

    if summary.decision_times is not None and not summary.decision_times.empty:
        lines.append("")
        lines.append("[モビング決定時刻（秒、記述のみ）]")
        lines.append(f"  {'range':>6} {'group':>5} {'n':>4} {'mean':>10} {'sd':>10} {'first_call':>10}")
        for _, row in summary.decision_times.iterrows():
            lines.append(
                f"  {row['range_m']:>6} {int(row['group_size']):>5} {int(row['n_decisions']):>4} "
                f"{_sec(row['mean']):>10} {_sec(row['sd']):>10} {_sec(row['first_call_mean']):>10}"
            )

    if summary.audit is not None:
        audit = summary.audit
        lines.append("")
        lines.append("[物理監査]")
        lines.append(f"  ロボット同士の最大重なり: {audit.max_robot_overlap:.3e} m")
        lines.append(f"  ロボットと箱の最大重なり: {audit.max_box_overlap:.3e} m")
        lines.append(f"  アリーナ内に収まっている: {'yes' if audit.contained else 'no'}")
        lines.append(f"  検査ティック数: {audit.ticks_checked}")

    return "\n".join(lines) + "\n"
