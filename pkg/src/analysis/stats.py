# src/analysis/stats.py

"""反復測定分散分析

被験者 = ワールド、要因A = 通信範囲、要因B = 群れサイズの被験者内計画。
各効果は対応する「効果×被験者」交互作用の平均平方で検定する（球面性の補正なし）。
"""

import math
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Any, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from numpy.typing import NDArray
from scipy.special import betainc

from ..models.messages import RangePolicy
from ..core.errors import IncompleteTableError

logger = logging.getLogger(__name__)

RESPONSES = ('participation', 'unanimous')

EFFECT_A = 'range'
EFFECT_B = 'group_size'
EFFECT_AB = 'range_x_group_size'

# 通信範囲の計画比較（inf, 0.5, 0.1 の順）
CANONICAL_CONTRASTS: Tuple[Tuple[str, Tuple[float, ...]], ...] = (
    ('baseline_vs_ranged', (2.0, -1.0, -1.0)),
    ('mid_vs_low', (0.0, 1.0, -1.0)),
)

# 計画比較 × 群れサイズ（10, 3 の順）
INTERACTION_CONTRASTS: Tuple[Tuple[str, Tuple[float, ...], Tuple[float, ...]], ...] = (
    ('baseline_vs_ranged_x_group_size', (2.0, -1.0, -1.0), (1.0, -1.0)),
    ('mid_vs_low_x_group_size', (0.0, 1.0, -1.0), (1.0, -1.0)),
)


@dataclass
class WithinSubjectsTable:
    """被験者 × 要因A × 要因B の完全な表"""
    values: NDArray[np.float64]
    subjects: Tuple[int, ...] = ()
    factor_a_levels: Tuple[str, ...] = ()
    factor_b_levels: Tuple[int, ...] = ()
    response: str = 'participation'

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 3:
            raise ValueError(f"valuesは3次元配列である必要があります: shape={self.values.shape}")
        if not np.isfinite(self.values).all():
            raise ValueError("valuesに有限でない値が含まれています")

        n, a, b = self.values.shape
        if not self.subjects:
            self.subjects = tuple(range(1, n + 1))
        if not self.factor_a_levels:
            self.factor_a_levels = tuple(str(j) for j in range(a))
        if not self.factor_b_levels:
            self.factor_b_levels = tuple(range(b))
        if (len(self.subjects), len(self.factor_a_levels), len(self.factor_b_levels)) != (n, a, b):
            raise ValueError("水準ラベルの数がvaluesの形状と一致しません")

    @property
    def n_subjects(self) -> int:
        return self.values.shape[0]

    @property
    def a(self) -> int:
        return self.values.shape[1]

    @property
    def b(self) -> int:
        return self.values.shape[2]

    @classmethod
    def from_frame(cls, runs: pd.DataFrame, response: str = 'participation') -> 'WithinSubjectsTable':
        """runs.csv 形式のデータフレームから作成

        要因Aの水準は広い範囲から、要因Bの水準は大きい群れから並べる。

        Raises:
            ValueError: response が不正な場合
            IncompleteTableError: セルの欠損・重複がある場合
        """
        if response not in RESPONSES:
            raise ValueError(f"responseは{RESPONSES}のいずれかである必要があります: {response}")

        frame = runs.copy()
        frame['range_m'] = frame['range_m'].astype(str)
        frame['group_size'] = frame['group_size'].astype(int)
        frame['world_id'] = frame['world_id'].astype(int)

        if response == 'participation':
            frame['y'] = 100.0 * frame['n_mobbing'].astype(float) / frame['group_size']
        else:
            frame['y'] = np.where(frame['status'] == 'unanimous', 100.0, 0.0)

        a_levels = tuple(sorted(frame['range_m'].unique(), key=lambda s: RangePolicy.parse(s).sort_key))
        b_levels = tuple(sorted(frame['group_size'].unique(), reverse=True))
        subjects = tuple(sorted(frame['world_id'].unique()))

        cells = frame.groupby(['world_id', 'range_m', 'group_size'])['y'].agg(['size', 'first'])
        values = np.full((len(subjects), len(a_levels), len(b_levels)), np.nan)

        for s_index, world_id in enumerate(subjects):
            for a_index, range_label in enumerate(a_levels):
                for b_index, group_size in enumerate(b_levels):
                    key = (world_id, range_label, group_size)
                    label = f"range={range_label}, group_size={group_size}"
                    if key not in cells.index:
                        raise IncompleteTableError(world_id, label)
                    count = int(cells.loc[key, 'size'])
                    if count > 1:
                        raise IncompleteTableError(world_id, label, f"{count}件重複")
                    values[s_index, a_index, b_index] = float(cells.loc[key, 'first'])

        return cls(values, subjects, a_levels, b_levels, response)


@dataclass
class EffectResult:
    """1効果の検定結果"""
    effect: str
    ss: float
    df: int
    error_ss: float
    error_df: int
    f: float
    p: float
    degenerate: bool = False

    @property
    def ms(self) -> float:
        return self.ss / self.df

    @property
    def error_ms(self) -> float:
        return self.error_ss / self.error_df

    def to_dict(self) -> Dict[str, Any]:
        return {
            'effect': self.effect,
            'ss': self.ss,
            'df': self.df,
            'error_ss': self.error_ss,
            'error_df': self.error_df,
            'ms': self.ms,
            'error_ms': self.error_ms,
            'f': self.f,
            'p': self.p,
            'degenerate': self.degenerate
        }


@dataclass
class AnovaResult:
    """二元配置反復測定分散分析の結果"""
    effects: Dict[str, EffectResult]
    ss_subjects: float
    ss_total: float
    n_subjects: int
    a: int
    b: int

    def __getitem__(self, effect: str) -> EffectResult:
        return self.effects[effect]

    @property
    def partition_sum(self) -> float:
        """被験者SS + Σ(効果SS + 誤差SS)（総SSと一致する）"""
        return self.ss_subjects + sum(e.ss + e.error_ss for e in self.effects.values())


@dataclass
class ContrastResult:
    """計画比較（自由度 (1, n−1)）"""
    name: str
    factor: str
    weights: Tuple[float, ...]
    ss: float
    error_ss: float
    error_df: int
    f: float
    p: float
    mean: float
    degenerate: bool = False
    weights_b: Optional[Tuple[float, ...]] = None

    df: int = field(default=1, init=False)


def f_cdf(x: float, d1: float, d2: float) -> float:
    """F分布の累積分布関数 I_{d1·x/(d1·x+d2)}(d1/2, d2/2)"""
    _check_f_args(x, d1, d2)
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return 1.0
    return float(betainc(d1 / 2.0, d2 / 2.0, d1 * x / (d1 * x + d2)))


def f_sf(x: float, d1: float, d2: float) -> float:
    """F分布の上側確率（f_cdf とは独立に評価）"""
    _check_f_args(x, d1, d2)
    if x == 0.0:
        return 1.0
    if math.isinf(x):
        return 0.0
    return float(betainc(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * x)))


def _check_f_args(x: float, d1: float, d2: float) -> None:
    if math.isnan(x) or x < 0:
        raise ValueError(f"F値は0以上である必要があります: {x}")
    if not (d1 > 0 and d2 > 0):
        raise ValueError(f"自由度は正である必要があります: ({d1}, {d2})")


def bonferroni(p: float, m: int) -> float:
    """ボンフェローニ補正 min(1, m·p)"""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"pは0〜1の範囲である必要があります: {p}")
    if m < 1:
        raise ValueError(f"比較数mは1以上である必要があります: {m}")
    return min(1.0, m * p)


def _f_test(ss: float, df: int, error_ss: float, error_df: int,
            scale: float) -> Tuple[float, float, bool]:
    """F値・p値・縮退フラグ

    誤差平均平方が0のとき、効果SS > 0 なら F=inf, p=0、そうでなければ F=0, p=1。
    """
    tolerance = 1e-12 * max(1.0, scale)
    if error_ss <= tolerance:
        if ss > tolerance:
            return math.inf, 0.0, True
        return 0.0, 1.0, True

    f_value = (ss / df) / (error_ss / error_df)
    return f_value, f_sf(f_value, df, error_df), False


def _effect(name: str, ss: float, df: int, error_ss: float, error_df: int,
            scale: float) -> EffectResult:
    f_value, p_value, degenerate = _f_test(ss, df, error_ss, error_df, scale)
    if degenerate:
        logger.warning(f"誤差平均平方が0のため検定が縮退しています: {name}")
    return EffectResult(name, ss, df, error_ss, error_df, f_value, p_value, degenerate)


def rm_anova_2way(table: WithinSubjectsTable) -> AnovaResult:
    """二元配置反復測定分散分析

    Raises:
        ValueError: n < 2, a < 2, b < 2 の場合
    """
    y = table.values
    n, a, b = y.shape
    if n < 2 or a < 2 or b < 2:
        raise ValueError(f"n, a, b はすべて2以上である必要があります: ({n}, {a}, {b})")

    grand = y.mean()
    mean_a = y.mean(axis=(0, 2))
    mean_b = y.mean(axis=(0, 1))
    mean_s = y.mean(axis=(1, 2))
    mean_ab = y.mean(axis=0)
    mean_as = y.mean(axis=2)
    mean_bs = y.mean(axis=1)

    ss_a = n * b * float(np.sum((mean_a - grand) ** 2))
    ss_b = n * a * float(np.sum((mean_b - grand) ** 2))
    ss_ab = n * float(np.sum((mean_ab - mean_a[:, None] - mean_b[None, :] + grand) ** 2))
    ss_s = a * b * float(np.sum((mean_s - grand) ** 2))
    ss_as = b * float(np.sum((mean_as - mean_a[None, :] - mean_s[:, None] + grand) ** 2))
    ss_bs = a * float(np.sum((mean_bs - mean_b[None, :] - mean_s[:, None] + grand) ** 2))
    residual = (y - mean_ab[None, :, :] - mean_as[:, :, None] - mean_bs[:, None, :]
                + mean_a[None, :, None] + mean_b[None, None, :] + mean_s[:, None, None] - grand)
    ss_abs = float(np.sum(residual ** 2))
    ss_total = float(np.sum((y - grand) ** 2))

    effects = {
        EFFECT_A: _effect(EFFECT_A, ss_a, a - 1, ss_as, (a - 1) * (n - 1), ss_total),
        EFFECT_B: _effect(EFFECT_B, ss_b, b - 1, ss_bs, (b - 1) * (n - 1), ss_total),
        EFFECT_AB: _effect(EFFECT_AB, ss_ab, (a - 1) * (b - 1), ss_abs,
                           (a - 1) * (b - 1) * (n - 1), ss_total),
    }
    return AnovaResult(effects, ss_s, ss_total, n, a, b)


def rm_anova_1way(values: NDArray[np.float64], effect: str = 'A') -> EffectResult:
    """一元配置反復測定分散分析（values は 被験者 × 水準）"""
    y = np.asarray(values, dtype=np.float64)
    if y.ndim != 2:
        raise ValueError(f"valuesは2次元配列である必要があります: shape={y.shape}")
    n, a = y.shape
    if n < 2 or a < 2:
        raise ValueError(f"n, a は2以上である必要があります: ({n}, {a})")

    grand = y.mean()
    mean_a = y.mean(axis=0)
    mean_s = y.mean(axis=1)

    ss_a = n * float(np.sum((mean_a - grand) ** 2))
    ss_err = float(np.sum((y - mean_a[None, :] - mean_s[:, None] + grand) ** 2))
    ss_total = float(np.sum((y - grand) ** 2))
    return _effect(effect, ss_a, a - 1, ss_err, (a - 1) * (n - 1), ss_total)


def _contrast_from_combos(name: str, factor: str, weights: Sequence[float],
                          combos: NDArray[np.float64],
                          weights_b: Optional[Sequence[float]] = None) -> ContrastResult:
    n = combos.shape[0]
    if n < 2:
        raise ValueError(f"被験者数は2以上である必要があります: {n}")

    mean = float(combos.mean())
    ss = n * mean ** 2
    error_ss = float(np.sum((combos - mean) ** 2))
    f_value, p_value, degenerate = _f_test(ss, 1, error_ss, n - 1, float(np.sum(combos ** 2)))
    if degenerate:
        logger.warning(f"比較の分散が0のため検定が縮退しています: {name}")

    return ContrastResult(
        name=name,
        factor=factor,
        weights=tuple(float(w) for w in weights),
        ss=ss,
        error_ss=error_ss,
        error_df=n - 1,
        f=f_value,
        p=p_value,
        mean=mean,
        degenerate=degenerate,
        weights_b=tuple(float(w) for w in weights_b) if weights_b is not None else None
    )


def _check_weights(weights: Sequence[float], n_levels: int, label: str) -> NDArray[np.float64]:
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (n_levels,):
        raise ValueError(f"{label}の重みの数が水準数{n_levels}と一致しません: {len(w)}")
    if abs(float(w.sum())) > 1e-12:
        raise ValueError(f"{label}の重みの合計が0ではありません: {w.sum()}")
    return w


def planned_contrast(table: WithinSubjectsTable, factor: str, weights: Sequence[float],
                     name: Optional[str] = None) -> ContrastResult:
    """計画比較（もう一方の要因は平均して畳み込む）

    Args:
        table: 被験者内計画の表
        factor: 'A' または 'B'
        weights: 水準ごとの重み（合計0）
        name: 結果の名前
    """
    if factor == 'A':
        level_means = table.values.mean(axis=2)
        w = _check_weights(weights, table.a, "要因A")
    elif factor == 'B':
        level_means = table.values.mean(axis=1)
        w = _check_weights(weights, table.b, "要因B")
    else:
        raise ValueError(f"factorは'A'または'B'である必要があります: {factor}")

    combos = level_means @ w
    return _contrast_from_combos(name or f"contrast_{factor}", factor, weights, combos)


def interaction_contrast(table: WithinSubjectsTable, weights_a: Sequence[float],
                         weights_b: Sequence[float], name: Optional[str] = None) -> ContrastResult:
    """交互作用比較 Σ_j Σ_k w_a[j]·w_b[k]·y[j,k]"""
    wa = _check_weights(weights_a, table.a, "要因A")
    wb = _check_weights(weights_b, table.b, "要因B")
    combos = np.einsum('nab,a,b->n', table.values, wa, wb)
    return _contrast_from_combos(name or "interaction", 'AxB', weights_a, combos, weights_b)


def canonical_contrasts(table: WithinSubjectsTable) -> Tuple[List[ContrastResult], List[ContrastResult]]:
    """通信範囲の2つの計画比較と、その群れサイズとの交互作用比較

    水準数が 3 × 2 でない場合は空のリストを返す。
    """
    if table.a != 3 or table.b != 2:
        logger.warning(f"水準数が3×2ではないため計画比較を省略します: {table.a}×{table.b}")
        return [], []

    contrasts = [planned_contrast(table, 'A', weights, name) for name, weights in CANONICAL_CONTRASTS]
    interactions = [
        interaction_contrast(table, wa, wb, name) for name, wa, wb in INTERACTION_CONTRASTS
    ]
    return contrasts, interactions
