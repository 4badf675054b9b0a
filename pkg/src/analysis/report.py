# src/analysis/report.py

import math
import logging
from dataclasses import dataclass, field
from typing import List, Optional

import pandas as pd

from .stats import (
    WithinSubjectsTable, AnovaResult, ContrastResult, EFFECT_A, EFFECT_B, EFFECT_AB,
    rm_anova_2way, canonical_contrasts, bonferroni
)
from .summary import SweepSummary, summarize_frame, format_condition_table

logger = logging.getLogger(__name__)

ANOVA_COLUMNS = ['effect', 'ss', 'df', 'error_ss', 'error_df', 'f', 'p', 'p_bonferroni']

_EFFECT_LABELS = {
    EFFECT_A: "通信範囲",
    EFFECT_B: "群れサイズ",
    EFFECT_AB: "通信範囲 × 群れサイズ",
}


@dataclass
class AnalysisReport:
    """analyze の結果一式"""
    table: WithinSubjectsTable
    anova: AnovaResult
    contrasts: List[ContrastResult] = field(default_factory=list)
    interactions: List[ContrastResult] = field(default_factory=list)
    summary: Optional[SweepSummary] = None

    @property
    def response(self) -> str:
        return self.table.response


def analyze_runs(runs: pd.DataFrame, response: str = 'participation') -> AnalysisReport:
    """runs.csv 形式のデータを分散分析・計画比較にかける

    Raises:
        IncompleteTableError: 被験者内計画に欠損セルがある場合
        ValueError: 水準数が2未満の場合
    """
    table = WithinSubjectsTable.from_frame(runs, response)
    logger.info(
        f"分散分析: response={response}, n={table.n_subjects}, "
        f"A={list(table.factor_a_levels)}, B={list(table.factor_b_levels)}"
    )

    anova = rm_anova_2way(table)
    contrasts, interactions = canonical_contrasts(table)
    return AnalysisReport(table, anova, contrasts, interactions, summarize_frame(runs))


def _number(value: float) -> str:
    if math.isinf(value):
        return "inf"
    return f"{value:.6f}"


def _probability(value: float) -> str:
    return f"{value:.6g}"


def analysis_frame(report: AnalysisReport) -> pd.DataFrame:
    """anova.csv の内容

    分散分析の効果は補正なし（m=1）、計画比較と交互作用比較はそれぞれ m=2 で補正する。
    """
    rows = []
    for effect in report.anova.effects.values():
        rows.append([effect.effect, effect.ss, effect.df, effect.error_ss, effect.error_df,
                     effect.f, effect.p, bonferroni(effect.p, 1)])

    for family in (report.contrasts, report.interactions):
        for contrast in family:
            rows.append([contrast.name, contrast.ss, contrast.df, contrast.error_ss, contrast.error_df,
                         contrast.f, contrast.p, bonferroni(contrast.p, len(family))])

    formatted = [
        [name, _number(ss), str(df), _number(error_ss), str(error_df),
         _number(f_value), _probability(p), _probability(p_adj)]
        for name, ss, df, error_ss, error_df, f_value, p, p_adj in rows
    ]
    return pd.DataFrame(formatted, columns=ANOVA_COLUMNS)


def format_p(p: float) -> str:
    """p値の表記（p < .001 / p = .023）"""
    if p < 0.001:
        return "p < .001"
    text = f"{p:.3f}"
    return f"p = {text[1:] if text.startswith('0') else text}"


def format_f(df1: int, df2: int, f_value: float) -> str:
    value = "inf" if math.isinf(f_value) else f"{f_value:.2f}"
    return f"F({df1}, {df2}) = {value}"


def _contrast_line(contrast: ContrastResult, m: int) -> str:
    weights = ", ".join(f"{w:+g}" for w in contrast.weights)
    if contrast.weights_b is not None:
        weights += " × " + ", ".join(f"{w:+g}" for w in contrast.weights_b)
    line = (f"  {contrast.name} ({weights}): {format_f(1, contrast.error_df, contrast.f)}, "
            f"{format_p(bonferroni(contrast.p, m))} (Bonferroni m={m})")
    if contrast.degenerate:
        line += " [縮退]"
    return line


def format_report(report: AnalysisReport) -> str:
    """report.txt の本文"""
    table = report.table
    lines = [
        "反復測定分散分析レポート",
        f"応答変数: {report.response}",
        f"被験者（ワールド）: n={table.n_subjects}",
        f"要因A（通信範囲）: {', '.join(table.factor_a_levels)}",
        f"要因B（群れサイズ）: {', '.join(str(b) for b in table.factor_b_levels)}",
        ""
    ]

    if report.response == 'unanimous':
        lines.append("応答の符号化: 各 (ワールド, 条件) セルで全会一致なら100、それ以外は0")
    else:
        lines.append("応答の符号化: 参加率（%）= 100·n_mobbing/group_size")
    lines.append("注意: 球面性の検定・補正は行っていない（自由度は補正なし）")
    lines.append("")

    lines.append("[主効果・交互作用]")
    for key, effect in report.anova.effects.items():
        line = f"  {_EFFECT_LABELS.get(key, key)}: {format_f(effect.df, effect.error_df, effect.f)}, {format_p(effect.p)}"
        if effect.degenerate:
            line += " [縮退: 誤差平均平方が0]"
        lines.append(line)

    if report.contrasts:
        lines.append("")
        lines.append("[計画比較（通信範囲）]")
        lines.extend(_contrast_line(c, len(report.contrasts)) for c in report.contrasts)

    if report.interactions:
        lines.append("")
        lines.append("[交互作用比較（通信範囲 × 群れサイズ）]")
        lines.extend(_contrast_line(c, len(report.interactions)) for c in report.interactions)

    if report.summary is not None:
        lines.append("")
        lines.extend(format_condition_table(report.summary))

    return "\n".join(lines) + "\n"
