# src/analysis/__init__.py

"""
統計解析

記述統計・反復測定分散分析・計画比較を提供します。
"""

from .stats import (
    WithinSubjectsTable, AnovaResult, EffectResult, ContrastResult,
    rm_anova_2way, rm_anova_1way, planned_contrast, interaction_contrast,
    f_cdf, f_sf, bonferroni
)
from .summary import SweepSummary, summarize, summarize_frame, format_summary
from .report import AnalysisReport, analyze_runs, analysis_frame, format_report

__all__ = [
    "WithinSubjectsTable", "AnovaResult", "EffectResult", "ContrastResult",
    "rm_anova_2way", "rm_anova_1way", "planned_contrast", "interaction_contrast",
    "f_cdf", "f_sf", "bonferroni",
    "SweepSummary", "summarize", "summarize_frame", "format_summary",
    "AnalysisReport", "analyze_runs", "analysis_frame", "format_report"
]
