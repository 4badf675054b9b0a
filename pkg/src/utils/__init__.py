# src/utils/__init__.py

"""
ユーティリティモジュール

設定管理、ファイル入出力、SVG描画などの共通機能を提供します。
"""

from .config import SystemConfig
from .file_handler import FileHandler
from .renderer import TrajectoryRenderer

__all__ = [
    "SystemConfig",
    "FileHandler",
    "TrajectoryRenderer"
]
