# src/__init__.py

"""
モビング行動シミュレータ

範囲制限付き無線で協調するブライテンベルグ型ロボット群の2Dシミュレータと、
2×3 被験者内実験・反復測定分散分析のハーネス
"""

__version__ = "1.0.0"
__description__ = "モビング行動シミュレータ"

# パッケージレベルのインポート
from .utils.config import SystemConfig
from .core.engine import run
from .core.harness import ExperimentHarness

__all__ = [
    "SystemConfig",
    "run",
    "ExperimentHarness"
]
