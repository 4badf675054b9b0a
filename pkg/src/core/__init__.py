# src/core/__init__.py

"""
コア機能モジュール

シミュレータの中核となる機能を提供します。
- 幾何計算・ワールド生成
- センサー・無線・コントローラ
- シミュレーションループと実験ハーネス
"""

from .errors import (
    MobSimError, PlacementExhaustedError, ProtocolError, WorldFileError,
    TraceFileError, IncompleteTableError, UsageError, RunsFileError
)
from .world_generator import WorldSettings, generate_world, reduce_to_group
from .radio import RadioBus
from .controller import decide
from .engine import SimState, RunOutcome, step, run, classify
from .harness import ExperimentHarness

__all__ = [
    "MobSimError", "PlacementExhaustedError", "ProtocolError", "WorldFileError",
    "TraceFileError", "IncompleteTableError", "UsageError", "RunsFileError",
    "WorldSettings", "generate_world", "reduce_to_group",
    "RadioBus", "decide",
    "SimState", "RunOutcome", "step", "run", "classify",
    "ExperimentHarness"
]
