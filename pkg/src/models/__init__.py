# src/models/__init__.py

"""
データモデル定義

シミュレータ・実験ハーネス・統計解析で使用するデータ構造を定義します。
"""

from .geometry import Vec2, Pose, AxisBox, Ray, Circle, wrap_angle
from .world import WorldSpec, LightSource
from .messages import Message, MessageKind, MessageOrigin, RangePolicy
from .controller_state import BehaviorMode, ControllerState, ControllerParams, WheelCommand
from .sensors import SensorRig, SideReading
from .sim_config import SimConfig
from .run_record import (
    Event, EventKind, RunStatus, RunRecord, PhysicsAudit, TraceRow,
    Condition, SweepResult, CANONICAL_CONDITIONS
)

__all__ = [
    "Vec2", "Pose", "AxisBox", "Ray", "Circle", "wrap_angle",
    "WorldSpec", "LightSource",
    "Message", "MessageKind", "MessageOrigin", "RangePolicy",
    "BehaviorMode", "ControllerState", "ControllerParams", "WheelCommand",
    "SensorRig", "SideReading",
    "SimConfig",
    "Event", "EventKind", "RunStatus", "RunRecord", "PhysicsAudit", "TraceRow",
    "Condition", "SweepResult", "CANONICAL_CONDITIONS"
]
