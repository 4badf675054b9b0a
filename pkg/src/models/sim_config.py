# src/models/sim_config.py

import math
from dataclasses import dataclass, field, replace
from typing import Dict, Any

from .messages import RangePolicy
from .controller_state import ControllerParams
from .sensors import SensorRig


@dataclass(frozen=True)
class SimConfig:
    """シミュレーション設定"""
    dt: float = 0.032
    duration: float = 60.0
    range_policy: RangePolicy = field(default_factory=RangePolicy.infinite)
    controller_params: ControllerParams = field(default_factory=ControllerParams)
    sensor_rig: SensorRig = field(default_factory=SensorRig)
    wheel_radius: float = 0.0205
    axle_length: float = 0.053
    collision_passes: int = 4
    collision_max_passes: int = 256

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dtは正の値である必要があります: {self.dt}")
        if not self.duration >= self.dt:
            raise ValueError(f"durationはdt以上である必要があります: {self.duration}")
        if not (self.wheel_radius > 0 and self.axle_length > 0):
            raise ValueError("wheel_radius と axle_length は正の値である必要があります")
        if self.collision_passes < 1 or self.collision_max_passes < self.collision_passes:
            raise ValueError(
                f"衝突解決パス数が不正です: {self.collision_passes}/{self.collision_max_passes}"
            )

    @property
    def n_ticks(self) -> int:
        """実行ティック数（端数のティックは切り捨て）"""
        return int(math.floor(self.duration / self.dt + 1e-9))

    def with_range(self, range_policy: RangePolicy) -> 'SimConfig':
        return replace(self, range_policy=range_policy)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'dt': self.dt,
            'duration': self.duration,
            'range_m': self.range_policy.label,
            'controller': self.controller_params.to_dict(),
            'sensing': self.sensor_rig.to_dict(),
            'wheel_radius': self.wheel_radius,
            'axle_length': self.axle_length,
            'collision_passes': self.collision_passes,
            'collision_max_passes': self.collision_max_passes
        }
