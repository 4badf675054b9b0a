# src/models/sensors.py

import math
from dataclasses import dataclass
from typing import Dict, Any, Tuple

from .world import ROBOT_RADIUS


@dataclass(frozen=True)
class SensorRig:
    """センサー配置

    方位角は機体座標系（度）。正の角度が左側。
    光センサーは片側4個、近接センサーは片側3個（後方なし）。
    """
    light_bearings_deg: Tuple[float, ...] = (17.0, 47.0, 90.0, 150.0)
    prox_bearings_deg: Tuple[float, ...] = (17.0, 47.0, 90.0)
    mount_radius: float = ROBOT_RADIUS
    prox_range: float = 0.05
    d_min: float = 0.01

    def __post_init__(self):
        object.__setattr__(self, 'light_bearings_deg', tuple(float(b) for b in self.light_bearings_deg))
        object.__setattr__(self, 'prox_bearings_deg', tuple(float(b) for b in self.prox_bearings_deg))
        for bearing in self.light_bearings_deg + self.prox_bearings_deg:
            if not 0.0 < bearing < 180.0:
                raise ValueError(f"片側の方位角は (0, 180) 度の範囲で指定してください: {bearing}")
        if not self.mount_radius > 0:
            raise ValueError(f"mount_radiusは正の値である必要があります: {self.mount_radius}")
        if not self.prox_range > 0:
            raise ValueError(f"prox_rangeは正の値である必要があります: {self.prox_range}")
        if not self.d_min > 0:
            raise ValueError(f"d_minは正の値である必要があります: {self.d_min}")

    @staticmethod
    def _mirrored(bearings_deg: Tuple[float, ...]) -> Tuple[Tuple[float, ...], Tuple[bool, ...]]:
        """左右対称の方位角（rad）と左側フラグ"""
        angles = [math.radians(b) for b in bearings_deg] + [-math.radians(b) for b in bearings_deg]
        is_left = [True] * len(bearings_deg) + [False] * len(bearings_deg)
        return tuple(angles), tuple(is_left)

    @property
    def light_layout(self) -> Tuple[Tuple[float, ...], Tuple[bool, ...]]:
        return self._mirrored(self.light_bearings_deg)

    @property
    def prox_layout(self) -> Tuple[Tuple[float, ...], Tuple[bool, ...]]:
        return self._mirrored(self.prox_bearings_deg)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'light_bearings_deg': list(self.light_bearings_deg),
            'prox_bearings_deg': list(self.prox_bearings_deg),
            'mount_radius': self.mount_radius,
            'prox_range': self.prox_range,
            'd_min': self.d_min
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'SensorRig':
        known = cls().to_dict()
        values = {key: data[key] for key in known if key in data}
        for key in ('light_bearings_deg', 'prox_bearings_deg'):
            if key in values:
                values[key] = tuple(values[key])
        return cls(**values)


@dataclass(frozen=True)
class SideReading:
    """左右それぞれのセンサー合計値"""
    left: float = 0.0
    right: float = 0.0

    def __post_init__(self):
        for value in (self.left, self.right):
            if not (math.isfinite(value) and value >= 0.0):
                raise ValueError(f"センサー値は有限の非負値である必要があります: {value}")

    @property
    def peak(self) -> float:
        return max(self.left, self.right)

    def swapped(self) -> 'SideReading':
        """左右を入れ替えた読み値"""
        return SideReading(left=self.right, right=self.left)
