# src/models/geometry.py

import math
from dataclasses import dataclass
from typing import Dict, Any

# 幾何計算で使う絶対許容誤差（m）
GEOM_TOLERANCE = 1e-9


def wrap_angle(angle: float) -> float:
    """角度を (-π, π] に正規化"""
    wrapped = math.remainder(angle, 2.0 * math.pi)
    if wrapped <= -math.pi:
        wrapped += 2.0 * math.pi
    return wrapped


@dataclass(frozen=True)
class Vec2:
    """2次元ベクトル（単位: m）"""
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"Vec2の成分は有限値である必要があります: ({self.x}, {self.y})")

    def __add__(self, other: 'Vec2') -> 'Vec2':
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: 'Vec2') -> 'Vec2':
        return Vec2(self.x - other.x, self.y - other.y)

    def __mul__(self, scalar: float) -> 'Vec2':
        return Vec2(self.x * scalar, self.y * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> 'Vec2':
        return Vec2(-self.x, -self.y)

    def dot(self, other: 'Vec2') -> float:
        return self.x * other.x + self.y * other.y

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def distance_to(self, other: 'Vec2') -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    @classmethod
    def from_angle(cls, angle: float, length: float = 1.0) -> 'Vec2':
        return cls(length * math.cos(angle), length * math.sin(angle))

    def to_dict(self) -> Dict[str, Any]:
        """辞書形式に変換"""
        return {'x': self.x, 'y': self.y}


@dataclass(frozen=True)
class Pose:
    """ロボットの位置と向き（heading は (-π, π]）"""
    position: Vec2
    heading: float

    def __post_init__(self):
        # frozen のため object.__setattr__ で正規化
        object.__setattr__(self, 'heading', wrap_angle(self.heading))

    @property
    def direction(self) -> Vec2:
        """向きの単位ベクトル"""
        return Vec2.from_angle(self.heading)

    def to_dict(self) -> Dict[str, Any]:
        return {'x': self.position.x, 'y': self.position.y, 'heading': self.heading}


@dataclass(frozen=True)
class AxisBox:
    """軸平行の正方形障害物（木箱）"""
    center: Vec2
    half_extent: float

    def __post_init__(self):
        if not self.half_extent > 0:
            raise ValueError(f"half_extentは正の値である必要があります: {self.half_extent}")

    @property
    def min_corner(self) -> Vec2:
        return Vec2(self.center.x - self.half_extent, self.center.y - self.half_extent)

    @property
    def max_corner(self) -> Vec2:
        return Vec2(self.center.x + self.half_extent, self.center.y + self.half_extent)

    def contains(self, point: Vec2, tolerance: float = 0.0) -> bool:
        """点が箱の内部（境界含む）にあるか"""
        return (abs(point.x - self.center.x) <= self.half_extent + tolerance and
                abs(point.y - self.center.y) <= self.half_extent + tolerance)

    def to_dict(self) -> Dict[str, Any]:
        return {'x': self.center.x, 'y': self.center.y, 'half': self.half_extent}


@dataclass(frozen=True)
class Ray:
    """半直線（direction は単位ベクトル）"""
    origin: Vec2
    direction: Vec2

    def __post_init__(self):
        if abs(self.direction.norm() - 1.0) > GEOM_TOLERANCE:
            raise ValueError(f"Rayの方向は単位ベクトルである必要があります: |d|={self.direction.norm()}")

    def point_at(self, t: float) -> Vec2:
        return self.origin + self.direction * t


@dataclass(frozen=True)
class Circle:
    """円（ロボットの胴体）"""
    center: Vec2
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"radiusは正の値である必要があります: {self.radius}")
