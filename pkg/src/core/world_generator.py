# src/core/world_generator.py

import math
import logging
from dataclasses import dataclass, replace
from typing import Dict, List, Any, Optional, Tuple

import numpy as np

from ..models.geometry import Vec2, Pose, AxisBox
from ..models.world import (
    WorldSpec, LightSource, ROBOT_RADIUS, BOX_HALF_EXTENT,
    DEFAULT_ARENA_SIDE, DEFAULT_LIGHT_INTENSITY
)
from .errors import PlacementExhaustedError

logger = logging.getLogger(__name__)

_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class WorldSettings:
    """ワールド生成の設定"""
    arena_side: float = DEFAULT_ARENA_SIDE
    light_intensity: float = DEFAULT_LIGHT_INTENSITY
    box_half_extent: float = BOX_HALF_EXTENT
    light_placement_radius: float = 0.02
    wall_clearance: float = 0.01
    body_clearance: float = 0.02
    max_placement_attempts: int = 10_000

    def __post_init__(self):
        if self.max_placement_attempts < 1:
            raise ValueError(f"max_placement_attemptsは1以上である必要があります: {self.max_placement_attempts}")
        if self.wall_clearance < 0 or self.body_clearance < 0:
            raise ValueError("クリアランスは0以上である必要があります")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'WorldSettings':
        known = cls.__dataclass_fields__.keys()
        return cls(**{key: data[key] for key in known if key in data})


@dataclass(frozen=True)
class _PlacedBody:
    """配置済みの物体（円または正方形）"""
    center: Vec2
    extent: float
    is_box: bool


def body_clearance(a: _PlacedBody, b: _PlacedBody) -> float:
    """2物体間の隙間（重なっている場合は負）"""
    dx = abs(a.center.x - b.center.x)
    dy = abs(a.center.y - b.center.y)

    if a.is_box and b.is_box:
        gx = dx - a.extent - b.extent
        gy = dy - a.extent - b.extent
        if gx > 0 and gy > 0:
            return math.hypot(gx, gy)
        return max(gx, gy)

    if a.is_box or b.is_box:
        box, disc = (a, b) if a.is_box else (b, a)
        gx = abs(disc.center.x - box.center.x) - box.extent
        gy = abs(disc.center.y - box.center.y) - box.extent
        if gx > 0 or gy > 0:
            return math.hypot(max(gx, 0.0), max(gy, 0.0)) - disc.extent
        return max(gx, gy) - disc.extent

    return math.hypot(dx, dy) - a.extent - b.extent


def _make_rng(seed: int) -> np.random.Generator:
    """PCG64 の乱数生成器（seed は 2^64 で剰余）"""
    return np.random.Generator(np.random.PCG64(int(seed) & _SEED_MASK))


def _place(rng: np.random.Generator, label: str, extent: float, is_box: bool,
           placed: List[_PlacedBody], settings: WorldSettings,
           with_heading: bool = False) -> Tuple[_PlacedBody, float]:
    """棄却サンプリングで1物体を配置"""
    low = settings.wall_clearance + extent
    high = settings.arena_side - settings.wall_clearance - extent
    if high < low:
        raise PlacementExhaustedError(label, 0)

    for attempt in range(1, settings.max_placement_attempts + 1):
        x = low + (high - low) * rng.random()
        y = low + (high - low) * rng.random()
        heading = math.pi - 2.0 * math.pi * rng.random() if with_heading else 0.0
        candidate = _PlacedBody(Vec2(x, y), extent, is_box)

        if all(body_clearance(candidate, other) >= settings.body_clearance for other in placed):
            if attempt > 1:
                logger.debug(f"{label} を{attempt}回目の試行で配置しました")
            return candidate, heading

    raise PlacementExhaustedError(label, settings.max_placement_attempts)


def generate_world(seed: int, n_robots: int = 10, n_boxes: int = 3,
                   settings: Optional[WorldSettings] = None, world_id: int = 0) -> WorldSpec:
    """シード付きでランダムなワールドを生成

    配置順は 光源 → 箱 → ロボット（ID順）。

    Args:
        seed: 乱数シード
        n_robots: ロボット数（1以上）
        n_boxes: 箱の数（0以上）
        settings: 生成設定
        world_id: ワールド番号

    Returns:
        WorldSpec: 生成されたワールド

    Raises:
        ValueError: 引数が不正な場合
        PlacementExhaustedError: 1物体の配置が上限回数失敗した場合
    """
    if n_robots < 1:
        raise ValueError(f"n_robotsは1以上である必要があります: {n_robots}")
    if n_boxes < 0:
        raise ValueError(f"n_boxesは0以上である必要があります: {n_boxes}")

    settings = settings or WorldSettings()
    rng = _make_rng(seed)
    placed: List[_PlacedBody] = []

    light_body, _ = _place(rng, "光源", settings.light_placement_radius, False, placed, settings)
    placed.append(light_body)

    boxes = []
    for i in range(1, n_boxes + 1):
        body, _ = _place(rng, f"箱#{i}", settings.box_half_extent, True, placed, settings)
        placed.append(body)
        boxes.append(AxisBox(body.center, settings.box_half_extent))

    spawns = []
    for robot_id in range(1, n_robots + 1):
        body, heading = _place(rng, f"ロボット#{robot_id}", ROBOT_RADIUS, False, placed, settings,
                               with_heading=True)
        placed.append(body)
        spawns.append(Pose(body.center, heading))

    logger.debug(f"ワールド生成完了: seed={seed}, ロボット{n_robots}台, 箱{n_boxes}個")

    return WorldSpec(
        arena_side=settings.arena_side,
        boxes=tuple(boxes),
        light=LightSource(light_body.center, settings.light_intensity),
        spawns=tuple(spawns),
        world_id=world_id,
        seed=seed
    )


def reduce_to_group(spec: WorldSpec, k: int) -> WorldSpec:
    """ロボット#1〜#kだけを残したワールドを返す

    Raises:
        ValueError: k が範囲外の場合
    """
    if not 1 <= k <= spec.n_robots:
        raise ValueError(f"kは1〜{spec.n_robots}の範囲で指定してください: {k}")
    return replace(spec, spawns=spec.spawns[:k])


def min_pairwise_clearance(spec: WorldSpec, settings: Optional[WorldSettings] = None) -> float:
    """ワールド内の全物体ペアの最小隙間（監査用）"""
    settings = settings or WorldSettings()
    bodies = [_PlacedBody(spec.light.position, settings.light_placement_radius, False)]
    bodies += [_PlacedBody(box.center, box.half_extent, True) for box in spec.boxes]
    bodies += [_PlacedBody(pose.position, ROBOT_RADIUS, False) for pose in spec.spawns]

    result = math.inf
    for i in range(len(bodies)):
        for j in range(i + 1, len(bodies)):
            result = min(result, body_clearance(bodies[i], bodies[j]))
    return result
