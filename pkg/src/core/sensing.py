# src/core/sensing.py

"""光センサー・近接センサーのモデル

左右それぞれのセンサー値を合計し、ブライテンベルグ制御則の入力とする。
光は箱だけが遮る（ロボットと壁は遮らない）。

read_light_sensors / read_proximity_sensors は全ロボットを1回の配列計算で読む。
1台分の関数（light_side_sums など）も同じ計算を通る。
"""

import math
from functools import lru_cache
from typing import Optional, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray

from ..models.geometry import Vec2, Pose, AxisBox
from ..models.world import WorldSpec, ROBOT_RADIUS
from ..models.sensors import SensorRig, SideReading
from ..models.controller_state import ControllerParams
from .geometry import (
    box_arrays, segments_occluded, ray_box_distances, ray_circle_distances, ray_arena_distances
)

FloatArray = NDArray[np.float64]

DEFAULT_RIG = SensorRig()


@lru_cache(maxsize=32)
def _layout_arrays(angles: Tuple[float, ...], is_left: Tuple[bool, ...]) -> Tuple[FloatArray, NDArray[np.bool_]]:
    return np.array(angles, dtype=np.float64), np.array(is_left, dtype=bool)


def _mounts(xy: FloatArray, headings: FloatArray, bearings: FloatArray,
            mount_radius: float) -> Tuple[FloatArray, FloatArray]:
    """センサーのワールド座標と外向き法線（どちらも (n·k, 2)、ロボット順）"""
    angles = (headings[:, None] + bearings[None, :]).reshape(-1)
    normals = np.column_stack((np.cos(angles), np.sin(angles)))
    origins = np.repeat(xy, bearings.shape[0], axis=0)
    return origins + mount_radius * normals, normals


def _pose_arrays(pose: Pose) -> Tuple[FloatArray, FloatArray]:
    return np.array([[pose.position.x, pose.position.y]]), np.array([pose.heading])


def _light_values(points: FloatArray, normals: FloatArray, light_xy: FloatArray,
                  intensity: float, boxes: Tuple[AxisBox, ...], d_min: float) -> FloatArray:
    to_light = light_xy[None, :] - points
    dist = np.hypot(to_light[:, 0], to_light[:, 1])
    facing = normals[:, 0] * to_light[:, 0] + normals[:, 1] * to_light[:, 1]
    with np.errstate(divide='ignore', invalid='ignore'):
        cos_phi = np.where(dist > 0.0, facing / dist, 1.0)

    values = intensity * np.maximum(cos_phi, 0.0) / np.maximum(dist, d_min) ** 2

    centers, halves = box_arrays(tuple(boxes))
    blocked = segments_occluded(points, light_xy, centers, halves)
    return np.where(blocked, 0.0, values)


def _proximity_values(world: WorldSpec, points: FloatArray, normals: FloatArray,
                      robots_xy: FloatArray, owners: Optional[NDArray[np.intp]],
                      rig: SensorRig) -> FloatArray:
    """owners[k] は光線 k を出したロボットの robots_xy 上の行（自分自身は検出しない）"""
    centers, halves = box_arrays(tuple(world.boxes))
    hit = ray_arena_distances(points, normals, world.arena_side)
    if centers.shape[0]:
        hit = np.minimum(hit, ray_box_distances(points, normals, centers, halves).min(axis=1))

    if robots_xy.shape[0]:
        to_robots = ray_circle_distances(points, normals, robots_xy, ROBOT_RADIUS)
        if owners is not None:
            to_robots[np.arange(points.shape[0]), owners] = np.inf
        hit = np.minimum(hit, to_robots.min(axis=1))

    return np.clip((rig.prox_range - hit) / rig.prox_range, 0.0, 1.0)


def _split_sides(values: FloatArray, is_left: NDArray[np.bool_]) -> Tuple[FloatArray, FloatArray]:
    """(n, k) の値を左右の合計 (n,), (n,) にまとめる"""
    return values[:, is_left].sum(axis=1), values[:, ~is_left].sum(axis=1)


def read_light_sensors(world: WorldSpec, xy: FloatArray, headings: FloatArray,
                       rig: SensorRig = DEFAULT_RIG) -> Tuple[FloatArray, FloatArray]:
    """全ロボットの光センサー左右合計

    Args:
        world: ワールド定義
        xy: ロボット位置 (n, 2)
        headings: ロボットの向き (n,)
        rig: センサー配置

    Returns:
        (left, right): それぞれ (n,)
    """
    bearings, is_left = _layout_arrays(*rig.light_layout)
    points, normals = _mounts(xy, headings, bearings, rig.mount_radius)
    light_xy = np.array([world.light.position.x, world.light.position.y])
    values = _light_values(points, normals, light_xy, world.light.intensity, world.boxes, rig.d_min)
    return _split_sides(values.reshape(xy.shape[0], -1), is_left)


def read_proximity_sensors(world: WorldSpec, xy: FloatArray, headings: FloatArray,
                           rig: SensorRig = DEFAULT_RIG) -> Tuple[FloatArray, FloatArray]:
    """全ロボットの近接センサー左右合計（各ロボットは自分以外の全員を検出対象にする）"""
    bearings, is_left = _layout_arrays(*rig.prox_layout)
    points, normals = _mounts(xy, headings, bearings, rig.mount_radius)
    owners = np.repeat(np.arange(xy.shape[0]), bearings.shape[0])
    values = _proximity_values(world, points, normals, xy, owners, rig)
    return _split_sides(values.reshape(xy.shape[0], -1), is_left)


def light_contributions(pose: Pose, light_position: Vec2, intensity: float,
                        boxes: Tuple[AxisBox, ...], rig: SensorRig = DEFAULT_RIG) -> FloatArray:
    """光センサーごとの値（rig.light_layout の順）"""
    bearings, _ = _layout_arrays(*rig.light_layout)
    points, normals = _mounts(*_pose_arrays(pose), bearings, rig.mount_radius)
    light_xy = np.array([light_position.x, light_position.y])
    return _light_values(points, normals, light_xy, intensity, tuple(boxes), rig.d_min)


def light_side_sums(world: WorldSpec, pose: Pose, rig: SensorRig = DEFAULT_RIG) -> SideReading:
    """光センサーの左右合計

    センサー値 = I0·max(0, cos φ) / max(d, d_min)²（箱で遮られたら0）。
    """
    left, right = read_light_sensors(world, *_pose_arrays(pose), rig)
    return SideReading(left=float(left[0]), right=float(right[0]))


def proximity_contributions(world: WorldSpec, pose: Pose,
                            other_positions: Sequence[Vec2] = (),
                            rig: SensorRig = DEFAULT_RIG) -> FloatArray:
    """近接センサーごとの値（0〜1、rig.prox_layout の順）"""
    bearings, _ = _layout_arrays(*rig.prox_layout)
    points, normals = _mounts(*_pose_arrays(pose), bearings, rig.mount_radius)
    others = np.array([[p.x, p.y] for p in other_positions], dtype=np.float64).reshape(-1, 2)
    return _proximity_values(world, points, normals, others, None, rig)


def proximity_side_sums(world: WorldSpec, pose: Pose,
                        other_positions: Sequence[Vec2] = (),
                        rig: SensorRig = DEFAULT_RIG) -> SideReading:
    """近接センサーの左右合計（壁・箱・他ロボットを検出）"""
    _, is_left = _layout_arrays(*rig.prox_layout)
    values = proximity_contributions(world, pose, other_positions, rig)
    return SideReading(left=float(values[is_left].sum()), right=float(values[~is_left].sum()))


def calibrate_detection_radius(params: ControllerParams, rig: SensorRig = DEFAULT_RIG,
                               intensity: float = 2.0, step: float = 0.001,
                               start: float = 0.9, stop: float = 0.05) -> Optional[float]:
    """遮蔽のない環境で光源に正対したロボットが I_th を超える最大距離

    start から stop まで step 刻みで近づき、最初に閾値を超えた距離を返す。
    範囲内で超えなければ None。
    """
    _, is_left = _layout_arrays(*rig.light_layout)
    light = Vec2(0.0, 0.0)
    n_steps = int(math.floor((start - stop) / step + 1e-9))

    for i in range(n_steps + 1):
        distance = round(start - i * step, 9)
        values = light_contributions(Pose(Vec2(-distance, 0.0), 0.0), light, intensity, (), rig)
        if max(values[is_left].sum(), values[~is_left].sum()) > params.i_th:
            return distance
    return None
