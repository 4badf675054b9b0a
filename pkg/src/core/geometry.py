# src/core/geometry.py

"""幾何プリミティブの交差判定と衝突解決

スカラー版は値型（Vec2, AxisBox, ...）を受け取る純粋関数。
センサー計算用に numpy でベクトル化した版も提供する。
"""

import math
from functools import lru_cache
from typing import Iterable, Optional, Tuple

import numpy as np
from numpy.typing import NDArray

from ..models.geometry import Vec2, AxisBox, Ray, Circle, GEOM_TOLERANCE

FloatArray = NDArray[np.float64]

_ZERO = Vec2(0.0, 0.0)


def _slab_interval(origin: Vec2, delta: Vec2, box: AxisBox) -> Optional[Tuple[float, float]]:
    """origin + t·delta が箱の内部にある t の区間（スラブ法）"""
    t_enter, t_exit = -math.inf, math.inf
    lo, hi = box.min_corner, box.max_corner

    for o, d, lo_a, hi_a in ((origin.x, delta.x, lo.x, hi.x), (origin.y, delta.y, lo.y, hi.y)):
        if d == 0.0:
            if o < lo_a or o > hi_a:
                return None
            continue
        t1 = (lo_a - o) / d
        t2 = (hi_a - o) / d
        if t1 > t2:
            t1, t2 = t2, t1
        t_enter = max(t_enter, t1)
        t_exit = min(t_exit, t2)

    if t_enter > t_exit:
        return None
    return t_enter, t_exit


def ray_box_intersect(ray: Ray, box: AxisBox) -> Optional[float]:
    """半直線と箱の最初の交点までの距離

    始点が箱の内部（境界含む）なら 0、交差しなければ None。
    """
    interval = _slab_interval(ray.origin, ray.direction, box)
    if interval is None:
        return None
    t_enter, t_exit = interval
    if t_exit < 0.0:
        return None
    return max(t_enter, 0.0)


def segment_occluded(p: Vec2, q: Vec2, boxes: Iterable[AxisBox]) -> bool:
    """開線分 (p, q) がいずれかの箱と交差するか"""
    delta = q - p
    length = delta.norm()
    if length <= 0.0:
        raise ValueError("segment_occluded には異なる2点が必要です")

    for box in boxes:
        interval = _slab_interval(p, delta, box)
        if interval is None:
            continue
        lo = max(interval[0], 0.0)
        hi = min(interval[1], 1.0)
        # 端点に接するだけの場合は遮蔽とみなさない
        if lo <= hi and lo * length < length - GEOM_TOLERANCE and hi * length > GEOM_TOLERANCE:
            return True
    return False


def resolve_circle_circle(c1: Circle, c2: Circle, slack: float = 0.0) -> Tuple[Vec2, Vec2]:
    """2円の重なりを半分ずつ押し戻す変位

    slack > 0 なら両側にさらに slack ずつ押し、解決後に 2·slack の隙間を残す。
    """
    offset = c2.center - c1.center
    dist = offset.norm()
    depth = c1.radius + c2.radius - dist
    if depth <= 0.0:
        return _ZERO, _ZERO

    if dist <= GEOM_TOLERANCE:
        normal = Vec2(1.0, 0.0)
    else:
        normal = offset * (1.0 / dist)
    half = depth / 2.0 + slack
    return normal * -half, normal * half


def _box_face_push(center: Vec2, box: AxisBox) -> Tuple[Vec2, float]:
    """中心が箱の内部にあるとき、最も近い面の外向き法線と面までの距離"""
    lo, hi = box.min_corner, box.max_corner
    candidates = (
        (Vec2(1.0, 0.0), hi.x - center.x),
        (Vec2(-1.0, 0.0), center.x - lo.x),
        (Vec2(0.0, 1.0), hi.y - center.y),
        (Vec2(0.0, -1.0), center.y - lo.y),
    )
    normal, face_dist = candidates[0]
    for cand_normal, cand_dist in candidates[1:]:
        if cand_dist < face_dist:
            normal, face_dist = cand_normal, cand_dist
    return normal, face_dist


def _nearest_point_on_box(center: Vec2, box: AxisBox) -> Vec2:
    lo, hi = box.min_corner, box.max_corner
    return Vec2(min(max(center.x, lo.x), hi.x), min(max(center.y, lo.y), hi.y))


def resolve_circle_box(circle: Circle, box: AxisBox, slack: float = 0.0) -> Vec2:
    """円を箱の外へ出す最小の変位（箱は動かない）。slack だけ余分に押し出す"""
    nearest = _nearest_point_on_box(circle.center, box)
    diff = circle.center - nearest
    dist = diff.norm()

    if dist > GEOM_TOLERANCE:
        if dist >= circle.radius:
            return _ZERO
        return diff * ((circle.radius - dist + slack) / dist)

    # 中心が箱の内部または面上
    normal, face_dist = _box_face_push(circle.center, box)
    return normal * (face_dist + circle.radius + slack)


def circle_circle_overlap(c1: Circle, c2: Circle) -> float:
    """2円の重なり深さ（重なりなしなら0）"""
    return max(0.0, c1.radius + c2.radius - c1.center.distance_to(c2.center))


def circle_box_overlap(circle: Circle, box: AxisBox) -> float:
    """円と箱の重なり深さ（重なりなしなら0）"""
    nearest = _nearest_point_on_box(circle.center, box)
    dist = circle.center.distance_to(nearest)
    if dist > GEOM_TOLERANCE:
        return max(0.0, circle.radius - dist)
    _, face_dist = _box_face_push(circle.center, box)
    return face_dist + circle.radius


# ---------------------------------------------------------------------------
# ベクトル化版（センサー計算・衝突判定用）
# ---------------------------------------------------------------------------

@lru_cache(maxsize=128)
def box_arrays(boxes: Tuple[AxisBox, ...]) -> Tuple[FloatArray, FloatArray]:
    """箱の中心 (m, 2) と半辺長 (m,)"""
    centers = np.array([[b.center.x, b.center.y] for b in boxes], dtype=np.float64).reshape(-1, 2)
    halves = np.array([b.half_extent for b in boxes], dtype=np.float64)
    return centers, halves


def disc_overlaps(xy: FloatArray, radius: float) -> FloatArray:
    """同半径の円どうしの重なり深さ（i < j の組、重なりなしは0）"""
    n = xy.shape[0]
    if n < 2:
        return np.zeros(0)
    rows, cols = np.triu_indices(n, k=1)
    dist = np.hypot(xy[rows, 0] - xy[cols, 0], xy[rows, 1] - xy[cols, 1])
    return np.maximum(2.0 * radius - dist, 0.0)


def disc_box_overlaps(xy: FloatArray, radius: float,
                      centers: FloatArray, halves: FloatArray) -> FloatArray:
    """円 × 箱の重なり深さ (n, m)。circle_box_overlap と同じ定義"""
    if centers.shape[0] == 0 or xy.shape[0] == 0:
        return np.zeros((xy.shape[0], centers.shape[0]))
    gap = np.abs(xy[:, None, :] - centers[None, :, :]) - halves[None, :, None]
    outside = np.hypot(np.maximum(gap[..., 0], 0.0), np.maximum(gap[..., 1], 0.0))
    inside = radius - gap.max(axis=2)
    return np.where(outside > GEOM_TOLERANCE, np.maximum(radius - outside, 0.0), inside)


def wall_excess(xy: FloatArray, radius: float, side: float) -> float:
    """円が正方形アリーナからはみ出している最大量（m）"""
    if xy.shape[0] == 0:
        return 0.0
    return float(max(np.max(radius - xy), np.max(xy - (side - radius)), 0.0))


def _slab_intervals(origins: FloatArray, deltas: FloatArray,
                    centers: FloatArray, halves: FloatArray) -> Tuple[FloatArray, FloatArray]:
    """(k, m) の t_enter, t_exit を返す（交差なしは t_enter > t_exit）"""
    o = origins[:, None, :]
    d = deltas[:, None, :]
    lo = (centers - halves[:, None])[None, :, :]
    hi = (centers + halves[:, None])[None, :, :]

    with np.errstate(divide='ignore', invalid='ignore'):
        inv = 1.0 / d
        t1 = (lo - o) * inv
        t2 = (hi - o) * inv

    t_lo = np.minimum(t1, t2)
    t_hi = np.maximum(t1, t2)

    parallel = np.broadcast_to(d == 0.0, t_lo.shape)
    within = (o >= lo) & (o <= hi)
    t_lo = np.where(parallel, np.where(within, -np.inf, np.inf), t_lo)
    t_hi = np.where(parallel, np.where(within, np.inf, -np.inf), t_hi)

    return t_lo.max(axis=2), t_hi.min(axis=2)


def ray_box_distances(origins: FloatArray, directions: FloatArray,
                      centers: FloatArray, halves: FloatArray) -> FloatArray:
    """k本の半直線 × m個の箱の交点距離（交差なしは inf）"""
    if centers.shape[0] == 0:
        return np.full((origins.shape[0], 0), np.inf)
    t_enter, t_exit = _slab_intervals(origins, directions, centers, halves)
    hit = (t_exit >= 0.0) & (t_enter <= t_exit)
    return np.where(hit, np.maximum(t_enter, 0.0), np.inf)


def segments_occluded(starts: FloatArray, end: FloatArray,
                      centers: FloatArray, halves: FloatArray) -> NDArray[np.bool_]:
    """k本の開線分 (starts[i], end) がいずれかの箱と交差するか"""
    if centers.shape[0] == 0:
        return np.zeros(starts.shape[0], dtype=bool)
    deltas = end[None, :] - starts
    lengths = np.hypot(deltas[:, 0], deltas[:, 1])[:, None]
    t_enter, t_exit = _slab_intervals(starts, deltas, centers, halves)
    lo = np.maximum(t_enter, 0.0)
    hi = np.minimum(t_exit, 1.0)
    blocked = (lo <= hi) & (lo * lengths < lengths - GEOM_TOLERANCE) & (hi * lengths > GEOM_TOLERANCE)
    return blocked.any(axis=1)


def ray_circle_distances(origins: FloatArray, directions: FloatArray,
                         centers: FloatArray, radius: float) -> FloatArray:
    """k本の半直線 × m個の円の交点距離（始点が円内なら0、交差なしは inf）"""
    if centers.shape[0] == 0:
        return np.full((origins.shape[0], 0), np.inf)
    m = origins[:, None, :] - centers[None, :, :]
    b = np.einsum('kmi,ki->km', m, directions)
    c = np.einsum('kmi,kmi->km', m, m) - radius * radius
    disc = b * b - c
    with np.errstate(invalid='ignore'):
        t = -b - np.sqrt(disc)
    inside = c <= 0.0
    hit = (disc >= 0.0) & (t >= 0.0)
    return np.where(inside, 0.0, np.where(hit, t, np.inf))


def ray_arena_distances(origins: FloatArray, directions: FloatArray, side: float) -> FloatArray:
    """正方形アリーナ [0, side]² の壁までの距離（k,）"""
    with np.errstate(divide='ignore', invalid='ignore'):
        tx = np.where(directions[:, 0] > 0.0, (side - origins[:, 0]) / directions[:, 0],
                      np.where(directions[:, 0] < 0.0, -origins[:, 0] / directions[:, 0], np.inf))
        ty = np.where(directions[:, 1] > 0.0, (side - origins[:, 1]) / directions[:, 1],
                      np.where(directions[:, 1] < 0.0, -origins[:, 1] / directions[:, 1], np.inf))
    return np.maximum(np.minimum(tx, ty), 0.0)
