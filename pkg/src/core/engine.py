# src/core/engine.py

"""固定タイムステップのシミュレーションループ

1ティックの処理順:
  (1) 前ティックのメッセージ配送
  (2) ID昇順にセンサー読み取り → 意思決定 → 送信
  (3) 一輪車モデルの厳密な円弧積分
  (4) 衝突解決（ロボット同士 → ロボットと箱 → 壁）
  (5) イベント記録（時刻 = (tick+1)·dt）
"""

import math
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence

import numpy as np

from ..models.geometry import Vec2, Pose, Circle, GEOM_TOLERANCE
from ..models.world import WorldSpec, ROBOT_RADIUS
from ..models.messages import MessageOrigin
from ..models.controller_state import ControllerState, WheelCommand
from ..models.sensors import SideReading
from ..models.sim_config import SimConfig
from ..models.run_record import (
    Event, EventKind, RunStatus, RunRecord, PhysicsAudit, TraceRow
)
from .geometry import (
    FloatArray, box_arrays, resolve_circle_circle, resolve_circle_box, circle_circle_overlap,
    disc_overlaps, disc_box_overlaps, wall_excess
)
from .sensing import read_light_sensors, read_proximity_sensors
from .controller import decide
from .radio import RadioBus

logger = logging.getLogger(__name__)

# 衝突解決を打ち切る残差（m）
_RESIDUAL_TOLERANCE = 1e-9
# 押し戻しの上乗せ量（m）。解決した組には 2·_SEPARATION_SLACK の隙間が残る
_SEPARATION_SLACK = 1e-7
# パス開始時の近傍判定の余裕（m）
_BROAD_MARGIN = 0.01


@dataclass
class SimState:
    """シミュレーションの可変状態"""
    tick: int
    poses: Dict[int, Pose]
    controller_states: Dict[int, ControllerState]
    bus: RadioBus
    event_log: List[Event] = field(default_factory=list)

    @property
    def robot_ids(self) -> List[int]:
        return sorted(self.poses)


@dataclass
class RunOutcome:
    """run() の戻り値"""
    record: RunRecord
    events: List[Event]
    final_states: Dict[int, ControllerState]
    final_poses: Dict[int, Pose]
    trace: List[TraceRow] = field(default_factory=list)
    audit: Optional[PhysicsAudit] = None


def event_time(tick: int, dt: float) -> float:
    """ティック終了時刻（秒）"""
    return round((tick + 1) * dt, 9)


def initial_state(world: WorldSpec) -> SimState:
    """初期状態（全ロボットが回避モード）"""
    return SimState(
        tick=0,
        poses={robot_id: pose for robot_id, pose in enumerate(world.spawns, 1)},
        controller_states={robot_id: ControllerState() for robot_id in world.robot_ids},
        bus=RadioBus(tick=0)
    )


def integrate_pose(pose: Pose, command: WheelCommand, config: SimConfig) -> Pose:
    """差動二輪（一輪車モデル）の厳密な円弧更新"""
    v = config.wheel_radius * (command.omega_left + command.omega_right) / 2.0
    w = config.wheel_radius * (command.omega_right - command.omega_left) / config.axle_length
    theta = pose.heading
    x, y = pose.position.x, pose.position.y

    if abs(w) < 1e-12:
        x += v * config.dt * math.cos(theta)
        y += v * config.dt * math.sin(theta)
        return Pose(Vec2(x, y), theta)

    theta_next = theta + w * config.dt
    x += (v / w) * (math.sin(theta_next) - math.sin(theta))
    y -= (v / w) * (math.cos(theta_next) - math.cos(theta))
    return Pose(Vec2(x, y), theta_next)


def _positions_array(positions: Sequence[Vec2]) -> FloatArray:
    return np.array([[p.x, p.y] for p in positions], dtype=np.float64).reshape(-1, 2)


def _clamp_to_arena(p: Vec2, side: float) -> Vec2:
    r = ROBOT_RADIUS
    return Vec2(min(max(p.x, r), side - r), min(max(p.y, r), side - r))


def _overlap_residual(xy: FloatArray, world: WorldSpec) -> float:
    """ロボット同士・ロボットと箱の重なり、壁からのはみ出しの最大値"""
    centers, halves = box_arrays(world.boxes)
    robot = disc_overlaps(xy, ROBOT_RADIUS)
    box = disc_box_overlaps(xy, ROBOT_RADIUS, centers, halves)
    return max(
        float(robot.max()) if robot.size else 0.0,
        float(box.max()) if box.size else 0.0,
        wall_excess(xy, ROBOT_RADIUS, world.arena_side)
    )


def _separate_pair(positions: List[Vec2], i: int, j: int, side: float) -> None:
    """ロボット i, j を引き離す。片方が壁で止まったら不足分をもう片方が動く"""
    r = ROBOT_RADIUS
    ci, cj = Circle(positions[i], r), Circle(positions[j], r)
    if circle_circle_overlap(ci, cj) <= 0.0:
        return

    di, dj = resolve_circle_circle(ci, cj, _SEPARATION_SLACK)
    wanted_i, wanted_j = positions[i] + di, positions[j] + dj
    pi, pj = _clamp_to_arena(wanted_i, side), _clamp_to_arena(wanted_j, side)

    gap = pi.distance_to(pj)
    if gap < 2.0 * r:
        offset = pj - pi
        away = offset * (1.0 / gap) if gap > GEOM_TOLERANCE else dj * (1.0 / dj.norm())
        shortfall = 2.0 * r - gap + _SEPARATION_SLACK
        if wanted_i.distance_to(pi) >= wanted_j.distance_to(pj):
            pj = _clamp_to_arena(pj + away * shortfall, side)
        else:
            pi = _clamp_to_arena(pi - away * shortfall, side)

    positions[i], positions[j] = pi, pj


def _collision_pass(positions: List[Vec2], world: WorldSpec) -> None:
    """衝突解決1パス（positions を更新する）"""
    r = ROBOT_RADIUS
    side = world.arena_side
    xy = _positions_array(positions)

    if len(positions) > 1:
        dist = np.hypot(xy[:, None, 0] - xy[None, :, 0], xy[:, None, 1] - xy[None, :, 1])
        rows, cols = np.nonzero(np.triu(dist < 2.0 * r + _BROAD_MARGIN, k=1))
        for i, j in zip(rows.tolist(), cols.tolist()):
            _separate_pair(positions, i, j, side)

    centers, halves = box_arrays(world.boxes)
    if centers.shape[0]:
        reach = halves[None, :, None] + r + _BROAD_MARGIN
        near = (np.abs(xy[:, None, :] - centers[None, :, :]) < reach).all(axis=2)
        rows, cols = np.nonzero(near)
        for i, k in zip(rows.tolist(), cols.tolist()):
            positions[i] = positions[i] + resolve_circle_box(Circle(positions[i], r), world.boxes[k],
                                                             _SEPARATION_SLACK)

    for i, p in enumerate(positions):
        positions[i] = _clamp_to_arena(p, side)


def resolve_collisions(poses: Mapping[int, Pose], world: WorldSpec,
                       config: SimConfig) -> Dict[int, Pose]:
    """衝突を解決する

    重なりがあれば最低 collision_passes 回のパスを行い、その後も残差が
    許容値を超える間は collision_max_passes 回まで続ける。
    """
    ids = sorted(poses)
    positions = [poses[i].position for i in ids]

    residual = _overlap_residual(_positions_array(positions), world)
    passes = 0
    while passes < config.collision_max_passes and (
            residual > _RESIDUAL_TOLERANCE or 0 < passes < config.collision_passes):
        _collision_pass(positions, world)
        passes += 1
        residual = _overlap_residual(_positions_array(positions), world)

    if residual > _RESIDUAL_TOLERANCE:
        logger.warning(f"衝突解決が{passes}パスで収束しませんでした: 残差={residual:.3e}m")

    return {i: Pose(positions[index], poses[i].heading) for index, i in enumerate(ids)}


def audit_physics(poses: Mapping[int, Pose], world: WorldSpec) -> PhysicsAudit:
    """重なり深さと壁内包を検査"""
    xy = _positions_array([poses[i].position for i in sorted(poses)])
    centers, halves = box_arrays(world.boxes)
    robot = disc_overlaps(xy, ROBOT_RADIUS)
    box = disc_box_overlaps(xy, ROBOT_RADIUS, centers, halves)
    return PhysicsAudit(
        max_robot_overlap=float(robot.max()) if robot.size else 0.0,
        max_box_overlap=float(box.max()) if box.size else 0.0,
        contained=wall_excess(xy, ROBOT_RADIUS, world.arena_side) <= GEOM_TOLERANCE,
        ticks_checked=1
    )


def step(sim: SimState, world: WorldSpec, config: SimConfig,
         audit: Optional[PhysicsAudit] = None) -> SimState:
    """1ティック進める（sim を更新して返す）"""
    if sim.tick >= config.n_ticks:
        raise ValueError(f"実行時間を超えています: tick={sim.tick}, n_ticks={config.n_ticks}")

    ids = sim.robot_ids
    positions = {i: sim.poses[i].position for i in ids}

    # (1) 配送
    inboxes = sim.bus.deliver(positions, config.range_policy)
    sim.bus.advance_to(sim.tick)

    # (2) 意思決定（ティック開始時のスナップショットを全員分まとめて読む）
    now = event_time(sim.tick, config.dt)
    params = config.controller_params
    rig = config.sensor_rig
    xy = _positions_array([positions[i] for i in ids])
    headings = np.array([sim.poses[i].heading for i in ids], dtype=np.float64)
    light_left, light_right = read_light_sensors(world, xy, headings, rig)
    prox_left, prox_right = read_proximity_sensors(world, xy, headings, rig)

    commands: Dict[int, WheelCommand] = {}
    new_events: List[Event] = []

    for index, i in enumerate(ids):
        light = SideReading(left=float(light_left[index]), right=float(light_right[index]))
        prox = SideReading(left=float(prox_left[index]), right=float(prox_right[index]))
        previous = sim.controller_states[i]

        state, command, outbox = decide(
            previous, light, prox, inboxes.get(i, []), params, now,
            MessageOrigin(robot_id=i, position=positions[i], tick=sim.tick)
        )

        for message in outbox:
            sim.bus.broadcast(message)
            kind = EventKind.CALL_SENT if message.is_call else EventKind.ACK_SENT
            new_events.append(Event(time=now, robot_id=i, kind=kind, payload=message.payload))

        if state.is_mobbing and not previous.is_mobbing:
            new_events.append(Event(time=now, robot_id=i, kind=EventKind.MOB_DECISION))
            logger.debug(f"ロボット#{i} がモビングに切り替え: t={now:.3f}s")

        sim.controller_states[i] = state
        commands[i] = command

    # (3) 積分
    moved = {i: integrate_pose(sim.poses[i], commands[i], config) for i in ids}

    # (4) 衝突解決
    sim.poses = resolve_collisions(moved, world, config)
    if audit is not None:
        audit.merge(audit_physics(sim.poses, world))

    # (5) イベント記録
    sim.event_log.extend(new_events)
    sim.tick += 1
    return sim



def classify(final_states: Mapping[int, ControllerState], group_size: int) -> RunStatus:
    """終了時のモビング状態を分類"""
    if group_size < 1:
        raise ValueError(f"group_sizeは1以上である必要があります: {group_size}")
    n_mobbing = sum(1 for state in final_states.values() if state.is_mobbing)
    if n_mobbing == group_size:
        return RunStatus.UNANIMOUS
    if n_mobbing == 0:
        return RunStatus.FAILED
    return RunStatus.PARTIAL


def _trace_rows(sim: SimState) -> List[TraceRow]:
    return [
        TraceRow(
            tick=sim.tick,
            robot_id=i,
            x=sim.poses[i].position.x,
            y=sim.poses[i].position.y,
            heading=sim.poses[i].heading,
            mode=sim.controller_states[i].mode.value
        )
        for i in sim.robot_ids
    ]


def run(world: WorldSpec, config: SimConfig, audit: bool = False,
        trace_stride: int = 0) -> RunOutcome:
    """1観測分のシミュレーションを実行

    Args:
        world: ワールド定義
        config: シミュレーション設定
        audit: 物理不変条件を毎ティック検査するか
        trace_stride: 姿勢トレースの間引き間隔（0 なら記録しない）

    Returns:
        RunOutcome: 記録・イベントログ・最終状態
    """
    sim = initial_state(world)
    physics_audit = PhysicsAudit() if audit else None
    trace: List[TraceRow] = _trace_rows(sim) if trace_stride > 0 else []

    logger.info(
        f"実行開始: world={world.world_id}, robots={world.n_robots}, range={config.range_policy.label}"
    )

    n_ticks = config.n_ticks
    for _ in range(n_ticks):
        step(sim, world, config, physics_audit)
        if trace_stride > 0 and (sim.tick % trace_stride == 0 or sim.tick == n_ticks):
            trace.extend(_trace_rows(sim))

    group_size = world.n_robots
    status = classify(sim.controller_states, group_size)
    first_call = next((e.time for e in sim.event_log if e.kind is EventKind.CALL_SENT), None)

    record = RunRecord(
        world_id=world.world_id,
        range_policy=config.range_policy,
        group_size=group_size,
        status=status,
        n_mobbing=sum(1 for s in sim.controller_states.values() if s.is_mobbing),
        decision_times={i: sim.controller_states[i].mob_decision_time for i in sim.robot_ids},
        first_call_time=first_call,
        world_seed=world.seed
    )

    logger.info(
        f"実行完了: world={world.world_id}, range={config.range_policy.label}, "
        f"status={status.value}, 参加率={record.participation_pct:.2f}%"
    )

    return RunOutcome(
        record=record,
        events=list(sim.event_log),
        final_states=dict(sim.controller_states),
        final_poses=dict(sim.poses),
        trace=trace,
        audit=physics_audit
    )
