# src/models/run_record.py

from dataclasses import dataclass, field
from typing import Dict, List, Any, Optional, Tuple
from enum import Enum

from .messages import RangePolicy


class EventKind(Enum):
    """イベントログの種類"""
    MOB_DECISION = "MobDecision"
    CALL_SENT = "CallSent"
    ACK_SENT = "AckSent"


class RunStatus(Enum):
    """実行終了時のモビング状態"""
    UNANIMOUS = "unanimous"
    PARTIAL = "partial"
    FAILED = "failed"


@dataclass(frozen=True)
class Event:
    """イベントログの1行"""
    time: float
    robot_id: int
    kind: EventKind
    payload: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        """JSONL出力用の辞書（MobDecision は payload なし）"""
        data: Dict[str, Any] = {
            'time_s': self.time,
            'robot_id': self.robot_id,
            'kind': self.kind.value
        }
        if self.payload is not None:
            data['payload'] = self.payload
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'Event':
        return cls(
            time=float(data['time_s']),
            robot_id=int(data['robot_id']),
            kind=EventKind(data['kind']),
            payload=data.get('payload')
        )


@dataclass
class PhysicsAudit:
    """物理不変条件の監査結果"""
    max_robot_overlap: float = 0.0
    max_box_overlap: float = 0.0
    contained: bool = True
    ticks_checked: int = 0

    def merge(self, other: 'PhysicsAudit') -> None:
        """他の監査結果を取り込む"""
        self.max_robot_overlap = max(self.max_robot_overlap, other.max_robot_overlap)
        self.max_box_overlap = max(self.max_box_overlap, other.max_box_overlap)
        self.contained = self.contained and other.contained
        self.ticks_checked += other.ticks_checked

    def passes(self, tolerance: float = 1e-6) -> bool:
        return (self.contained and
                self.max_robot_overlap <= tolerance and
                self.max_box_overlap <= tolerance)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'max_robot_overlap': self.max_robot_overlap,
            'max_box_overlap': self.max_box_overlap,
            'contained': self.contained,
            'ticks_checked': self.ticks_checked
        }


@dataclass(frozen=True)
class TraceRow:
    """姿勢トレースの1行"""
    tick: int
    robot_id: int
    x: float
    y: float
    heading: float
    mode: str


@dataclass
class RunRecord:
    """1回の観測結果"""
    world_id: int
    range_policy: RangePolicy
    group_size: int
    status: RunStatus
    n_mobbing: int
    decision_times: Dict[int, Optional[float]]
    first_call_time: Optional[float] = None
    world_seed: Optional[int] = None
    run_id: int = 0

    @property
    def participation_pct(self) -> float:
        """参加率（%）"""
        return 100.0 * self.n_mobbing / self.group_size

    @property
    def is_unanimous(self) -> bool:
        return self.status is RunStatus.UNANIMOUS

    def to_dict(self) -> Dict[str, Any]:
        """辞書形式に変換"""
        return {
            'run_id': self.run_id,
            'world_id': self.world_id,
            'world_seed': self.world_seed,
            'range_m': self.range_policy.label,
            'group_size': self.group_size,
            'status': self.status.value,
            'n_mobbing': self.n_mobbing,
            'participation_pct': self.participation_pct,
            'first_call_t_s': self.first_call_time,
            'decision_times': dict(self.decision_times)
        }


@dataclass(frozen=True)
class Condition:
    """実験条件（通信範囲 × 群れサイズ）"""
    range_policy: RangePolicy
    group_size: int

    def __post_init__(self):
        if self.group_size < 1:
            raise ValueError(f"group_sizeは1以上である必要があります: {self.group_size}")

    @property
    def label(self) -> str:
        return f"range={self.range_policy.label}, group_size={self.group_size}"


# 通信範囲3水準 × 群れサイズ2水準
CANONICAL_CONDITIONS: Tuple[Condition, ...] = tuple(
    Condition(policy, size)
    for policy in (RangePolicy.infinite(), RangePolicy.of_meters(0.5), RangePolicy.of_meters(0.1))
    for size in (10, 3)
)


@dataclass
class SweepResult:
    """スイープ全体の結果（ワールド順 → 条件順）"""
    records: List[RunRecord]
    master_seed: int
    config_snapshot: Dict[str, Any] = field(default_factory=dict)
    conditions: Tuple[Condition, ...] = CANONICAL_CONDITIONS
    audit: Optional[PhysicsAudit] = None

    @property
    def n_worlds(self) -> int:
        return len({record.world_id for record in self.records})
