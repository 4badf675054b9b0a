# src/models/messages.py

import math
from dataclasses import dataclass
from typing import Dict, Any, Optional, Union
from enum import Enum

from .geometry import Vec2

CALL_PAYLOAD = "must mob"
ACK_PAYLOAD = "ok"

# 無限範囲を表すコード上の値
INFINITE_RANGE_SENTINEL = -1


class MessageKind(Enum):
    """無線メッセージの種類"""
    CALL = "call"
    ACK = "ack"

    @property
    def payload(self) -> str:
        """送信される文字列"""
        return CALL_PAYLOAD if self is MessageKind.CALL else ACK_PAYLOAD


@dataclass(frozen=True)
class Message:
    """モビングコール / 応答メッセージ"""
    kind: MessageKind
    sender_id: int
    emission_position: Vec2
    emission_tick: int

    @property
    def payload(self) -> str:
        return self.kind.payload

    @property
    def is_call(self) -> bool:
        return self.kind is MessageKind.CALL

    @property
    def is_ack(self) -> bool:
        return self.kind is MessageKind.ACK

    def to_dict(self) -> Dict[str, Any]:
        return {
            'kind': self.kind.value,
            'payload': self.payload,
            'sender_id': self.sender_id,
            'emission_position': self.emission_position.to_dict(),
            'emission_tick': self.emission_tick
        }


@dataclass(frozen=True)
class MessageOrigin:
    """送信元の情報（ロボットID・送信位置・送信ティック）"""
    robot_id: int
    position: Vec2
    tick: int

    def make(self, kind: MessageKind) -> Message:
        return Message(kind=kind, sender_id=self.robot_id,
                       emission_position=self.position, emission_tick=self.tick)


@dataclass(frozen=True)
class RangePolicy:
    """通信範囲。meters が None なら無限範囲"""
    meters: Optional[float] = None

    def __post_init__(self):
        if self.meters is not None and not (math.isfinite(self.meters) and self.meters > 0):
            raise ValueError(f"通信範囲は正の有限値である必要があります: {self.meters}")

    @classmethod
    def infinite(cls) -> 'RangePolicy':
        return cls(None)

    @classmethod
    def of_meters(cls, meters: float) -> 'RangePolicy':
        return cls(float(meters))

    @classmethod
    def parse(cls, value: Union[str, float, int, None]) -> 'RangePolicy':
        """文字列・数値から作成（"inf", "-1", -1 は無限範囲）

        Raises:
            ValueError: 解釈できない値の場合
        """
        if value is None:
            return cls.infinite()
        if isinstance(value, str):
            text = value.strip().lower()
            if text in ("inf", "infinite", "infinity", str(INFINITE_RANGE_SENTINEL)):
                return cls.infinite()
            try:
                number = float(text)
            except ValueError:
                raise ValueError(f"通信範囲を解釈できません: {value!r}")
        else:
            number = float(value)

        if number == INFINITE_RANGE_SENTINEL or math.isinf(number):
            return cls.infinite()
        return cls.of_meters(number)

    @property
    def is_infinite(self) -> bool:
        return self.meters is None

    def covers(self, distance: float) -> bool:
        """送信位置からの距離が範囲内か"""
        return self.meters is None or distance <= self.meters

    @property
    def label(self) -> str:
        """CSV等での表記（"inf", "0.5", "0.1"）"""
        return "inf" if self.meters is None else f"{self.meters:g}"

    @property
    def sort_key(self) -> float:
        """広い範囲ほど先に並ぶキー"""
        return -math.inf if self.meters is None else -self.meters

    def __str__(self) -> str:
        return self.label
