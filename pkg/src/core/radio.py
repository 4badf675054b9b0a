# src/core/radio.py

import logging
from typing import Dict, List, Mapping

from ..models.geometry import Vec2
from ..models.messages import Message, RangePolicy
from .errors import ProtocolError


class RadioBus:
    """範囲制限付きのブロードキャスト通信路

    ティック t に送信されたメッセージは、ティック t+1 の開始時に一度だけ配送され、
    その後破棄される。送信者自身には配送しない。
    """

    def __init__(self, tick: int = 0):
        self.tick = tick
        self.pending: List[Message] = []
        self.logger = logging.getLogger(__name__)

    def advance_to(self, tick: int) -> None:
        """現在ティックを進める（未配送メッセージが残っていてはならない）"""
        if self.pending:
            raise ProtocolError(f"未配送のメッセージが{len(self.pending)}件あります")
        self.tick = tick

    def broadcast(self, message: Message) -> None:
        """メッセージを送信キューに追加

        Raises:
            ProtocolError: 送信ティックが現在ティックと一致しない場合
        """
        if message.emission_tick != self.tick:
            raise ProtocolError(
                f"送信ティック不一致: message={message.emission_tick}, bus={self.tick}"
            )
        self.pending.append(message)

    def deliver(self, receiver_positions: Mapping[int, Vec2],
                policy: RangePolicy) -> Dict[int, List[Message]]:
        """前ティックのメッセージを配送してキューを空にする

        送信位置（送信時）と受信位置（配送時）の距離で範囲を判定する。

        Returns:
            Dict[int, List[Message]]: 受信者ID → 送信順のメッセージ
        """
        inboxes: Dict[int, List[Message]] = {robot_id: [] for robot_id in receiver_positions}

        for message in self.pending:
            for robot_id, position in receiver_positions.items():
                if robot_id == message.sender_id:
                    continue
                if policy.covers(message.emission_position.distance_to(position)):
                    inboxes[robot_id].append(message)

        if self.pending:
            delivered = sum(len(inbox) for inbox in inboxes.values())
            self.logger.debug(
                f"配送: tick={self.tick}, 送信{len(self.pending)}件 → 受信{delivered}件 (range={policy.label})"
            )
        self.pending = []
        return inboxes


def deliver(bus: RadioBus, receiver_positions: Mapping[int, Vec2],
            policy: RangePolicy) -> Dict[int, List[Message]]:
    """RadioBus.deliver の関数形式"""
    return bus.deliver(receiver_positions, policy)


def broadcast(bus: RadioBus, message: Message) -> None:
    """RadioBus.broadcast の関数形式"""
    bus.broadcast(message)
