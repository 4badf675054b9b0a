"""無線通信路のユニットテスト"""
import numpy as np
import pytest

from src.models.geometry import Vec2
from src.models.messages import Message, MessageKind, RangePolicy
from src.core.radio import RadioBus, deliver, broadcast
from src.core.errors import ProtocolError

pytestmark = pytest.mark.unit


def _call(sender_id: int, position: Vec2, tick: int = 0) -> Message:
    return Message(MessageKind.CALL, sender_id, position, tick)


class TestRadioBus:
    """RadioBus のテスト"""

    def test_送信者には配送しない(self):
        # Given
        bus = RadioBus()
        broadcast(bus, _call(1, Vec2(0.5, 0.5)))

        # When
        inboxes = deliver(bus, {1: Vec2(0.5, 0.5), 2: Vec2(0.6, 0.5)}, RangePolicy.infinite())

        # Then
        assert inboxes[1] == []
        assert [m.sender_id for m in inboxes[2]] == [1]

    def test_範囲外には届かない(self):
        bus = RadioBus()
        bus.broadcast(_call(1, Vec2(0.0, 0.0)))

        inboxes = bus.deliver({2: Vec2(0.05, 0.0), 3: Vec2(0.5, 0.0)}, RangePolicy.of_meters(0.1))

        assert len(inboxes[2]) == 1
        assert inboxes[3] == []

    def test_境界ちょうどは届く(self):
        bus = RadioBus()
        bus.broadcast(_call(1, Vec2(0.0, 0.0)))
        inboxes = bus.deliver({2: Vec2(0.5, 0.0)}, RangePolicy.of_meters(0.5))
        assert len(inboxes[2]) == 1

    def test_送信位置で距離を判定(self):
        """配送時には送信者の現在位置ではなく送信時の位置を使う"""
        bus = RadioBus()
        bus.broadcast(_call(1, Vec2(0.0, 0.0)))

        # 送信者は遠くへ移動済みでも、受信者が送信位置の近くなら届く
        inboxes = bus.deliver({1: Vec2(0.9, 0.9), 2: Vec2(0.05, 0.0)}, RangePolicy.of_meters(0.1))

        assert len(inboxes[2]) == 1

    def test_配送は一度だけ(self):
        bus = RadioBus()
        bus.broadcast(_call(1, Vec2(0.0, 0.0)))
        bus.deliver({2: Vec2(0.1, 0.0)}, RangePolicy.infinite())

        second = bus.deliver({2: Vec2(0.1, 0.0)}, RangePolicy.infinite())

        assert second[2] == []

    def test_送信順を保つ(self):
        bus = RadioBus()
        bus.broadcast(_call(2, Vec2(0.0, 0.0)))
        bus.broadcast(Message(MessageKind.ACK, 3, Vec2(0.0, 0.0), 0))

        inboxes = bus.deliver({1: Vec2(0.1, 0.0)}, RangePolicy.infinite())

        assert [m.kind for m in inboxes[1]] == [MessageKind.CALL, MessageKind.ACK]

    def test_範囲が広いほど受信は増える(self):
        """1000通りの配置で、受信集合は範囲について単調"""
        rng = np.random.default_rng(2019)
        policies = [RangePolicy.of_meters(0.1), RangePolicy.of_meters(0.5), RangePolicy.infinite()]

        for _ in range(1000):
            points = rng.uniform(0.0, 1.0, (5, 2))
            positions = {i + 1: Vec2(*points[i]) for i in range(5)}
            received = []
            for policy in policies:
                bus = RadioBus()
                bus.broadcast(_call(1, positions[1]))
                inboxes = bus.deliver(positions, policy)
                received.append({rid for rid, inbox in inboxes.items() if inbox})

            assert received[0] <= received[1] <= received[2]
            assert received[2] == {2, 3, 4, 5}

    def test_送信ティック不一致はProtocolError(self):
        bus = RadioBus(tick=3)
        with pytest.raises(ProtocolError):
            bus.broadcast(_call(1, Vec2(0.0, 0.0), tick=2))

    def test_未配送のままティックを進めるとProtocolError(self):
        bus = RadioBus()
        bus.broadcast(_call(1, Vec2(0.0, 0.0)))
        with pytest.raises(ProtocolError):
            bus.advance_to(1)


class TestRangePolicy:
    """RangePolicy のテスト"""

    @pytest.mark.parametrize("value", ["inf", "INF", "-1", -1, None, float("inf")])
    def test_無限範囲の表記(self, value):
        assert RangePolicy.parse(value).is_infinite

    def test_数値の表記(self):
        policy = RangePolicy.parse("0.5")
        assert policy.meters == 0.5
        assert policy.label == "0.5"

    @pytest.mark.parametrize("value", ["0", "-2", "abc", "nan"])
    def test_不正な値はエラー(self, value):
        with pytest.raises(ValueError):
            RangePolicy.parse(value)

    def test_並び順は広い順(self):
        labels = ["0.1", "inf", "0.5"]
        ordered = sorted(labels, key=lambda v: RangePolicy.parse(v).sort_key)
        assert ordered == ["inf", "0.5", "0.1"]
