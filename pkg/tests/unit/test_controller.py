"""コントローラのユニットテスト

プロトコル（コール / 応答 / モード切替）と車輪則を確認する。
"""
import pytest

from src.models.geometry import Vec2
from src.models.messages import Message, MessageKind, MessageOrigin
from src.models.sensors import SideReading
from src.models.controller_state import (
    BehaviorMode, ControllerState, ControllerParams, WheelCommand
)
from src.core.controller import decide, run_protocol, wheel_command

pytestmark = pytest.mark.unit

PARAMS = ControllerParams()
ORIGIN = MessageOrigin(robot_id=1, position=Vec2(0.5, 0.5), tick=5)
DARK = SideReading(0.0, 0.0)
BRIGHT = SideReading(20.0, 5.0)
NO_PROX = SideReading(0.0, 0.0)


def _message(kind: MessageKind, sender_id: int = 2) -> Message:
    return Message(kind, sender_id, Vec2(0.4, 0.4), 4)


class TestProtocol:
    """run_protocol のテスト"""

    def test_暗いときは何もしない(self):
        state, outbox = run_protocol(ControllerState(), DARK, [], PARAMS, 0.16, ORIGIN)

        assert state == ControllerState()
        assert outbox == []

    def test_閾値を超えるとコール(self):
        # When
        state, outbox = run_protocol(ControllerState(), BRIGHT, [], PARAMS, 0.16, ORIGIN)

        # Then
        assert state.mode is BehaviorMode.AVOIDING
        assert state.has_called is True
        assert [m.kind for m in outbox] == [MessageKind.CALL]
        assert outbox[0].sender_id == 1
        assert outbox[0].emission_tick == 5
        assert outbox[0].payload == "must mob"

    def test_閾値ちょうどはコールしない(self):
        light = SideReading(PARAMS.i_th, 0.0)
        _, outbox = run_protocol(ControllerState(), light, [], PARAMS, 0.16, ORIGIN)
        assert outbox == []

    def test_コール受信_応答してモビング(self):
        state, outbox = run_protocol(ControllerState(), DARK, [_message(MessageKind.CALL)],
                                     PARAMS, 0.16, ORIGIN)

        assert state.mode is BehaviorMode.MOBBING
        assert state.mob_decision_time == 0.16
        assert [m.kind for m in outbox] == [MessageKind.ACK]
        assert outbox[0].payload == "ok"

    def test_複数のコールにも応答は1つ(self):
        inbox = [_message(MessageKind.CALL, 2), _message(MessageKind.CALL, 3)]
        _, outbox = run_protocol(ControllerState(), DARK, inbox, PARAMS, 0.16, ORIGIN)
        assert len(outbox) == 1

    def test_モビング中もコールには応答する(self):
        mobbing = ControllerState(mode=BehaviorMode.MOBBING, mob_decision_time=0.032)

        state, outbox = run_protocol(mobbing, BRIGHT, [_message(MessageKind.CALL)], PARAMS, 0.16, ORIGIN)

        assert state.mob_decision_time == 0.032
        assert [m.kind for m in outbox] == [MessageKind.ACK]

    def test_コール済みで応答受信_モビング(self):
        called = ControllerState(has_called=True)

        state, outbox = run_protocol(called, DARK, [_message(MessageKind.ACK)], PARAMS, 0.2, ORIGIN)

        assert state.mode is BehaviorMode.MOBBING
        assert state.mob_decision_time == 0.2
        assert outbox == []

    def test_コールしていなければ応答は無視(self):
        state, _ = run_protocol(ControllerState(), DARK, [_message(MessageKind.ACK)], PARAMS, 0.2, ORIGIN)
        assert state.mode is BehaviorMode.AVOIDING

    def test_コールと応答を同時受信_応答してモビング(self):
        called = ControllerState(has_called=True)
        inbox = [_message(MessageKind.ACK), _message(MessageKind.CALL, 3)]

        state, outbox = run_protocol(called, BRIGHT, inbox, PARAMS, 0.2, ORIGIN)

        assert state.mode is BehaviorMode.MOBBING
        assert [m.kind for m in outbox] == [MessageKind.ACK]

    def test_回避中は毎ティックコールを繰り返す(self):
        state = ControllerState()
        calls = 0
        for tick in range(3):
            state, outbox = run_protocol(state, BRIGHT, [], PARAMS, 0.032 * (tick + 1), ORIGIN)
            calls += sum(1 for m in outbox if m.is_call)
        assert calls == 3

    def test_call_once_2回目はコールしない(self):
        params = ControllerParams(call_once=True)
        state, first = run_protocol(ControllerState(), BRIGHT, [], params, 0.032, ORIGIN)
        state, second = run_protocol(state, BRIGHT, [], params, 0.064, ORIGIN)

        assert len(first) == 1
        assert second == []

    def test_モビングは吸収状態(self):
        state = ControllerState(mode=BehaviorMode.MOBBING, mob_decision_time=0.1)
        for now in (0.2, 0.3):
            state, _ = run_protocol(state, DARK, [], PARAMS, now, ORIGIN)
        assert state.mode is BehaviorMode.MOBBING
        assert state.mob_decision_time == 0.1


class TestWheelCommand:
    """wheel_command のテスト"""

    def test_刺激なし_直進(self):
        command = wheel_command(BehaviorMode.AVOIDING, DARK, NO_PROX, PARAMS)
        assert command == WheelCommand(PARAMS.omega_base, PARAMS.omega_base)

    def test_左の光_回避中は右車輪が減速(self):
        # Given: 左の光量 20 → λ = 0.4
        light = SideReading(20.0, 0.0)

        # When
        command = wheel_command(BehaviorMode.AVOIDING, light, NO_PROX, PARAMS)

        # Then: 右に曲がって光源から離れる
        assert command.omega_right == pytest.approx(2.0)
        assert command.omega_left == pytest.approx(4.0)

    def test_左の光_モビング中は右車輪が加速(self):
        light = SideReading(20.0, 0.0)
        command = wheel_command(BehaviorMode.MOBBING, light, NO_PROX, PARAMS)

        # 4 + 6·0.4 = 6.4 → 上限 6.28
        assert command.omega_right == pytest.approx(6.28)
        assert command.omega_left == pytest.approx(4.0)

    def test_左の障害物_右車輪が減速(self):
        command = wheel_command(BehaviorMode.AVOIDING, DARK, SideReading(1.0, 0.0), PARAMS)
        assert command.omega_right == pytest.approx(2.5)
        assert command.omega_left == pytest.approx(4.0)

    def test_光量は飽和する(self):
        saturated = wheel_command(BehaviorMode.AVOIDING, SideReading(500.0, 0.0), NO_PROX, PARAMS)
        at_limit = wheel_command(BehaviorMode.AVOIDING, SideReading(PARAMS.i_sat, 0.0), NO_PROX, PARAMS)
        assert saturated == at_limit

    def test_出力は上限内(self):
        command = wheel_command(BehaviorMode.AVOIDING, SideReading(500.0, 500.0),
                                SideReading(3.0, 3.0), PARAMS)
        assert -PARAMS.omega_max <= command.omega_left <= PARAMS.omega_max
        # 4 - 1.5·3 - 5·1 = -5.5
        assert command.omega_left == pytest.approx(-5.5)


class TestDecide:
    """decide のテスト"""

    def test_切替後のモードで車輪則を選ぶ(self):
        # コール受信で切り替わったティックから接近則になる
        light = SideReading(20.0, 0.0)
        state, command, outbox = decide(ControllerState(), light, NO_PROX,
                                        [_message(MessageKind.CALL)], PARAMS, 0.1, ORIGIN)

        assert state.is_mobbing
        assert command.omega_right > PARAMS.omega_base
        assert len(outbox) == 1


class TestControllerParams:
    """ControllerParams のテスト"""

    def test_恐怖ゲインは障害物ゲインより大きい(self):
        with pytest.raises(ValueError):
            ControllerParams(k_fear=1.0, k_obs=1.5)

    def test_基本速度は上限以下(self):
        with pytest.raises(ValueError):
            ControllerParams(omega_base=7.0)

    def test_辞書から作成(self):
        params = ControllerParams.from_dict({'i_th': 10.0, 'call_once': True, 'extra': 1})
        assert params.i_th == 10.0
        assert params.call_once is True
